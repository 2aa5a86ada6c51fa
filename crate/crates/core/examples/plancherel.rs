//! Compares ‖f‖ on the group with ‖𝒢f‖ on the fan.

use std::sync::Arc;

use heisenberg_spherical::fan::FanGrid;
use heisenberg_spherical::testfns::FanSpec;
use heisenberg_spherical::transform::{inverse_spherical_transform, plancherel_defect, TransformPlan};

fn main() -> heisenberg_spherical::error::Result<()> {
    for n in [1, 2, 3] {
        let fan = Arc::new(FanGrid::lattice(n, 6, 1.0 / 16.0, 40)?);
        let plan = TransformPlan::band_limited(fan.clone(), 16.0, 160, 140)?;
        let big_f = FanSpec::SmoothBand { rays: 3, lambda_lo: 0.5, lambda_hi: 2.0, power: 4 }.sample(fan)?;
        let f = inverse_spherical_transform(&big_f, &plan)?;
        println!("n = {n}: ‖f‖ = {:.12}, relative defect {:.2e}", f.l2_norm(), plancherel_defect(&f, &plan)?);
    }
    Ok(())
}
