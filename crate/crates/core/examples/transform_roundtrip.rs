//! Forward transform of a smooth bump, then back again on a band-limited plan.

use std::sync::Arc;

use heisenberg_spherical::fan::FanGrid;
use heisenberg_spherical::testfns::FanSpec;
use heisenberg_spherical::transform::{inverse_with_tail, spherical_transform, TransformPlan};

fn main() -> heisenberg_spherical::error::Result<()> {
    let fan = Arc::new(FanGrid::lattice(1, 6, 1.0 / 16.0, 40)?);
    let plan = TransformPlan::band_limited(fan.clone(), 16.0, 160, 140)?;
    let big_f = FanSpec::SmoothBand { rays: 2, lambda_lo: 0.8, lambda_hi: 2.0, power: 4 }.sample(fan)?;

    let (f, tail) = inverse_with_tail(&big_f, &plan)?;
    println!("inverse: max |f| = {:.6e}, tail bound {:.3e}", f.max_abs(), tail.bound);
    let back = spherical_transform(&f, &plan)?;
    println!("‖𝒢(𝒢⁻¹F) − F‖/‖F‖ = {:.3e}", back.relative_l2_error(&big_f)?);
    Ok(())
}
