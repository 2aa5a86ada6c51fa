//! Spectral radius of a fan band from the growth of ‖LʲF^∨‖ on the group.

use std::sync::Arc;

use heisenberg_spherical::fan::FanGrid;
use heisenberg_spherical::paleywiener::{inverse_pw_sequence, InverseMethod, LimitMethod};
use heisenberg_spherical::radial::RadialGrid;
use heisenberg_spherical::testfns::FanSpec;
use heisenberg_spherical::transform::TransformPlan;

fn main() -> heisenberg_spherical::error::Result<()> {
    let fan = Arc::new(FanGrid::lattice(1, 2, 1.0 / 16.0, 32)?);
    let spec = FanSpec::Band { rays: 1, lambda_lo: 1.0, lambda_hi: 1.5, edge_power: 0 };
    let big_f = spec.sample(fan.clone())?;
    println!("max ξ on the support = {}", spec.spectral_radius(&fan));

    let plan = TransformPlan::band_limited(fan.clone(), 16.0, 160, 120)?;
    let est = inverse_pw_sequence(&big_f, 2.0, 0.0, 30, InverseMethod::FanSide, LimitMethod::Ratio, &plan)?;
    println!("fan side, j ≤ 30: limit {:.4}", est.extrapolated_limit);

    // every stencil pass multiplies roundoff by about 1/Δ², so only a few powers are usable
    let local = Arc::new(RadialGrid::gauss_legendre(1, 8.0, 200, 8.0, 200)?);
    let plan = TransformPlan::new(local, fan)?;
    let est = inverse_pw_sequence(&big_f, 2.0, 0.0, 3, InverseMethod::SpaceSide, LimitMethod::Ratio, &plan)?;
    println!("space side on |t| ≤ 8, ratios for j = 1, 2: {:.4?}", est.ratio_sequence);
    Ok(())
}
