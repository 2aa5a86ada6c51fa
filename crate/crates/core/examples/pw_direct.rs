//! Support radius of a ball from the growth of ‖𝒜ʲf‖ on the fan.

use std::sync::Arc;

use heisenberg_spherical::fan::{FanGrid, LambdaRule};
use heisenberg_spherical::paleywiener::{direct_pw_sequence, DirectMethod, LimitMethod};
use heisenberg_spherical::radial::RadialGrid;
use heisenberg_spherical::testfns::RadialSpec;
use heisenberg_spherical::transform::TransformPlan;

fn main() -> heisenberg_spherical::error::Result<()> {
    let n = 1;
    let spec = RadialSpec::Ball { radius: 1.0, power: 1 };
    let fan = Arc::new(FanGrid::equispaced(n, 120, 0.2, 60.0, 300, LambdaRule::Trapezoid)?);
    let radial = Arc::new(RadialGrid::gauss_legendre(n, 2.0, 160, 1.0, 160)?);
    let plan = TransformPlan::new(radial.clone(), fan)?;
    let f = spec.sample(radial)?;

    let est = direct_pw_sequence(&f, 2.0, 0.0, 120, DirectMethod::ExactAj, LimitMethod::Ratio, &plan)?;
    for (j, norm, root, ratio) in est.rows().into_iter().step_by(20) {
        println!("j = {j:>3}  ‖u_j‖ = {norm:.3e}  root {root:?}  ratio {ratio:?}");
    }
    println!("limit {:.4}, R(f)² = {}", est.extrapolated_limit, spec.support_radius().powi(2));
    Ok(())
}
