//! M± on the fan against multiplication by A and its conjugate on the group.

use std::sync::Arc;

use heisenberg_spherical::cli::transpose_pair;
use heisenberg_spherical::fan::{transpose_defect, FanGrid, LambdaRule};
use heisenberg_spherical::radial::RadialGrid;
use heisenberg_spherical::testfns::{FanSpec, RadialSpec};
use heisenberg_spherical::transform::{spherical_transform, TransformPlan};
use num_complex::Complex64;

fn main() -> heisenberg_spherical::error::Result<()> {
    let n = 1;
    let fan = Arc::new(FanGrid::equispaced(n, 8, 0.1, 8.0, 317, LambdaRule::Trapezoid)?);
    let radial = Arc::new(RadialGrid::gauss_legendre(n, 2.1, 120, 1.05, 120)?);
    let plan = TransformPlan::new(radial.clone(), fan.clone())?;
    let f = RadialSpec::SmoothBall { radius: 1.0 }.sample(radial)?;

    let gf = spherical_transform(&f, &plan)?;
    let plus = spherical_transform(&f.multiply_by_a(1, false), &plan)?;
    let minus = spherical_transform(&f.multiply_by_a(1, true), &plan)?.scale(Complex64::new(-1.0, 0.0));
    println!("M₊𝒢f vs 𝒢(𝒜f):  {:.3e}", gf.m_plus_apply()?.relative_l2_error(&plus)?);
    println!("M₋𝒢f vs −𝒢(𝒜̄f): {:.3e}", gf.m_minus_apply()?.relative_l2_error(&minus)?);
    for k in 1..=4 {
        let exact = spherical_transform(&f.multiply_by_a(k as u32, false), &plan)?;
        println!("M₊^{k} vs 𝒢(𝒜^{k} f): {:.3e}", gf.m_plus_power(k)?.relative_l2_error(&exact)?);
    }
    // fan-compact pair: nothing leaks through the truncated λ edges
    let (phi, psi) = transpose_pair(&FanSpec::SmoothBand { rays: 4, lambda_lo: 0.5, lambda_hi: 3.0, power: 6 }, fan)?;
    println!("⟨M₊φ, ψ⟩ − ⟨φ, M₋ψ⟩: {:.3e}", transpose_defect(&phi, &psi)?);
    Ok(())
}
