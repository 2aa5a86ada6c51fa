//! The Dirac derivative field against −∂_ξΦ, and its growth in r.

use heisenberg_spherical::paleywiener::{dirac_derivative_field, dirac_growth_ratio};
use heisenberg_spherical::specfun::{spherical_function_dxi, SeriesControl, SphericalParams};

fn main() -> heisenberg_spherical::error::Result<()> {
    let ctl = SeriesControl::default();
    let n = 1;
    let params = SphericalParams::real(n as f64, 1.0);
    for (r, t) in [(0.3, 0.0), (1.0, -0.5), (2.5, 1.2), (4.0, 2.0)] {
        let fu = dirac_derivative_field(n, r, t, &ctl)?;
        let dxi = -spherical_function_dxi(params, r, t, n, &ctl)?;
        println!("(r, t) = ({r}, {t}): f_U = {fu:.6e}, −∂_ξΦ = {dxi:.6e}");
    }
    for r in [1.0, 4.0, 10.0, 20.0] {
        println!("growth ratio at r = {r}: {:.4}", dirac_growth_ratio(n, r, &ctl)?);
    }
    Ok(())
}
