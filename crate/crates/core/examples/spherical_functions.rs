//! Evaluates Φ_{ξ,λ} on the fan, off the fan, at λ = 0 and at complex t.

use heisenberg_spherical::specfun::{spherical_function, SeriesControl, SphericalParams};
use num_complex::Complex64;

fn main() -> heisenberg_spherical::error::Result<()> {
    let ctl = SeriesControl::default();
    let n = 2;
    let cases = [
        ("fan ray j=3, λ=0.8", SphericalParams::fan(3, 0.8, n)),
        ("fan ray j=0, λ=-1.5", SphericalParams::fan(0, -1.5, n)),
        ("Bessel point ξ=2, λ=0", SphericalParams::real(2.0, 0.0)),
        ("complex ξ=1+2i, λ=0.5", SphericalParams::new(Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0))),
    ];
    for (label, p) in cases {
        println!("{label}");
        for r in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let real_t = spherical_function(p, r, Complex64::new(0.7, 0.0), n, &ctl)?;
            let complex_t = spherical_function(p, r, Complex64::new(0.7, 0.3), n, &ctl)?;
            println!("  r = {r:<4} Φ(r, 0.7) = {real_t:.6}   Φ(r, 0.7+0.3i) = {complex_t:.6}");
        }
    }
    Ok(())
}
