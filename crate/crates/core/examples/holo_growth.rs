//! Growth of the entire extension along ξ = (n+1)λ for a tensor function.

use heisenberg_spherical::paleywiener::{holo_growth_probe, AnnulusProfile, BumpProfile};
use heisenberg_spherical::specfun::SeriesControl;

fn main() -> heisenberg_spherical::error::Result<()> {
    let samples: Vec<f64> = (1..=6).map(|k| 5.0 * k as f64).collect();
    let rows = holo_growth_probe(1, &AnnulusProfile, &BumpProfile, &samples, &SeriesControl::default())?;
    println!("{:>6} {:>12} {:>12} {:>12}", "λ", "|F|", "|ℱh|", "ratio");
    for r in rows {
        println!("{:>6} {:>12.4e} {:>12.4e} {:>12.4e}", r.lambda, r.entire_abs, r.fourier_h_abs, r.ratio);
    }
    Ok(())
}
