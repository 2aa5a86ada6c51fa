//! Forward spherical transform, Plancherel inversion and entire extensions.
//!
//! Conventions: `𝒢f(ξ, λ) = ∫ f · Φ_{ξ,λ} dm` and
//! `f = ∫_Σ 𝒢f · conj(Φ_{ξ,λ}) dμ`, where on ray `j`
//! `Φ_{ξ,λ}(r, t) = e^{iλt} e^{−|λ|r²/4} ℓ_j(|λ|r²/2)`. The pair is an `L²` isometry.
//! Pairing against `Φ_{ξ,λ}` rather than `Φ_{ξ,λ}(z, −t)` is what makes
//! `𝒢(𝒜f) = M₊𝒢f` and `𝒢(𝒜̄f) = −M₋𝒢f` hold with `M±` as in [`crate::fan`]. `Φ` is even
//! in `z`, so `Φ(z, −t) = Φ(−z, −t)` and the two choices differ only by `λ ↦ −λ`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{ray_multiplicity, FanFunction, FanGrid, Sign};
use crate::quadrature::{csum, pairwise_sum};
use crate::radial::{sphere_area, RadialFunction, RadialGrid, Window};
use crate::specfun::{spherical_function, SeriesControl, SphericalParams};

/// Largest `|Im t| · λ_max` accepted by [`inverse_entire_extension`].
pub const MAX_EXPONENT: f64 = 700.0;

/// Precomputed kernels `K_j(λ, r) = e^{−|λ|r²/4} ℓ_j(|λ|r²/2)` and phases `e^{iλt}`.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    radial: Arc<RadialGrid>,
    fan: Arc<FanGrid>,
    // [i_λ][j][i_r]
    kernel: Vec<f64>,
    // [i_λ][i_t], positive λ; the negative side is the conjugate
    phase: Vec<Complex64>,
    // ω r^{2n−1} w_r
    radial_weights: Vec<f64>,
}

impl TransformPlan {
    pub fn new(radial: Arc<RadialGrid>, fan: Arc<FanGrid>) -> Result<Self> {
        if radial.n() != fan.n() {
            return Err(Error::DimensionMismatch {
                expected: radial.n(),
                found: fan.n(),
            });
        }
        let n = fan.n();
        let rays = fan.ray_count();
        let nr = radial.r_count();
        let kernel: Vec<f64> = fan
            .lambda_nodes()
            .par_iter()
            .flat_map_iter(|&lam| {
                let rows: Vec<Vec<f64>> = radial
                    .r_nodes()
                    .iter()
                    .map(|&r| crate::specfun::laguerre_kernel_row(fan.j_max(), n, 0.5 * lam * r * r))
                    .collect();
                let mut block = Vec::with_capacity(rays * nr);
                for j in 0..rays {
                    block.extend(rows.iter().map(|row| row[j]));
                }
                block
            })
            .collect();
        if kernel.iter().any(|k| !k.is_finite()) {
            return Err(Error::Overflow("kernel table has non-finite entries".into()));
        }
        let phase = fan
            .lambda_nodes()
            .iter()
            .flat_map(|&lam| {
                radial
                    .t_nodes()
                    .iter()
                    .map(move |&t| Complex64::from_polar(1.0, lam * t))
            })
            .collect();
        let omega = sphere_area(n);
        let radial_weights = radial
            .r_nodes()
            .iter()
            .zip(radial.r_weights())
            .map(|(&r, &w)| omega * r.powi(2 * n as i32 - 1) * w)
            .collect();
        Ok(Self {
            radial,
            fan,
            kernel,
            phase,
            radial_weights,
        })
    }

    /// A plan whose `t`-interval is `[−π/h, π/h]`, `h` the λ spacing.
    ///
    /// When the λ nodes are integer multiples of `h`, inverse transforms are
    /// `2π/h`-periodic in `t` and the forward transform of an inverse transform
    /// reproduces the fan samples up to quadrature error.
    pub fn band_limited(fan: Arc<FanGrid>, r_max: f64, r_count: usize, t_count: usize) -> Result<Self> {
        let t_max = PI / fan.spacing();
        let radial = RadialGrid::gauss_legendre(fan.n(), r_max, r_count, t_max, t_count)?;
        Self::new(Arc::new(radial), fan)
    }

    pub fn radial_grid(&self) -> &Arc<RadialGrid> {
        &self.radial
    }
    pub fn fan_grid(&self) -> &Arc<FanGrid> {
        &self.fan
    }

    /// `K_j(λ_i, r_k)`.
    pub fn kernel(&self, i_lambda: usize, j: usize, i_r: usize) -> f64 {
        let nr = self.radial.r_count();
        self.kernel[(i_lambda * self.fan.ray_count() + j) * nr + i_r]
    }

    fn kernel_slice(&self, i_lambda: usize, j: usize) -> &[f64] {
        let nr = self.radial.r_count();
        let start = (i_lambda * self.fan.ray_count() + j) * nr;
        &self.kernel[start..start + nr]
    }

    fn phase(&self, sign: Sign, i_lambda: usize, i_t: usize) -> Complex64 {
        let p = self.phase[i_lambda * self.radial.t_count() + i_t];
        match sign {
            Sign::Positive => p,
            Sign::Negative => p.conj(),
        }
    }

    fn check_radial(&self, f: &RadialFunction) -> Result<()> {
        if Arc::ptr_eq(f.grid(), &self.radial) || **f.grid() == *self.radial {
            Ok(())
        } else {
            Err(Error::GridMismatch("function is not on the plan's radial grid".into()))
        }
    }

    fn check_fan(&self, f: &FanFunction) -> Result<()> {
        if Arc::ptr_eq(f.grid(), &self.fan) || **f.grid() == *self.fan {
            Ok(())
        } else {
            Err(Error::GridMismatch("function is not on the plan's fan grid".into()))
        }
    }
}

/// `𝒢f(j, λ) = Σ f(r, t) e^{iλt} K_j(|λ|, r) · haar(r, t)` over `f`'s valid window.
pub fn spherical_transform(f: &RadialFunction, plan: &TransformPlan) -> Result<FanFunction> {
    plan.check_radial(f)?;
    let grid = &plan.radial;
    let fan = &plan.fan;
    let Window { r: wr, t: wt } = f.window().clone();
    let nr = grid.r_count();
    let l = fan.lambda_count();
    let tw = grid.t_weights();
    let zero = Complex64::new(0.0, 0.0);
    // b[s][i_λ][i_r] = Σ_t f e^{iλt} w_t
    let b: Vec<Complex64> = (0..2 * l * nr)
        .into_par_iter()
        .map(|idx| {
            let i_r = idx % nr;
            let i = (idx / nr) % l;
            let sign = if idx / (nr * l) == 0 { Sign::Positive } else { Sign::Negative };
            if !wr.contains(&i_r) {
                return zero;
            }
            let terms: Vec<Complex64> = wt
                .clone()
                .map(|k| f.get(i_r, k) * plan.phase(sign, i, k) * tw[k])
                .collect();
            csum(&terms)
        })
        .collect();
    let values: Vec<Complex64> = (0..fan.len())
        .into_par_iter()
        .map(|idx| {
            let (sign, j, i) = fan.node(idx);
            let row = &b[(sign.index() * l + i) * nr..(sign.index() * l + i + 1) * nr];
            let kern = plan.kernel_slice(i, j);
            let terms: Vec<Complex64> = (0..nr)
                .map(|k| row[k] * (kern[k] * plan.radial_weights[k]))
                .collect();
            csum(&terms)
        })
        .collect();
    FanFunction::with_window(fan.clone(), values, fan.j_max(), 0)
}

/// `f(r, t) = Σ F(j, λ) e^{−iλt} K_j(|λ|, r) · μ(j, λ)` over `F`'s valid window.
pub fn inverse_spherical_transform(big_f: &FanFunction, plan: &TransformPlan) -> Result<RadialFunction> {
    plan.check_fan(big_f)?;
    let grid = &plan.radial;
    let fan = &plan.fan;
    let nr = grid.r_count();
    let nt = grid.t_count();
    let l = fan.lambda_count();
    let zero = Complex64::new(0.0, 0.0);
    // a[s][i_λ][i_r] = Σ_j F μ K
    let a: Vec<Complex64> = (0..2 * l * nr)
        .into_par_iter()
        .map(|idx| {
            let i_r = idx % nr;
            let i = (idx / nr) % l;
            let sign = if idx / (nr * l) == 0 { Sign::Positive } else { Sign::Negative };
            if !big_f.is_valid(0, i) {
                return zero;
            }
            let terms: Vec<Complex64> = (0..=big_f.valid_j())
                .map(|j| big_f.get(sign, j, i) * (fan.plancherel_weight(j, i) * plan.kernel(i, j, i_r)))
                .collect();
            csum(&terms)
        })
        .collect();
    let values: Vec<Complex64> = (0..nr * nt)
        .into_par_iter()
        .map(|idx| {
            let (i_r, k) = (idx / nt, idx % nt);
            let terms: Vec<Complex64> = Sign::BOTH
                .iter()
                .flat_map(|&s| {
                    let a = &a;
                    (0..l).map(move |i| a[(s.index() * l + i) * nr + i_r] * plan.phase(s, i, k).conj())
                })
                .collect();
            csum(&terms)
        })
        .collect();
    RadialFunction::from_values(grid.clone(), values)
}

/// Pointwise estimate of the part of an inverse transform lost to truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailReport {
    /// `max |F| (1+ξ)^{n+2}` over the outermost ray and λ-nodes of the window.
    pub decay_constant: f64,
    /// `∫ (1+ξ)^{−(n+2)} dμ` over the fan outside the sampled window.
    pub outside_mass: f64,
    /// `decay_constant · outside_mass`, a bound for `|f − f_truncated|` when
    /// `|F| ≤ C(1+ξ)^{−(n+2)}` outside the window (`|Φ| ≤ 1` on the fan).
    pub bound: f64,
}

/// Inverse transform together with its [`TailReport`].
pub fn inverse_with_tail(big_f: &FanFunction, plan: &TransformPlan) -> Result<(RadialFunction, TailReport)> {
    let f = inverse_spherical_transform(big_f, plan)?;
    Ok((f, tail_report(big_f)?))
}

pub fn tail_report(big_f: &FanFunction) -> Result<TailReport> {
    let fan = big_f.grid();
    let n = fan.n();
    let l = fan.lambda_count();
    let m = big_f.valid_lambda_margin();
    let (lo, hi) = (m, l - 1 - m);
    let decay = |j: usize, i: usize| (1.0 + fan.xi(j, i)).powi(n as i32 + 2);
    let mut decay_constant: f64 = 0.0;
    for s in Sign::BOTH {
        for j in 0..=big_f.valid_j() {
            for i in [lo, hi] {
                decay_constant = decay_constant.max(big_f.get(s, j, i).norm() * decay(j, i));
            }
        }
        for i in lo..=hi {
            let j = big_f.valid_j();
            decay_constant = decay_constant.max(big_f.get(s, j, i).norm() * decay(j, i));
        }
    }
    let mut inside = 0.0;
    for j in 0..=big_f.valid_j() {
        let terms: Vec<f64> = (lo..=hi)
            .map(|i| fan.plancherel_weight(j, i) / decay(j, i))
            .collect();
        inside += 2.0 * pairwise_sum(&terms);
    }
    let outside_mass = (integrability_mass(n)? - inside).max(0.0);
    Ok(TailReport {
        decay_constant,
        outside_mass,
        bound: decay_constant * outside_mass,
    })
}

/// `∫_Σ (1+ξ)^{−(n+2)} dμ = 2(2π)^{−(n+1)} Σ_j binom(j+n−1, j) / ((n+1)(2j+n)^{n+1})`.
pub fn integrability_mass(n: usize) -> Result<f64> {
    const TERMS: usize = 100_000;
    let nf = n as f64;
    let mut terms = Vec::with_capacity(TERMS);
    for j in 0..TERMS {
        terms.push(ray_multiplicity(j, n)? / ((nf + 1.0) * (2.0 * j as f64 + nf).powi(n as i32 + 1)));
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    // the summand behaves like j^{−2} / ((n−1)! (n+1) 2^{n+1})
    let tail = 1.0 / (fact * (nf + 1.0) * 2f64.powi(n as i32 + 1) * (TERMS as f64 - 0.5));
    Ok(2.0 * (2.0 * PI).powi(-(n as i32 + 1)) * (pairwise_sum(&terms) + tail))
}

/// `|‖f‖² − ‖𝒢f‖²_{L²(μ)}| / ‖f‖²`.
pub fn plancherel_defect(f: &RadialFunction, plan: &TransformPlan) -> Result<f64> {
    let space = f.l2_norm().powi(2);
    if space == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let fan = spherical_transform(f, plan)?.l2_norm().powi(2);
    Ok((space - fan).abs() / space)
}

/// `F(ξ, λ) = ⟨f, Φ_{ξ,λ}⟩` at complex `(ξ, λ)`; equals `𝒢f` on fan nodes.
pub fn entire_extension(
    f: &RadialFunction,
    params: SphericalParams,
    plan: &TransformPlan,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    plan.check_radial(f)?;
    entire_extension_on(f, params, ctl)
}

/// [`entire_extension`] without a plan: quadrature on `f`'s own grid.
pub fn entire_extension_on(f: &RadialFunction, params: SphericalParams, ctl: &SeriesControl) -> Result<Complex64> {
    let grid = f.grid();
    let Window { r: wr, t: wt } = f.window().clone();
    let n = grid.n();
    let zero = Complex64::new(0.0, 0.0);
    let per_r: Vec<Result<Complex64>> = wr
        .clone()
        .into_par_iter()
        .map(|i| {
            let r = grid.r_nodes()[i];
            let radial = spherical_function(params, r, zero, n, ctl)?;
            let terms: Vec<Complex64> = wt
                .clone()
                .map(|k| {
                    let t = grid.t_nodes()[k];
                    f.get(i, k) * (Complex64::i() * params.lambda * t).exp() * grid.t_weights()[k]
                })
                .collect();
            let w = sphere_area(n) * r.powi(2 * n as i32 - 1) * grid.r_weights()[i];
            Ok(csum(&terms) * radial * w)
        })
        .collect();
    let terms: Vec<Complex64> = per_r.into_iter().collect::<Result<_>>()?;
    Ok(csum(&terms))
}

/// The inverse transform at `(r, t)` with complex `t`: phases `e^{−iλt}` continue
/// analytically, so `t = is` weights ray nodes by `e^{λs}`.
pub fn inverse_entire_extension(
    big_f: &FanFunction,
    r: f64,
    t: Complex64,
    plan: &TransformPlan,
) -> Result<Complex64> {
    plan.check_fan(big_f)?;
    let fan = &plan.fan;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid("r", "must be finite and nonnegative"));
    }
    if t.im.abs() * fan.lambda_max() > MAX_EXPONENT {
        return Err(Error::Overflow(format!(
            "|Im t| · λ_max = {} exceeds {MAX_EXPONENT}",
            t.im.abs() * fan.lambda_max()
        )));
    }
    let n = fan.n();
    let l = fan.lambda_count();
    let terms: Vec<Complex64> = (0..l)
        .into_par_iter()
        .flat_map_iter(|i| {
            if !big_f.is_valid(0, i) {
                return Vec::new();
            }
            let lam = fan.lambda_nodes()[i];
            let row = crate::specfun::laguerre_kernel_row(big_f.valid_j(), n, 0.5 * lam * r * r);
            Sign::BOTH
                .iter()
                .map(|&s| {
                    let signed = s.factor() * lam;
                    let phase = (-Complex64::i() * signed * t).exp();
                    let ray: Vec<Complex64> = (0..=big_f.valid_j())
                        .map(|j| big_f.get(s, j, i) * (fan.plancherel_weight(j, i) * row[j]))
                        .collect();
                    csum(&ray) * phase
                })
                .collect()
        })
        .collect();
    Ok(csum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::spherical_function_fan;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn profile(lam: f64, a: f64, b: f64) -> f64 {
        if lam <= a || lam >= b {
            0.0
        } else {
            ((lam - a) * (b - lam)).powi(4)
        }
    }

    fn band_plan() -> TransformPlan {
        // λ on the lattice h·Z with h = 1/16
        let fan = Arc::new(FanGrid::uniform(1, 6, 0.0625, 2.5, 40).unwrap());
        TransformPlan::band_limited(fan, 16.0, 160, 140).unwrap()
    }

    fn fan_compact(plan: &TransformPlan) -> FanFunction {
        FanFunction::from_fn(plan.fan_grid().clone(), |j, lam, _| {
            if j > 2 {
                return c(0.0);
            }
            let p = profile(lam.abs(), 0.8, 2.0);
            Complex64::new(p, (j as f64 - 0.5) * p * lam)
        })
        .unwrap()
    }

    #[test]
    fn kernel_table_matches_spherical_function() {
        let plan = band_plan();
        let g = plan.radial_grid();
        for (i, j, ir) in [(0, 0, 0), (5, 3, 40), (39, 6, 159)] {
            let lam = plan.fan_grid().lambda_nodes()[i];
            let phi = spherical_function_fan(j, lam, g.r_nodes()[ir], c(0.0), 1).unwrap();
            assert!((plan.kernel(i, j, ir) - phi.re).abs() < 1e-14);
            assert!(plan.kernel(i, j, ir).abs() <= 1.0);
        }
    }

    #[test]
    fn zero_and_linearity() {
        let plan = band_plan();
        let g = plan.radial_grid().clone();
        let zero = RadialFunction::zeros(g.clone());
        assert_eq!(spherical_transform(&zero, &plan).unwrap().max_abs(), 0.0);
        let zf = FanFunction::zeros(plan.fan_grid().clone());
        assert_eq!(inverse_spherical_transform(&zf, &plan).unwrap().max_abs(), 0.0);
        let f = RadialFunction::from_real_fn(g.clone(), |r, t| (-r * r - t * t).exp()).unwrap();
        let h = RadialFunction::from_fn(g.clone(), |r, t| Complex64::new(r, t).exp() * (-r * r - t * t).exp()).unwrap();
        let a = Complex64::new(2.0, -1.0);
        let combo = f.scale(a).zip_with(&h, |x, y| x + y * 3.0).unwrap();
        let lhs = spherical_transform(&combo, &plan).unwrap();
        let rhs = spherical_transform(&f, &plan)
            .unwrap()
            .scale(a)
            .zip_with(&spherical_transform(&h, &plan).unwrap(), |x, y| x + y * 3.0)
            .unwrap();
        assert!(lhs.relative_l2_error(&rhs).unwrap() < 1e-13);
        assert!(plancherel_defect(&zero, &plan).is_err());
    }

    #[test]
    fn roundtrip_and_plancherel() {
        let plan = band_plan();
        let big_f = fan_compact(&plan);
        let f = inverse_spherical_transform(&big_f, &plan).unwrap();
        let back = spherical_transform(&f, &plan).unwrap();
        let err = back.relative_l2_error(&big_f).unwrap();
        assert!(err < 1e-6, "{err}");
        let defect = plancherel_defect(&f, &plan).unwrap();
        assert!(defect < 1e-6, "{defect}");
        let scaled = plancherel_defect(&f.scale(Complex64::new(0.0, 7.0)), &plan).unwrap();
        assert!((scaled - defect).abs() < 1e-12);
    }

    #[test]
    fn single_node_inverse_is_scaled_phi() {
        let plan = band_plan();
        let fan = plan.fan_grid().clone();
        let (j0, i0) = (2, 17);
        let big_f = FanFunction::from_fn(fan.clone(), |_, _, _| c(0.0)).unwrap();
        let mut values = big_f.values().to_vec();
        values[fan.index(Sign::Negative, j0, i0)] = c(1.0);
        let big_f = FanFunction::with_window(fan.clone(), values, fan.j_max(), 0).unwrap();
        let f = inverse_spherical_transform(&big_f, &plan).unwrap();
        let lam = -fan.lambda_nodes()[i0];
        let w = fan.plancherel_weight(j0, i0);
        let g = plan.radial_grid();
        for (ir, it) in [(3, 4), (50, 70), (120, 10)] {
            let phi = spherical_function_fan(j0, lam, g.r_nodes()[ir], c(g.t_nodes()[it]), 1).unwrap();
            assert!((f.get(ir, it) - phi.conj() * w).norm() < 1e-15);
        }
    }

    #[test]
    fn transform_bounded_by_l1_norm() {
        let plan = band_plan();
        let g = plan.radial_grid().clone();
        let f = RadialFunction::from_real_fn(g, |r, t| (1.0 - r.powi(4) / 16.0 - t * t).max(0.0)).unwrap();
        let l1 = f.weighted_lp_norm(1.0, 0.0).unwrap();
        let gf = spherical_transform(&f, &plan).unwrap();
        assert!(gf.max_abs() <= l1 * (1.0 + 1e-12));
    }

    #[test]
    fn tail_report_shrinks_for_wider_windows() {
        let mass1 = integrability_mass(1).unwrap();
        assert!((mass1 - 1.0 / 32.0).abs() < 1e-9);
        let plan = band_plan();
        let big_f = FanFunction::from_fn(plan.fan_grid().clone(), |_, _, xi| c((1.0 + xi).powi(-4))).unwrap();
        let rep = tail_report(&big_f).unwrap();
        assert!(rep.outside_mass > 0.0 && rep.outside_mass < mass1);
        assert!(rep.bound > 0.0);
        let compact = tail_report(&fan_compact(&plan)).unwrap();
        assert_eq!(compact.bound, 0.0);
    }

    #[test]
    fn inverse_entire_extension_real_and_imaginary_t() {
        let plan = band_plan();
        let big_f = fan_compact(&plan);
        let f = inverse_spherical_transform(&big_f, &plan).unwrap();
        let g = plan.radial_grid();
        let (ir, it) = (30, 77);
        let v = inverse_entire_extension(&big_f, g.r_nodes()[ir], c(g.t_nodes()[it]), &plan).unwrap();
        assert!((v - f.get(ir, it)).norm() < 1e-14);
        // t = is: the Plancherel sum with weights e^{λs}
        let s = 0.8;
        let r = 1.3;
        let v = inverse_entire_extension(&big_f, r, Complex64::new(0.0, s), &plan).unwrap();
        let fan = plan.fan_grid();
        let mut expect = c(0.0);
        for sign in Sign::BOTH {
            for j in 0..=fan.j_max() {
                for i in 0..fan.lambda_count() {
                    let lam = fan.lambda(sign, i);
                    let k = spherical_function_fan(j, lam, r, c(0.0), 1).unwrap();
                    expect += big_f.get(sign, j, i) * k * fan.plancherel_weight(j, i) * (lam * s).exp();
                }
            }
        }
        assert!((v - expect).norm() < 1e-12 * expect.norm());
        // holomorphic in t
        let h = 1e-4;
        let t0 = Complex64::new(0.4, 0.3);
        let fx = |t: Complex64| inverse_entire_extension(&big_f, r, t, &plan).unwrap();
        let dx = (fx(t0 + h) - fx(t0 - h)) / (2.0 * h);
        let dy = (fx(t0 + Complex64::new(0.0, h)) - fx(t0 - Complex64::new(0.0, h))) / (2.0 * h);
        assert!((dy - Complex64::i() * dx).norm() < 1e-6 * dx.norm().max(1.0));
        assert!(matches!(
            inverse_entire_extension(&big_f, r, Complex64::new(0.0, 400.0), &plan),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn entire_extension_agrees_on_fan_and_is_holomorphic() {
        let fan = Arc::new(FanGrid::uniform(1, 4, 0.25, 3.0, 12).unwrap());
        let radial = Arc::new(RadialGrid::gauss_legendre(1, 2.0, 80, 1.0, 80).unwrap());
        let plan = TransformPlan::new(radial.clone(), fan.clone()).unwrap();
        let f = RadialFunction::from_real_fn(radial, |r, t| (1.0 - r.powi(4) / 16.0 - t * t).max(0.0).powi(4)).unwrap();
        let gf = spherical_transform(&f, &plan).unwrap();
        let ctl = SeriesControl::default();
        for (s, j, i) in [(Sign::Positive, 0, 3), (Sign::Negative, 3, 7)] {
            let p = SphericalParams::fan(j, fan.lambda(s, i), 1);
            let e = entire_extension(&f, p, &plan, &ctl).unwrap();
            assert!((e - gf.get(s, j, i)).norm() < 1e-12 * gf.max_abs());
        }
        let h = 1e-4;
        let p0 = SphericalParams::new(Complex64::new(1.5, 0.4), Complex64::new(0.3, -0.6));
        let ev = |p: SphericalParams| entire_extension(&f, p, &plan, &ctl).unwrap();
        let shift = |dxi: Complex64, dl: Complex64| SphericalParams::new(p0.xi + dxi, p0.lambda + dl);
        let z = c(0.0);
        let ih = Complex64::new(0.0, h);
        let dxi_x = (ev(shift(c(h), z)) - ev(shift(-c(h), z))) / (2.0 * h);
        let dxi_y = (ev(shift(ih, z)) - ev(shift(-ih, z))) / (2.0 * h);
        assert!((dxi_y - Complex64::i() * dxi_x).norm() < 1e-6);
        let dl_x = (ev(shift(z, c(h))) - ev(shift(z, -c(h)))) / (2.0 * h);
        let dl_y = (ev(shift(z, ih)) - ev(shift(z, -ih))) / (2.0 * h);
        assert!((dl_y - Complex64::i() * dl_x).norm() < 1e-6);
    }

    #[test]
    fn sublaplacian_intertwines_with_xi() {
        let fan = Arc::new(FanGrid::uniform(1, 4, 0.25, 3.0, 12).unwrap());
        let radial = Arc::new(RadialGrid::gauss_legendre(1, 2.2, 200, 1.1, 200).unwrap());
        let plan = TransformPlan::new(radial.clone(), fan).unwrap();
        let f = RadialFunction::from_real_fn(radial, |r, t| (1.0 - r.powi(4) / 16.0 - t * t).max(0.0).powi(6)).unwrap();
        let lf = f.sublaplacian_apply().unwrap();
        let lhs = spherical_transform(&lf, &plan).unwrap();
        let rhs = spherical_transform(&f, &plan).unwrap().multiply_by_xi(1);
        let err = lhs.relative_l2_error(&rhs).unwrap();
        assert!(err < 1e-4, "{err}");
    }
    #[test]
    fn m_operators_intertwine_with_a_weight() {
        let fan = Arc::new(FanGrid::uniform(1, 8, 0.1, 8.0, 317).unwrap());
        let radial = Arc::new(RadialGrid::gauss_legendre(1, 2.1, 120, 1.05, 120).unwrap());
        let plan = TransformPlan::new(radial.clone(), fan).unwrap();
        let f = RadialFunction::from_real_fn(radial, |r, t| (1.0 - r.powi(4) / 16.0 - t * t).max(0.0).powi(6)).unwrap();
        let gf = spherical_transform(&f, &plan).unwrap();
        let plus = spherical_transform(&f.multiply_by_a(1, false), &plan).unwrap();
        let minus = spherical_transform(&f.multiply_by_a(1, true), &plan).unwrap().scale(c(-1.0));
        let e_plus = gf.m_plus_apply().unwrap().relative_l2_error(&plus).unwrap();
        let e_minus = gf.m_minus_apply().unwrap().relative_l2_error(&minus).unwrap();
        assert!(e_plus < 1e-4 && e_minus < 1e-4, "{e_plus} {e_minus}");
    }
}
