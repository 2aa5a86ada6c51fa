//! Support and spectral-radius estimators from norms of iterated operators,
//! and the two growth demos.
//!
//! Direct side: `‖(1+ξ)^{−β} M₊ʲ𝒢f‖_{Lᵖ(μ)}^{1/j} → R(f)²`.
//! Inverse side: `‖(1+𝒜)^{−β} LʲF^∨‖_{Lᵖ(Hₙ)}^{1/j} → ρ(F)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::FanFunction;
use crate::radial::RadialFunction;
use crate::specfun::{spherical_function, SeriesControl, SphericalParams};
use crate::testfns::{tensor_g, tensor_h};
use crate::transform::{inverse_entire_extension, inverse_spherical_transform, spherical_transform, TransformPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMethod {
    Root,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectMethod {
    /// `u_j = M₊ʲ𝒢f` by finite differences on the fan.
    DiscreteMplus,
    /// `u_j = 𝒢(𝒜ʲf)`.
    ExactAj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseMethod {
    /// `LʲF^∨ = (ξʲF)^∨`.
    FanSide,
    /// `Lʲ` by repeated finite-difference sublaplacians.
    SpaceSide,
}

/// Norms of `u_0, …, u_{j_max}` and the derived root and ratio sequences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// `‖u_j‖` for `j = 0..=j_max`.
    pub norms: Vec<f64>,
    /// `‖u_j‖^{1/j}` for `j = 1..=j_max`.
    pub sequence: Vec<f64>,
    /// `‖u_{j+1}‖ / ‖u_j‖` for `j = 1..j_max`.
    pub ratio_sequence: Vec<f64>,
    pub extrapolated_limit: f64,
    pub method: LimitMethod,
    pub p: f64,
    pub beta: f64,
}

impl RadiusEstimate {
    pub fn from_norms(norms: Vec<f64>, method: LimitMethod, p: f64, beta: f64) -> Result<Self> {
        if norms.len() < 3 {
            return Err(Error::SequenceTooShort {
                needed: 3,
                got: norms.len(),
            });
        }
        let sequence = (1..norms.len()).map(|j| root(norms[j], j)).collect();
        let ratio_sequence = (1..norms.len() - 1).map(|j| ratio(norms[j + 1], norms[j])).collect();
        let extrapolated_limit = estimate_limit(&norms, method)?;
        Ok(Self {
            norms,
            sequence,
            ratio_sequence,
            extrapolated_limit,
            method,
            p,
            beta,
        })
    }

    /// Rows `(j, norm, root, ratio)`; `root` is empty at `j = 0`, `ratio` is `‖u_j‖/‖u_{j−1}‖`.
    pub fn rows(&self) -> Vec<(usize, f64, Option<f64>, Option<f64>)> {
        self.norms
            .iter()
            .enumerate()
            .map(|(j, &nrm)| {
                let rt = (j > 0).then(|| self.sequence[j - 1]);
                let rat = (j > 0).then(|| ratio(nrm, self.norms[j - 1]));
                (j, nrm, rt, rat)
            })
            .collect()
    }
}

fn root(v: f64, j: usize) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.powf(1.0 / j as f64)
    }
}

fn ratio(next: f64, prev: f64) -> f64 {
    if prev == 0.0 {
        0.0
    } else {
        next / prev
    }
}

/// Limit of `‖u_j‖^{1/j}` from norms indexed by `j = 0, 1, …`: the last `j`-th
/// root, or the mean of the last three ratios `‖u_{j+1}‖/‖u_j‖`.
pub fn estimate_limit(norms: &[f64], method: LimitMethod) -> Result<f64> {
    if norms.len() < 3 {
        return Err(Error::SequenceTooShort {
            needed: 3,
            got: norms.len(),
        });
    }
    if norms.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid("sequence", "entries must be finite and nonnegative"));
    }
    let last = norms.len() - 1;
    Ok(match method {
        LimitMethod::Root => root(norms[last], last),
        LimitMethod::Ratio => {
            let count = 3.min(last - 1).max(1);
            let first = last - count;
            if norms[first..].contains(&0.0) {
                0.0
            } else {
                (first..last).map(|j| norms[j + 1] / norms[j]).sum::<f64>() / count as f64
            }
        }
    })
}

/// `β = (n+2)/p + 1`, the default weight exponent on both sides.
pub fn default_beta(n: usize, p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        (n as f64 + 2.0) / p + 1.0
    }
}

/// The fan functions `u_0, …, u_{j_max}` of the direct sequence.
pub fn direct_powers(f: &RadialFunction, j_max: usize, method: DirectMethod, plan: &TransformPlan) -> Result<Vec<FanFunction>> {
    let mut out = Vec::with_capacity(j_max + 1);
    match method {
        DirectMethod::ExactAj => {
            let mut g = f.clone();
            for j in 0..=j_max {
                if j > 0 {
                    g = g.multiply_by_a(1, false);
                }
                out.push(spherical_transform(&g, plan)?);
            }
        }
        DirectMethod::DiscreteMplus => {
            let mut u = spherical_transform(f, plan)?;
            for j in 0..=j_max {
                if j > 0 {
                    u = u.m_plus_apply()?;
                }
                out.push(u.clone());
            }
        }
    }
    Ok(out)
}

/// `R_j = ‖(1+ξ)^{−β} u_j‖_{Lᵖ(μ)}^{1/j}`, targeting `R(f)²`.
pub fn direct_pw_sequence(
    f: &RadialFunction,
    p: f64,
    beta: f64,
    j_max: usize,
    method: DirectMethod,
    limit: LimitMethod,
    plan: &TransformPlan,
) -> Result<RadiusEstimate> {
    if f.max_abs() == 0.0 {
        return RadiusEstimate::from_norms(vec![0.0; j_max.max(2) + 1], limit, p, beta);
    }
    if method == DirectMethod::DiscreteMplus && j_max > plan.fan_grid().j_max() {
        return Err(Error::WindowExhausted(format!(
            "{j_max} applications of M₊ need at least {j_max} rays, j_max is {}",
            plan.fan_grid().j_max()
        )));
    }
    let norms = direct_powers(f, j_max, method, plan)?
        .iter()
        .map(|u| u.lp_norm(p, beta))
        .collect::<Result<Vec<_>>>()?;
    RadiusEstimate::from_norms(norms, limit, p, beta)
}

/// The space-side oracle `‖(1+𝒜)^{−β} 𝒜ʲf‖_{Lᵖ(Hₙ)}` for `j = 0..=j_max`.
pub fn space_side_direct_norms(f: &RadialFunction, p: f64, beta: f64, j_max: usize) -> Result<Vec<f64>> {
    let mut g = f.clone();
    let mut norms = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        if j > 0 {
            g = g.multiply_by_a(1, false);
        }
        norms.push(g.weighted_lp_norm(p, beta)?);
    }
    Ok(norms)
}

/// `ρ_j = ‖(1+𝒜)^{−β} LʲF^∨‖_{Lᵖ(Hₙ)}^{1/j}`, targeting `ρ(F) = max ξ` on the support.
pub fn inverse_pw_sequence(
    big_f: &FanFunction,
    p: f64,
    beta: f64,
    j_max: usize,
    method: InverseMethod,
    limit: LimitMethod,
    plan: &TransformPlan,
) -> Result<RadiusEstimate> {
    if big_f.max_abs() == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let mut norms = Vec::with_capacity(j_max + 1);
    match method {
        InverseMethod::FanSide => {
            for j in 0..=j_max {
                let f = inverse_spherical_transform(&big_f.multiply_by_xi(j as u32), plan)?;
                norms.push(f.weighted_lp_norm(p, beta)?);
            }
        }
        InverseMethod::SpaceSide => {
            let mut f = inverse_spherical_transform(big_f, plan)?;
            for j in 0..=j_max {
                if j > 0 {
                    f = f.sublaplacian_apply()?;
                }
                norms.push(f.weighted_lp_norm(p, beta)?);
            }
        }
    }
    RadiusEstimate::from_norms(norms, limit, p, beta)
}

/// `log|Lʲf(r, t)| − j log ρ` for `j = 0..=j_max`, `f = F^∨`, `ρ = ρ(F)`.
pub fn lj_growth_profile(
    big_f: &FanFunction,
    rho: f64,
    r: f64,
    t: f64,
    j_max: usize,
    plan: &TransformPlan,
) -> Result<Vec<f64>> {
    if !(rho > 0.0) {
        return Err(Error::invalid("rho", "must be positive"));
    }
    (0..=j_max)
        .map(|j| {
            let v = inverse_entire_extension(&big_f.multiply_by_xi(j as u32), r, Complex64::new(t, 0.0), plan)?;
            Ok(v.norm().ln() - j as f64 * rho.ln())
        })
        .collect()
}

/// One row of the growth table along `ξ = (n+1)λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub lambda: f64,
    /// `|F((n+1)λ, λ)|` for `F = ⟨g⊗h, Φ⟩`.
    pub entire_abs: f64,
    /// `|ℱh(λ)|`.
    pub fourier_h_abs: f64,
    /// `|F|·e^{−λ/2} / |ℱh|`.
    pub ratio: f64,
}

/// Radial and time profiles of the tensor function `g(|z|) h(t)`.
pub trait Profile: Sync {
    fn eval(&self, x: f64) -> f64;
    /// Interval outside which the profile vanishes.
    fn support(&self) -> (f64, f64);
}

/// The annular `g` of [`tensor_g`].
pub struct AnnulusProfile;
/// The even bump `h` of [`tensor_h`].
pub struct BumpProfile;

impl Profile for AnnulusProfile {
    fn eval(&self, r: f64) -> f64 {
        tensor_g(r)
    }
    fn support(&self) -> (f64, f64) {
        (1.0, 4.0)
    }
}

impl Profile for BumpProfile {
    fn eval(&self, t: f64) -> f64 {
        tensor_h(t)
    }
    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
}

/// Gauss–Legendre nodes per unit length used by [`holo_growth_probe`].
pub const PROBE_NODES: usize = 400;

/// Evaluates `F((n+1)λ, λ) = ⟨g⊗h, Φ_{(n+1)λ,λ}⟩` and `ℱh(λ) = ∫ h(t) e^{−iλt} dt`
/// at each sample `λ`, both by Gauss–Legendre quadrature over the supports.
pub fn holo_growth_probe<G: Profile, H: Profile>(
    n: usize,
    g: &G,
    h: &H,
    lambda_samples: &[f64],
    ctl: &SeriesControl,
) -> Result<Vec<GrowthRow>> {
    let (r0, r1) = g.support();
    let (t0, t1) = h.support();
    let nr = (PROBE_NODES as f64 * (r1 - r0)).ceil() as usize;
    let nt = (PROBE_NODES as f64 * (t1 - t0)).ceil() as usize;
    let (rs, rw) = crate::quadrature::gauss_legendre(nr, r0, r1)?;
    let (ts, tw) = crate::quadrature::gauss_legendre(nt, t0, t1)?;
    let omega = crate::radial::sphere_area(n);
    lambda_samples
        .par_iter()
        .map(|&lambda| {
            let params = SphericalParams::real((n + 1) as f64 * lambda, lambda);
            let zero = Complex64::new(0.0, 0.0);
            let radial: Vec<Complex64> = rs
                .iter()
                .zip(&rw)
                .map(|(&r, &w)| {
                    let phi = spherical_function(params, r, zero, n, ctl)?;
                    Ok(phi * (g.eval(r) * omega * r.powi(2 * n as i32 - 1) * w))
                })
                .collect::<Result<_>>()?;
            let time_plus: Vec<Complex64> = ts
                .iter()
                .zip(&tw)
                .map(|(&t, &w)| Complex64::from_polar(h.eval(t) * w, lambda * t))
                .collect();
            let time_minus: Vec<Complex64> = time_plus.iter().map(|v| v.conj()).collect();
            let radial = crate::quadrature::pairwise_sum(&radial);
            let entire = radial * crate::quadrature::pairwise_sum(&time_plus);
            let fourier = crate::quadrature::pairwise_sum(&time_minus);
            let entire_abs = entire.norm();
            let fourier_h_abs = fourier.norm();
            if !entire_abs.is_finite() {
                return Err(Error::Overflow(format!("F at λ = {lambda}")));
            }
            Ok(GrowthRow {
                lambda,
                entire_abs,
                fourier_h_abs,
                ratio: entire_abs * (-0.5 * lambda).exp() / fourier_h_abs,
            })
        })
        .collect()
}

/// `f_U(r, t) = (e^{it} e^{−r²/4} / 2) Σ_{k≥1} (r²/2)ᵏ / (k (n)_k)`,
/// the inverse transform of `U = ∂_ξ δ_{(n,1)}` up to sign (`f_U = −∂_ξΦ` at `(n, 1)`).
pub fn dirac_derivative_field(n: usize, r: f64, t: f64, ctl: &SeriesControl) -> Result<Complex64> {
    let (sum, log_scale) = dirac_series(n, r, ctl)?;
    Ok(Complex64::from_polar(0.5 * sum * log_scale.exp(), t))
}

/// `Σ_k (x^k/(n)_k)/k · e^{−x/2}` with `x = r²/2`, as `(mantissa, log scale)`.
fn dirac_series(n: usize, r: f64, ctl: &SeriesControl) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    ctl.validate()?;
    let x = 0.5 * r * r;
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut log_scale = -0.5 * x;
    let mut prev = f64::INFINITY;
    let mut quiet = 0;
    for k in 1..ctl.max_terms {
        term *= x / (n + k - 1) as f64;
        let contrib = term / k as f64;
        sum += contrib;
        if term > 1e200 {
            term /= 1e200;
            sum /= 1e200;
            log_scale += 1e200f64.ln();
            prev = f64::INFINITY;
            quiet = 0;
            continue;
        }
        if contrib <= ctl.rel_tol * sum && contrib <= prev {
            quiet += 1;
            if quiet >= ctl.safeguard_terms.max(1) {
                return Ok((sum, log_scale));
            }
        } else {
            quiet = 0;
        }
        prev = contrib;
    }
    Err(Error::SeriesNonConvergence { terms: ctl.max_terms })
}

/// `|f_U(r, 0)| · 2(r²/2)ⁿ e^{−r²/4}`, which tends to 1 as `r → ∞`.
pub fn dirac_growth_ratio(n: usize, r: f64, ctl: &SeriesControl) -> Result<f64> {
    let x = 0.5 * r * r;
    let (sum, log_scale) = dirac_series(n, r, ctl)?;
    Ok(sum * (log_scale + n as f64 * x.ln() - 0.5 * x).exp())
}
