//! Special functions: ₁F₁, normalized Laguerre polynomials, the Bessel-type
//! series `𝒥_β` and the spherical functions `Φ_{ξ,λ}` with their ξ-derivative.
//!
//! Only `(ξ, λ, t)` are complexified; `|z| = r` stays real.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const RESCALE: f64 = 1e200;
const FAN_TOLERANCE: f64 = 1e-12;

/// Stopping rule for the power series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub safeguard_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-15,
            max_terms: 1_000_000,
            safeguard_terms: 3,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize, safeguard_terms: usize) -> Result<Self> {
        let ctl = Self {
            rel_tol,
            max_terms,
            safeguard_terms,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(Error::invalid("rel_tol", "must lie in (0, 1e-6]"));
        }
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be at least 1"));
        }
        Ok(())
    }
}

/// The eigenvalue pair: `LΦ = ξΦ`, `TΦ = iλΦ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalParams {
    pub xi: Complex64,
    pub lambda: Complex64,
}

impl SphericalParams {
    pub fn new(xi: Complex64, lambda: Complex64) -> Self {
        Self { xi, lambda }
    }

    pub fn real(xi: f64, lambda: f64) -> Self {
        Self::new(Complex64::new(xi, 0.0), Complex64::new(lambda, 0.0))
    }

    /// The point `ξ = |λ|(2j + n)` on ray `j`.
    pub fn fan(j: usize, lambda: f64, n: usize) -> Self {
        Self::real(lambda.abs() * (2 * j + n) as f64, lambda)
    }

    /// Ray index when `(ξ, λ)` lies on the fan with `λ ≠ 0`.
    pub fn fan_ray(&self, n: usize) -> Option<usize> {
        if self.xi.im != 0.0 || self.lambda.im != 0.0 || self.lambda.re == 0.0 {
            return None;
        }
        let j_real = 0.5 * (self.xi.re / self.lambda.re.abs() - n as f64);
        let j = j_real.round();
        if j >= 0.0 && (j_real - j).abs() <= FAN_TOLERANCE * j.max(1.0) {
            Some(j as usize)
        } else {
            None
        }
    }
}

pub fn pochhammer(a: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, d| acc * (a + d as f64))
}

/// Running sum of `term_0 = 1`, `term_k = next(k, term_{k−1})`, returned as
/// `(mantissa, log_scale)` with value `mantissa · e^{log_scale}`.
///
/// Terms are rescaled when they grow past `RESCALE`. A term that is exactly
/// zero ends the series, which is right for the product recurrences used here.
fn sum_series<F>(ctl: &SeriesControl, mut next: F) -> Result<(Complex64, f64)>
where
    F: FnMut(usize, Complex64) -> Complex64,
{
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut log_scale = 0.0;
    let mut quiet = 0;
    for k in 1..ctl.max_terms {
        let prev = term.norm();
        term = next(k, term);
        if term == Complex64::new(0.0, 0.0) {
            return Ok((sum, log_scale));
        }
        sum += term;
        let mag = term.norm();
        if !mag.is_finite() {
            return Err(Error::Overflow(format!("series term {k} is not finite")));
        }
        if mag > RESCALE {
            term /= RESCALE;
            sum /= RESCALE;
            log_scale += RESCALE.ln();
        }
        if mag <= ctl.rel_tol * sum.norm() * if mag > RESCALE { RESCALE } else { 1.0 }
            && mag <= prev
        {
            quiet += 1;
            if quiet >= ctl.safeguard_terms.max(1) {
                return Ok((sum, log_scale));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: ctl.max_terms,
    })
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Confluent hypergeometric `₁F₁(a; c; x) = Σ (a)_k/(c)_k · xᵏ/k!`.
///
/// For `Re x < 0` the Kummer transformation `e^x ₁F₁(c−a; c; −x)` is used so the
/// summed series has no cancellation; nonpositive integer `a` gives the
/// terminating polynomial directly.
pub fn kummer_1f1(a: Complex64, c: f64, x: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    ctl.validate()?;
    if is_nonpositive_integer(c) || !c.is_finite() {
        return Err(Error::invalid("c", "must not be a nonpositive integer"));
    }
    let polynomial = a.im == 0.0 && is_nonpositive_integer(a.re);
    if x.re < 0.0 && !polynomial {
        let (m, s) = hyper_series(c - a, c, -x, ctl)?;
        return Ok(m * (x + s).exp());
    }
    let (m, s) = hyper_series(a, c, x, ctl)?;
    Ok(m * s.exp())
}

/// The bare ₁F₁ series, no transformation.
pub fn kummer_series(a: Complex64, c: f64, x: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    ctl.validate()?;
    if is_nonpositive_integer(c) {
        return Err(Error::invalid("c", "must not be a nonpositive integer"));
    }
    let (m, s) = hyper_series(a, c, x, ctl)?;
    Ok(m * s.exp())
}

fn hyper_series(a: Complex64, c: f64, x: Complex64, ctl: &SeriesControl) -> Result<(Complex64, f64)> {
    sum_series(ctl, |k, prev| {
        let d = (k - 1) as f64;
        prev * (a + d) * x / ((c + d) * k as f64)
    })
}

/// `ℓ_j(x) = ₁F₁(−j; n; x)`, the Laguerre polynomial `L_j^{(n−1)}` normalized so `ℓ_j(0) = 1`.
pub fn normalized_laguerre(j: usize, n: usize, x: f64) -> f64 {
    let mut row = LaguerreRow::new(n, x, 0.0);
    for _ in 0..j {
        row.advance();
    }
    row.value()
}

/// All of `ℓ_0(x), …, ℓ_{j_max}(x)`.
pub fn normalized_laguerre_row(j_max: usize, n: usize, x: f64) -> Vec<f64> {
    let mut row = LaguerreRow::new(n, x, 0.0);
    let mut out = Vec::with_capacity(j_max + 1);
    out.push(row.value());
    for _ in 0..j_max {
        row.advance();
        out.push(row.value());
    }
    out
}

/// `e^{−x/2} ℓ_j(x)` for `j = 0..=j_max`; the exponential is carried in log
/// form so large `x` neither underflows the start value nor overflows `ℓ_j`.
pub fn laguerre_kernel_row(j_max: usize, n: usize, x: f64) -> Vec<f64> {
    let mut row = LaguerreRow::new(n, x, -0.5 * x);
    let mut out = Vec::with_capacity(j_max + 1);
    out.push(row.value());
    for _ in 0..j_max {
        row.advance();
        out.push(row.value());
    }
    out
}

/// Upward recurrence `(k+n) ℓ_{k+1} = (2k+n−x) ℓ_k − k ℓ_{k−1}`.
struct LaguerreRow {
    n: f64,
    x: f64,
    k: usize,
    prev: f64,
    cur: f64,
    log_scale: f64,
}

impl LaguerreRow {
    fn new(n: usize, x: f64, log_scale: f64) -> Self {
        Self {
            n: n as f64,
            x,
            k: 0,
            prev: 0.0,
            cur: 1.0,
            log_scale,
        }
    }

    fn advance(&mut self) {
        let k = self.k as f64;
        let next = ((2.0 * k + self.n - self.x) * self.cur - k * self.prev) / (k + self.n);
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        if self.cur.abs() > RESCALE {
            self.prev /= RESCALE;
            self.cur /= RESCALE;
            self.log_scale += RESCALE.ln();
        }
    }

    fn value(&self) -> f64 {
        if self.log_scale == 0.0 {
            self.cur
        } else {
            self.cur * self.log_scale.exp()
        }
    }
}

/// `𝒥_β(s) = Σ (−s)ᵏ / (k! (β+1)_k)`, so that `𝒥_β(s) = Γ(β+1) s^{−β/2} J_β(2√s)`.
pub fn normalized_bessel(beta: f64, s: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    ctl.validate()?;
    if is_nonpositive_integer(beta + 1.0) {
        return Err(Error::invalid("beta", "beta + 1 must not be a nonpositive integer"));
    }
    let (m, scale) = sum_series(ctl, |k, prev| {
        let k = k as f64;
        -prev * s / (k * (beta + k))
    })?;
    Ok(m * scale.exp())
}

fn check_args(r: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid("r", "must be finite and nonnegative"));
    }
    Ok(())
}

/// `Φ_{ξ,λ}(r, t)`, with `t` allowed complex.
///
/// Fan points with real `λ ≠ 0` use the Laguerre form, `λ = 0` the Bessel form
/// `𝒥_{n−1}(ξr²/4)`, everything else the entire power series.
pub fn spherical_function(
    params: SphericalParams,
    r: f64,
    t: Complex64,
    n: usize,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    check_args(r, n)?;
    if let Some(j) = params.fan_ray(n) {
        return spherical_function_fan(j, params.lambda.re, r, t, n);
    }
    if params.lambda == Complex64::new(0.0, 0.0) {
        return normalized_bessel((n - 1) as f64, params.xi * (0.25 * r * r), ctl);
    }
    spherical_function_series(params, r, t, n, ctl)
}

/// Laguerre form `e^{iλt} e^{−|λ|r²/4} ℓ_j(|λ|r²/2)` on ray `j`.
pub fn spherical_function_fan(j: usize, lambda: f64, r: f64, t: Complex64, n: usize) -> Result<Complex64> {
    check_args(r, n)?;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid("lambda", "fan rays need finite nonzero lambda"));
    }
    let x = 0.5 * lambda.abs() * r * r;
    let radial = *laguerre_kernel_row(j, n, x).last().unwrap();
    Ok(phase(Complex64::new(lambda, 0.0), t) * radial)
}

/// The entire series
/// `e^{iλt} e^{−λr²/4} Σ_k r^{2k}/((n)_k k! 4ᵏ) Π_{d<k}(λ(2d+n) − ξ)`.
///
/// `Φ(r, 0)` is even in `λ` (Kummer), so the radial part is summed with
/// `Re λ ≥ 0`, where the exponential prefactor does not cancel against the sum.
pub fn spherical_function_series(
    params: SphericalParams,
    r: f64,
    t: Complex64,
    n: usize,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    check_args(r, n)?;
    ctl.validate()?;
    let SphericalParams { xi, lambda } = params;
    let lam = if lambda.re < 0.0 { -lambda } else { lambda };
    let nf = n as f64;
    let r2 = r * r;
    let (m, scale) = sum_series(ctl, |k, prev| {
        let kf = k as f64;
        prev * (lam * (2.0 * (kf - 1.0) + nf) - xi) * r2 / (4.0 * kf * (nf + kf - 1.0))
    })?;
    Ok(phase(lambda, t) * m * (scale - lam * (0.25 * r2)).exp())
}

fn phase(lambda: Complex64, t: Complex64) -> Complex64 {
    (Complex64::new(0.0, 1.0) * lambda * t).exp()
}

/// `∂Φ_{ξ,λ}/∂ξ (r, t)` by differentiating the product factors of the series term by term.
pub fn spherical_function_dxi(
    params: SphericalParams,
    r: f64,
    t: f64,
    n: usize,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    check_args(r, n)?;
    ctl.validate()?;
    let SphericalParams { xi, lambda } = params;
    let lam = if lambda.re < 0.0 { -lambda } else { lambda };
    let nf = n as f64;
    let r2 = r * r;
    let zero = Complex64::new(0.0, 0.0);
    // a: series terms, b: their ξ-derivatives
    let (mut a, mut b) = (Complex64::new(1.0, 0.0), zero);
    let (mut sum_a, mut sum_b) = (a, b);
    let mut log_scale = 0.0;
    let mut quiet = 0;
    let mut converged = false;
    for k in 1..ctl.max_terms {
        let kf = k as f64;
        let q = r2 / (4.0 * kf * (nf + kf - 1.0));
        let factor = lam * (2.0 * (kf - 1.0) + nf) - xi;
        let prev = a.norm() + b.norm();
        let next_b = b * factor * q - a * q;
        a = a * factor * q;
        b = next_b;
        sum_a += a;
        sum_b += b;
        let mag = a.norm() + b.norm();
        if mag == 0.0 {
            converged = true;
            break;
        }
        if !mag.is_finite() {
            return Err(Error::Overflow(format!("series term {k} is not finite")));
        }
        let mut scale = 1.0;
        if mag > RESCALE {
            a /= RESCALE;
            b /= RESCALE;
            sum_a /= RESCALE;
            sum_b /= RESCALE;
            log_scale += RESCALE.ln();
            scale = RESCALE;
        }
        if mag <= ctl.rel_tol * (sum_a.norm() + sum_b.norm()) * scale && mag <= prev {
            quiet += 1;
            if quiet >= ctl.safeguard_terms.max(1) {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if !converged {
        return Err(Error::SeriesNonConvergence {
            terms: ctl.max_terms,
        });
    }
    let pref = phase(lambda, Complex64::new(t, 0.0)) * (log_scale - lam * (0.25 * r2)).exp();
    Ok(pref * sum_b)
}
