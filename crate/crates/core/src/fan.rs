//! The Heisenberg fan `ξ = |λ|(2j + n)`, its Plancherel measure and the
//! difference-differential operators `M±`.
//!
//! A [`FanGrid`] holds rays `j = 0..=j_max` and a uniform grid of positive
//! `λ` nodes, mirrored to `λ < 0`. The half-line `λ = 0` has zero Plancherel
//! measure and is not sampled.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{csum, trapezoid_weights};
use crate::radial::{check_norm_params, lp_from_samples};

/// Half-width of the centered λ-stencil used by `M±`.
pub const STENCIL_HALF_WIDTH: usize = 2;

const UNIFORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Positive, Sign::Negative];

    pub fn factor(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Sign::Positive => 0,
            Sign::Negative => 1,
        }
    }

    pub fn from_factor(f: i64) -> Result<Sign> {
        match f {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            _ => Err(Error::Parse(format!("sign must be 1 or -1, got {f}"))),
        }
    }
}

/// `ξ = |λ|(2j + n)`.
pub fn xi_of(j: usize, lambda: f64, n: usize) -> f64 {
    lambda.abs() * (2 * j + n) as f64
}

/// `binom(j + n − 1, j)`, exact in integers.
pub fn ray_multiplicity(j: usize, n: usize) -> Result<f64> {
    let mut b: u128 = 1;
    for k in 1..n as u128 {
        b = b
            .checked_mul(j as u128 + k)
            .ok_or_else(|| Error::Overflow(format!("binomial multiplicity for j={j}, n={n}")))?
            / k;
    }
    Ok(b as f64)
}

/// Weight rule of an equispaced λ grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    /// Halved weights at both ends.
    Trapezoid,
    /// Weight `h` at every node.
    Rectangle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanGrid {
    n: usize,
    j_max: usize,
    lambda_nodes: Vec<f64>,
    lambda_weights: Vec<f64>,
    spacing: f64,
    uniform_spacing: bool,
    // (2π)^{−(n+1)} binom(j+n−1, j) λⁿ w_λ, indexed [j][i_λ]; the same for both signs
    plancherel: Vec<f64>,
}

impl FanGrid {
    /// `count` equispaced nodes on `[lambda_min, lambda_max]` with trapezoid weights.
    pub fn uniform(n: usize, j_max: usize, lambda_min: f64, lambda_max: f64, count: usize) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_min.is_finite()) {
            return Err(Error::invalid("lambda_min", "must be positive"));
        }
        if !(lambda_max > lambda_min && lambda_max.is_finite()) {
            return Err(Error::invalid("lambda_max", "must exceed lambda_min"));
        }
        if count < 2 {
            return Err(Error::invalid("lambda_count", "need at least two nodes"));
        }
        let h = (lambda_max - lambda_min) / (count - 1) as f64;
        let nodes = (0..count).map(|i| lambda_min + i as f64 * h).collect();
        Self::from_nodes(n, j_max, nodes, trapezoid_weights(count, h))
    }

    /// Equispaced nodes on `[lambda_min, lambda_max]` with the given weight rule.
    pub fn equispaced(
        n: usize,
        j_max: usize,
        lambda_min: f64,
        lambda_max: f64,
        count: usize,
        rule: LambdaRule,
    ) -> Result<Self> {
        match rule {
            LambdaRule::Trapezoid => Self::uniform(n, j_max, lambda_min, lambda_max, count),
            LambdaRule::Rectangle => {
                let mut g = Self::uniform(n, j_max, lambda_min, lambda_max, count)?;
                let h = g.spacing;
                g = Self::from_nodes(n, j_max, g.lambda_nodes, vec![h; count])?;
                Ok(g)
            }
        }
    }

    /// Nodes `h, 2h, …, count·h` with the rectangle weight `h` at every node.
    ///
    /// With a radial grid on `|t| ≤ π/h` the inverse transform of any fan
    /// function is `2π/h`-periodic in `t`, and the forward transform of it
    /// returns the samples exactly up to quadrature error.
    pub fn lattice(n: usize, j_max: usize, h: f64, count: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid("lambda_spacing", "must be positive"));
        }
        if count < 2 {
            return Err(Error::invalid("lambda_count", "need at least two nodes"));
        }
        let nodes = (1..=count).map(|k| k as f64 * h).collect();
        Self::from_nodes(n, j_max, nodes, vec![h; count])
    }

    /// Grid with explicit nodes; anything but equispaced nodes is rejected.
    pub fn from_nodes(n: usize, j_max: usize, lambda_nodes: Vec<f64>, lambda_weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        if lambda_nodes.len() < 2 || lambda_nodes.len() != lambda_weights.len() {
            return Err(Error::invalid("lambda_nodes", "need at least two nodes, one weight each"));
        }
        if !(lambda_nodes[0] > 0.0) {
            return Err(Error::invalid("lambda_min", "must be positive"));
        }
        if lambda_weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("lambda_weights", "must be strictly positive"));
        }
        let count = lambda_nodes.len();
        let spacing = (lambda_nodes[count - 1] - lambda_nodes[0]) / (count - 1) as f64;
        let uniform_spacing = lambda_nodes.windows(2).all(|p| {
            let gap = p[1] - p[0];
            gap > 0.0 && (gap - spacing).abs() <= UNIFORM_TOLERANCE * spacing
        });
        if !uniform_spacing {
            return Err(Error::invalid("lambda_nodes", "must be equispaced and increasing"));
        }
        let norm = (2.0 * PI).powi(-(n as i32 + 1));
        let mut plancherel = Vec::with_capacity((j_max + 1) * count);
        for j in 0..=j_max {
            let b = ray_multiplicity(j, n)?;
            for (lam, w) in lambda_nodes.iter().zip(&lambda_weights) {
                plancherel.push(norm * b * lam.powi(n as i32) * w);
            }
        }
        Ok(Self {
            n,
            j_max,
            lambda_nodes,
            lambda_weights,
            spacing,
            uniform_spacing,
            plancherel,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn j_max(&self) -> usize {
        self.j_max
    }
    pub fn lambda_nodes(&self) -> &[f64] {
        &self.lambda_nodes
    }
    pub fn lambda_weights(&self) -> &[f64] {
        &self.lambda_weights
    }
    pub fn lambda_count(&self) -> usize {
        self.lambda_nodes.len()
    }
    pub fn lambda_min(&self) -> f64 {
        self.lambda_nodes[0]
    }
    pub fn lambda_max(&self) -> f64 {
        *self.lambda_nodes.last().unwrap()
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    /// The weight rule, read off the end weights.
    pub fn rule(&self) -> LambdaRule {
        if self.lambda_weights[0] < 0.75 * self.spacing {
            LambdaRule::Trapezoid
        } else {
            LambdaRule::Rectangle
        }
    }

    pub fn uniform_spacing(&self) -> bool {
        self.uniform_spacing
    }
    pub fn ray_count(&self) -> usize {
        self.j_max + 1
    }
    pub fn len(&self) -> usize {
        2 * self.ray_count() * self.lambda_count()
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed `λ` at node `i`.
    pub fn lambda(&self, sign: Sign, i: usize) -> f64 {
        sign.factor() * self.lambda_nodes[i]
    }

    pub fn xi(&self, j: usize, i: usize) -> f64 {
        xi_of(j, self.lambda_nodes[i], self.n)
    }

    pub fn plancherel_weight(&self, j: usize, i: usize) -> f64 {
        self.plancherel[j * self.lambda_count() + i]
    }

    #[inline]
    pub fn index(&self, sign: Sign, j: usize, i: usize) -> usize {
        (sign.index() * self.ray_count() + j) * self.lambda_count() + i
    }

    /// Inverse of [`FanGrid::index`].
    pub fn node(&self, idx: usize) -> (Sign, usize, usize) {
        let l = self.lambda_count();
        let i = idx % l;
        let row = idx / l;
        let sign = if row / self.ray_count() == 0 {
            Sign::Positive
        } else {
            Sign::Negative
        };
        (sign, row % self.ray_count(), i)
    }
}

/// Complex samples on a [`FanGrid`]; rays above `valid_j` and the first and last
/// `valid_lambda_margin` λ-nodes of each ray are not trustworthy.
#[derive(Debug, Clone)]
pub struct FanFunction {
    grid: Arc<FanGrid>,
    values: Vec<Complex64>,
    valid_j: usize,
    valid_lambda_margin: usize,
}

impl FanFunction {
    pub fn zeros(grid: Arc<FanGrid>) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            valid_j: grid.j_max,
            valid_lambda_margin: 0,
            grid,
        }
    }

    /// Samples `f(j, signed λ, ξ)` at every node.
    pub fn from_fn<F>(grid: Arc<FanGrid>, f: F) -> Result<Self>
    where
        F: Fn(usize, f64, f64) -> Complex64 + Sync,
    {
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (sign, j, i) = grid.node(idx);
                f(j, grid.lambda(sign, i), grid.xi(j, i))
            })
            .collect();
        let valid_j = grid.j_max;
        Self::with_window(grid, values, valid_j, 0)
    }

    pub fn with_window(
        grid: Arc<FanGrid>,
        values: Vec<Complex64>,
        valid_j: usize,
        valid_lambda_margin: usize,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if valid_j > grid.j_max {
            return Err(Error::invalid("valid_j", "exceeds j_max"));
        }
        if 2 * valid_lambda_margin >= grid.lambda_count() {
            return Err(Error::invalid("valid_lambda_margin", "leaves no λ nodes"));
        }
        let out = Self {
            grid,
            values,
            valid_j,
            valid_lambda_margin,
        };
        if out.window_indices().any(|idx| {
            let v = out.values[idx];
            !(v.re.is_finite() && v.im.is_finite())
        }) {
            return Err(Error::invalid("values", "non-finite sample inside the valid window"));
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Arc<FanGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn valid_j(&self) -> usize {
        self.valid_j
    }
    pub fn valid_lambda_margin(&self) -> usize {
        self.valid_lambda_margin
    }

    pub fn get(&self, sign: Sign, j: usize, i: usize) -> Complex64 {
        self.values[self.grid.index(sign, j, i)]
    }

    pub fn is_valid(&self, j: usize, i: usize) -> bool {
        j <= self.valid_j
            && i >= self.valid_lambda_margin
            && i + self.valid_lambda_margin < self.grid.lambda_count()
    }

    fn window_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.valid_lambda_margin;
        let l = self.grid.lambda_count();
        Sign::BOTH.into_iter().flat_map(move |s| {
            (0..=self.valid_j).flat_map(move |j| (m..l - m).map(move |i| self.grid.index(s, j, i)))
        })
    }

    fn same_grid(&self, other: &FanFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch("fan functions live on different grids".into()))
        }
    }

    /// `∫_Σ F dμ` over the valid window.
    pub fn plancherel_integral(&self) -> Complex64 {
        let terms: Vec<Complex64> = self
            .window_indices()
            .map(|idx| {
                let (_, j, i) = self.grid.node(idx);
                self.values[idx] * self.grid.plancherel_weight(j, i)
            })
            .collect();
        csum(&terms)
    }

    /// `‖(1 + ξ)^{−β} F‖_{Lᵖ(μ)}` over the valid window.
    pub fn lp_norm(&self, p: f64, beta: f64) -> Result<f64> {
        check_norm_params(p, beta)?;
        let samples: Vec<(f64, f64)> = self
            .window_indices()
            .map(|idx| {
                let (_, j, i) = self.grid.node(idx);
                let damp = if beta == 0.0 {
                    1.0
                } else {
                    (1.0 + self.grid.xi(j, i)).powf(-beta)
                };
                (self.values[idx].norm() * damp, self.grid.plancherel_weight(j, i))
            })
            .collect();
        Ok(lp_from_samples(&samples, p))
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0, 0.0).expect("valid parameters")
    }

    pub fn max_abs(&self) -> f64 {
        self.window_indices()
            .map(|idx| self.values[idx].norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> FanFunction {
        self.map(|_, _, _, v| v * c)
    }

    /// Pointwise map `(sign, j, i, value) ↦ value'`, same window.
    pub fn map<F>(&self, f: F) -> FanFunction
    where
        F: Fn(Sign, usize, usize, Complex64) -> Complex64,
    {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| {
                let (s, j, i) = self.grid.node(idx);
                f(s, j, i, v)
            })
            .collect();
        FanFunction {
            grid: self.grid.clone(),
            values,
            valid_j: self.valid_j,
            valid_lambda_margin: self.valid_lambda_margin,
        }
    }

    /// Pointwise combination over the intersection of both windows.
    pub fn zip_with<F>(&self, other: &FanFunction, f: F) -> Result<FanFunction>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(FanFunction {
            grid: self.grid.clone(),
            values,
            valid_j: self.valid_j.min(other.valid_j),
            valid_lambda_margin: self.valid_lambda_margin.max(other.valid_lambda_margin),
        })
    }

    pub fn sub(&self, other: &FanFunction) -> Result<FanFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    /// The same samples with a smaller valid window.
    pub fn restrict(&self, valid_j: usize, valid_lambda_margin: usize) -> Result<FanFunction> {
        FanFunction::with_window(
            self.grid.clone(),
            self.values.clone(),
            valid_j.min(self.valid_j),
            valid_lambda_margin.max(self.valid_lambda_margin),
        )
    }

    /// `‖self − reference‖₂ / ‖reference‖₂` in `L²(μ)` on the common window.
    pub fn relative_l2_error(&self, reference: &FanFunction) -> Result<f64> {
        let diff = self.sub(reference)?;
        let reference = reference.restrict(diff.valid_j, diff.valid_lambda_margin)?;
        let denom = reference.l2_norm();
        if denom == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(diff.l2_norm() / denom)
    }

    /// Pointwise product with `ξ^power`.
    pub fn multiply_by_xi(&self, power: u32) -> FanFunction {
        let grid = self.grid.clone();
        self.map(move |_, j, i, v| v * grid.xi(j, i).powi(power as i32))
    }

    /// `M₊F`: on ray `j`,
    /// `g_j′ − ((j+n)/λ)(g_{j+1} − g_j)` for `λ > 0` and
    /// `g_j′ − (j/|λ|)(g_{j−1} − g_j)` for `λ < 0`.
    pub fn m_plus_apply(&self) -> Result<FanFunction> {
        self.fan_operator(true)
    }

    /// `M₋F`: on ray `j`,
    /// `g_j′ + (j/λ)(g_{j−1} − g_j)` for `λ > 0` and
    /// `g_j′ + ((j+n)/|λ|)(g_{j+1} − g_j)` for `λ < 0`.
    pub fn m_minus_apply(&self) -> Result<FanFunction> {
        self.fan_operator(false)
    }

    fn fan_operator(&self, plus: bool) -> Result<FanFunction> {
        let grid = &self.grid;
        if !grid.uniform_spacing {
            return Err(Error::invalid("lambda_nodes", "M± needs a uniform λ grid"));
        }
        if self.valid_j == 0 {
            return Err(Error::WindowExhausted("no ray left for the ray difference".into()));
        }
        let margin = self.valid_lambda_margin + STENCIL_HALF_WIDTH;
        let l = grid.lambda_count();
        if 2 * margin >= l {
            return Err(Error::WindowExhausted(format!(
                "λ margin {margin} leaves no nodes out of {l}"
            )));
        }
        let valid_j = self.valid_j - 1;
        let n = grid.n as f64;
        let h = grid.spacing;
        let zero = Complex64::new(0.0, 0.0);
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (sign, j, i) = grid.node(idx);
                if j > valid_j || i < margin || i + margin >= l {
                    return zero;
                }
                let g = |jj: usize, ii: usize| self.values[grid.index(sign, jj, ii)];
                // derivative in the signed λ: node index runs against λ when λ < 0
                let d_nodes = (g(j, i - 2) - g(j, i - 1) * 8.0 + g(j, i + 1) * 8.0 - g(j, i + 2)) / (12.0 * h);
                let d = d_nodes * sign.factor();
                let lam = grid.lambda_nodes[i];
                let jf = j as f64;
                let here = g(j, i);
                let up = || g(j + 1, i) - here;
                let down = || if j == 0 { zero } else { g(j - 1, i) - here };
                match (plus, sign) {
                    (true, Sign::Positive) => d - up() * ((jf + n) / lam),
                    (true, Sign::Negative) => d - down() * (jf / lam),
                    (false, Sign::Positive) => d + down() * (jf / lam),
                    (false, Sign::Negative) => d + up() * ((jf + n) / lam),
                }
            })
            .collect();
        FanFunction::with_window(self.grid.clone(), values, valid_j, margin)
    }

    /// Applies `M₊` `k` times.
    pub fn m_plus_power(&self, k: usize) -> Result<FanFunction> {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.m_plus_apply()?;
        }
        Ok(out)
    }
}

/// `|∫(M₊φ)ψ dμ + ∫φ(M₋ψ) dμ|`; vanishes in the continuum.
pub fn transpose_defect(phi: &FanFunction, psi: &FanFunction) -> Result<f64> {
    phi.same_grid(psi)?;
    let a = phi.m_plus_apply()?.zip_with(psi, |x, y| x * y)?.plancherel_integral();
    let b = psi.m_minus_apply()?.zip_with(phi, |x, y| x * y)?.plancherel_integral();
    Ok((a + b).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn grid(n: usize, j_max: usize, lo: f64, hi: f64, count: usize) -> Arc<FanGrid> {
        Arc::new(FanGrid::uniform(n, j_max, lo, hi, count).unwrap())
    }

    fn bump(lambda: f64, a: f64, b: f64) -> f64 {
        if lambda <= a || lambda >= b {
            0.0
        } else {
            let s = (lambda - a) * (b - lambda);
            s.powi(6)
        }
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi_of(0, 1.0, 1), 1.0);
        assert_eq!(xi_of(2, -1.0, 1), 5.0);
        for j in 0..5 {
            assert!(xi_of(j, -0.3, 3) >= 3.0 * 0.3);
        }
    }

    #[test]
    fn multiplicities() {
        assert_eq!(ray_multiplicity(7, 1).unwrap(), 1.0);
        assert_eq!(ray_multiplicity(7, 2).unwrap(), 8.0);
        assert_eq!(ray_multiplicity(3, 3).unwrap(), 10.0);
        assert_eq!(ray_multiplicity(0, 5).unwrap(), 1.0);
    }

    #[test]
    fn grid_construction() {
        let g = grid(2, 3, 0.5, 2.5, 9);
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.len(), 2 * 4 * 9);
        let w = g.plancherel_weight(2, 4);
        let expect = (2.0 * PI).powi(-3) * 3.0 * 1.5f64.powi(2) * 0.25;
        assert!((w - expect).abs() < 1e-15 * expect);
        for idx in 0..g.len() {
            let (s, j, i) = g.node(idx);
            assert_eq!(g.index(s, j, i), idx);
        }
        assert!(FanGrid::uniform(1, 3, 0.0, 1.0, 5).is_err());
        assert!(FanGrid::uniform(1, 3, 1.0, 1.0, 5).is_err());
        assert!(FanGrid::from_nodes(1, 2, vec![0.5, 1.0, 2.0], vec![1.0; 3]).is_err());
    }

    #[test]
    fn plancherel_integral_of_single_ray() {
        let g = grid(1, 4, 0.5, 2.5, 401);
        let f = FanFunction::from_fn(g.clone(), |j, lam, _| {
            if j == 0 && lam > 0.0 { c(bump(lam, 1.0, 2.0)) } else { c(0.0) }
        })
        .unwrap();
        // (2π)^{−2} ∫₁² ψ(λ) λ dλ by a fine Simpson rule
        let m = 20000;
        let mut s = 0.0;
        for k in 0..=m {
            let lam = 1.0 + k as f64 / m as f64;
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * bump(lam, 1.0, 2.0) * lam;
        }
        let oracle = s / (3.0 * m as f64) / (4.0 * PI * PI);
        let got = f.plancherel_integral();
        assert!((got.re - oracle).abs() < 1e-10 * oracle);
        assert_eq!(FanFunction::zeros(g).plancherel_integral(), c(0.0));
    }

    #[test]
    fn integrability_bound_converges() {
        // ∫(1+ξ)^{−(n+2)} dμ: partial sums over growing windows approach a finite limit
        let mass = |j_max: usize, hi: f64| {
            let g = grid(1, j_max, 1e-3, hi, 4001);
            FanFunction::from_fn(g, |_, _, xi| c((1.0 + xi).powi(-3)))
                .unwrap()
                .plancherel_integral()
                .re
        };
        // closed form for n = 1: 2(2π)^{−2} Σ_j 1/(2(2j+1)²) = 1/32
        let exact = 1.0 / 32.0;
        let a = mass(50, 50.0);
        let b = mass(200, 200.0);
        assert!(a < b && b < exact);
        assert!(exact - b < 0.02 * exact, "{a} {b}");
    }

    #[test]
    fn norms() {
        let g = grid(2, 3, 0.5, 2.5, 21);
        assert_eq!(FanFunction::zeros(g.clone()).lp_norm(2.0, 1.0).unwrap(), 0.0);
        let k = FanFunction::from_fn(g.clone(), |_, _, _| Complex64::new(0.0, -3.0)).unwrap();
        assert!((k.lp_norm(f64::INFINITY, 0.0).unwrap() - 3.0).abs() < 1e-15);
        let f = FanFunction::from_fn(g.clone(), |j, lam, xi| Complex64::new(xi.sin(), lam * j as f64)).unwrap();
        let beta = 0.7;
        let sq = f
            .map(|_, j, i, v| c(v.norm_sqr() * (1.0 + g.xi(j, i)).powf(-2.0 * beta)))
            .plancherel_integral()
            .re;
        assert!((f.lp_norm(2.0, beta).unwrap().powi(2) - sq).abs() < 1e-13 * sq);
        assert!(f.lp_norm(0.5, 0.0).is_err());
    }

    #[test]
    fn multiply_by_xi_scales_rays() {
        let g = grid(1, 3, 0.5, 1.5, 5);
        let f = FanFunction::from_fn(g.clone(), |_, _, _| c(2.0)).unwrap();
        assert_eq!(f.multiply_by_xi(0).values(), f.values());
        let x = f.multiply_by_xi(1);
        assert_eq!(x.get(Sign::Negative, 2, 3), c(2.0 * g.lambda_nodes()[3] * 5.0));
        // ‖ξʲF‖∞^{1/j} tends to max ξ on the support
        let h = FanFunction::from_fn(g.clone(), |j, _, _| c(if j <= 1 { 1.0 } else { 0.0 })).unwrap();
        let j = 200;
        let root = h.multiply_by_xi(j).max_abs().powf(1.0 / j as f64);
        assert!((root - 1.5 * 3.0).abs() < 1e-12);
    }

    #[test]
    fn m_operators_on_polynomials() {
        let g = grid(2, 6, 0.5, 3.0, 41);
        let one = FanFunction::from_fn(g.clone(), |_, _, _| c(1.0)).unwrap();
        assert!(one.m_plus_apply().unwrap().max_abs() < 1e-12);
        assert!(one.m_minus_apply().unwrap().max_abs() < 1e-12);
        let xi = FanFunction::from_fn(g.clone(), |_, _, xi| c(xi)).unwrap();
        let mp = xi.m_plus_apply().unwrap();
        let mm = xi.m_minus_apply().unwrap();
        for s in Sign::BOTH {
            for j in 0..=mp.valid_j() {
                for i in 2..39 {
                    assert!((mp.get(s, j, i) - c(-2.0)).norm() < 1e-12);
                    assert!((mm.get(s, j, i) - c(2.0)).norm() < 1e-12);
                }
            }
        }
        assert_eq!(mp.valid_j(), 5);
        assert_eq!(mp.valid_lambda_margin(), 2);
    }

    // The continuous form M₊ = ∂_λ − n∂_ξ + … acting on F(ξ, λ): on the fan the
    // ray difference of a polynomial in ξ is an exact divided difference.
    #[test]
    fn m_plus_on_cubic_matches_continuous_form() {
        let n = 1usize;
        let g = grid(n, 5, 0.5, 2.0, 31);
        // F = ξ λ², exact on-fan formula re-derived by hand:
        // λ>0: ∂_λ(λ³(2j+n)) − ((j+n)/λ)·2λ·λ² = 3λ²(2j+n) − 2(j+n)λ²
        let f = FanFunction::from_fn(g.clone(), |_, lam, xi| c(xi * lam * lam)).unwrap();
        let mp = f.m_plus_apply().unwrap();
        for j in 0..=mp.valid_j() {
            for i in 2..29 {
                let lam = g.lambda_nodes()[i];
                let jf = j as f64;
                let nf = n as f64;
                let pos = 3.0 * lam * lam * (2.0 * jf + nf) - 2.0 * (jf + nf) * lam * lam;
                assert!((mp.get(Sign::Positive, j, i).re - pos).abs() < 1e-11);
                // λ<0: g_j = |λ|³(2j+n)... with signed λ: g = −λ³(2j+n)
                let neg = -3.0 * lam * lam * (2.0 * jf + nf) + 2.0 * jf * lam * lam;
                assert!((mp.get(Sign::Negative, j, i).re - neg).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn window_bookkeeping() {
        let g = grid(1, 3, 0.5, 3.0, 11);
        let f = FanFunction::from_fn(g, |_, _, _| c(1.0)).unwrap();
        let f2 = f.m_plus_power(2).unwrap();
        assert_eq!((f2.valid_j(), f2.valid_lambda_margin()), (1, 4));
        assert!(matches!(f.m_plus_power(3), Err(Error::WindowExhausted(_))));
        assert!(matches!(f2.m_plus_power(2), Err(Error::WindowExhausted(_))));
    }

    fn smooth_profile(j: usize, lam: f64, shift: f64) -> Complex64 {
        let a = 1.0 + shift;
        let b = 2.5 + shift;
        Complex64::new(bump(lam.abs(), a, b), 0.3 * bump(lam.abs(), a, b)) * (1.0 / (1 + j) as f64)
            * if lam < 0.0 { 0.5 } else { 1.0 }
    }

    #[test]
    fn transpose_identity_fourth_order() {
        let defect = |count: usize| {
            let g = grid(1, 8, 0.25, 4.0, count);
            let phi = FanFunction::from_fn(g.clone(), |j, lam, _| {
                if j <= 4 { smooth_profile(j, lam, 0.0) } else { c(0.0) }
            })
            .unwrap();
            let psi = FanFunction::from_fn(g.clone(), |j, lam, _| {
                if j <= 4 { smooth_profile(j + 1, lam, 0.2) } else { c(0.0) }
            })
            .unwrap();
            assert_eq!(transpose_defect(&FanFunction::zeros(g), &psi).unwrap(), 0.0);
            transpose_defect(&phi, &psi).unwrap()
        };
        let coarse = defect(151);
        let fine = defect(301);
        assert!(coarse < 1e-5, "{coarse}");
        assert!(coarse / fine > 12.0, "{coarse} {fine}");
    }
}
