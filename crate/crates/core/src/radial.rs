//! Radial functions on `Hₙ` sampled on an `(r, t)` quadrature grid.
//!
//! A [`RadialGrid`] is a tensor Gauss–Legendre rule with `r ∈ (0, r_max)` and
//! `t ∈ (−t_max, t_max)`. The Haar weight of node `(i, k)` is
//! `ω · r_i^{2n−1} · w_i · w_k`, with `ω = 2πⁿ/(n−1)!` the area of the unit
//! sphere in `R^{2n}`. Differential operators use five-point stencils and
//! shrink the [`Window`] of trustworthy nodes instead of using one-sided
//! formulas at the edges.

use std::f64::consts::PI;
use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::koranyi_from_parts;
use crate::quadrature::{csum, fd_weights, gauss_legendre, pairwise_sum};

/// Default relative threshold for support detection.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-12;

const STENCIL_HALF_WIDTH: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n: usize,
    r_max: f64,
    t_max: f64,
    r_nodes: Vec<f64>,
    r_weights: Vec<f64>,
    t_nodes: Vec<f64>,
    t_weights: Vec<f64>,
    haar_weights: Vec<f64>,
}

/// Surface area of the unit sphere in `R^{2n}`.
pub fn sphere_area(n: usize) -> f64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    2.0 * PI.powi(n as i32) / fact
}

impl RadialGrid {
    /// Tensor Gauss–Legendre grid on `[0, r_max] × [−t_max, t_max]`.
    pub fn gauss_legendre(
        n: usize,
        r_max: f64,
        r_count: usize,
        t_max: f64,
        t_count: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::invalid("r_max", "must be positive"));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::invalid("t_max", "must be positive"));
        }
        if r_count == 0 {
            return Err(Error::invalid("r_count", "must be positive"));
        }
        if t_count == 0 {
            return Err(Error::invalid("t_count", "must be positive"));
        }
        let (r_nodes, r_weights) = gauss_legendre(r_count, 0.0, r_max)?;
        let (t_nodes, t_weights) = gauss_legendre(t_count, -t_max, t_max)?;
        let mut grid = Self::from_nodes(n, r_nodes, r_weights, t_nodes, t_weights)?;
        grid.r_max = r_max;
        grid.t_max = t_max;
        Ok(grid)
    }

    /// Builds a grid from explicit rules, checking the ordering and positivity invariants.
    pub fn from_nodes(
        n: usize,
        r_nodes: Vec<f64>,
        r_weights: Vec<f64>,
        t_nodes: Vec<f64>,
        t_weights: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        if r_nodes.is_empty() || r_nodes.len() != r_weights.len() {
            return Err(Error::invalid("r_nodes", "empty or length differs from weights"));
        }
        if t_nodes.is_empty() || t_nodes.len() != t_weights.len() {
            return Err(Error::invalid("t_nodes", "empty or length differs from weights"));
        }
        if !(r_nodes[0] > 0.0) || !strictly_increasing(&r_nodes) {
            return Err(Error::invalid("r_nodes", "must be positive and strictly increasing"));
        }
        if !strictly_increasing(&t_nodes) {
            return Err(Error::invalid("t_nodes", "must be strictly increasing"));
        }
        if r_weights.iter().chain(&t_weights).any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("weights", "must be strictly positive"));
        }
        let omega = sphere_area(n);
        let haar_weights = r_nodes
            .iter()
            .zip(&r_weights)
            .flat_map(|(&r, &wr)| {
                let radial = omega * r.powi(2 * n as i32 - 1) * wr;
                t_weights.iter().map(move |&wt| radial * wt)
            })
            .collect();
        let r_max = *r_nodes.last().unwrap();
        let t_max = t_nodes[0].abs().max(t_nodes.last().unwrap().abs());
        Ok(Self {
            n,
            r_max,
            t_max,
            r_nodes,
            r_weights,
            t_nodes,
            t_weights,
            haar_weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    /// End of the `r` interval (the outermost node for explicit rules).
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }
    pub fn r_weights(&self) -> &[f64] {
        &self.r_weights
    }
    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }
    pub fn t_weights(&self) -> &[f64] {
        &self.t_weights
    }
    pub fn haar_weights(&self) -> &[f64] {
        &self.haar_weights
    }
    pub fn r_count(&self) -> usize {
        self.r_nodes.len()
    }
    pub fn t_count(&self) -> usize {
        self.t_nodes.len()
    }
    pub fn len(&self) -> usize {
        self.haar_weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.haar_weights.is_empty()
    }

    #[inline]
    pub fn index(&self, i_r: usize, i_t: usize) -> usize {
        i_r * self.t_nodes.len() + i_t
    }

    pub fn haar_weight(&self, i_r: usize, i_t: usize) -> f64 {
        self.haar_weights[self.index(i_r, i_t)]
    }

    pub fn full_window(&self) -> Window {
        Window {
            r: 0..self.r_count(),
            t: 0..self.t_count(),
        }
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|p| p[0] < p[1])
}

/// Index ranges of nodes whose values are trustworthy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub r: Range<usize>,
    pub t: Range<usize>,
}

impl Window {
    pub fn contains(&self, i_r: usize, i_t: usize) -> bool {
        self.r.contains(&i_r) && self.t.contains(&i_t)
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty() || self.t.is_empty()
    }

    fn shrink(&self, dr: usize, dt: usize) -> Window {
        Window {
            r: (self.r.start + dr)..self.r.end.saturating_sub(dr).max(self.r.start + dr),
            t: (self.t.start + dt)..self.t.end.saturating_sub(dt).max(self.t.start + dt),
        }
    }
}

/// Result of [`RadialFunction::support_radius`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportReport {
    pub koranyi_radius: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    window: Window,
}

impl RadialFunction {
    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let window = grid.full_window();
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
            window,
        }
    }

    /// Samples `f(r, t)` at every node.
    pub fn from_fn<F>(grid: Arc<RadialGrid>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64 + Sync,
    {
        let nt = grid.t_count();
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.r_nodes[idx / nt], grid.t_nodes[idx % nt]))
            .collect();
        Self::from_values(grid, values)
    }

    pub fn from_real_fn<F>(grid: Arc<RadialGrid>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        Self::from_fn(grid, |r, t| Complex64::new(f(r, t), 0.0))
    }

    pub fn from_values(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        let window = grid.full_window();
        Self::with_window(grid, values, window)
    }

    pub(crate) fn with_window(
        grid: Arc<RadialGrid>,
        values: Vec<Complex64>,
        window: Window,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let nt = grid.t_count();
        if let Some(idx) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            if window.contains(idx / nt, idx % nt) {
                return Err(Error::invalid(
                    "values",
                    format!("non-finite sample at node ({}, {})", idx / nt, idx % nt),
                ));
            }
        }
        Ok(Self {
            grid,
            values,
            window,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn get(&self, i_r: usize, i_t: usize) -> Complex64 {
        self.values[self.grid.index(i_r, i_t)]
    }

    fn same_grid(&self, other: &RadialFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch("radial functions live on different grids".into()))
        }
    }

    fn window_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let w = self.window.clone();
        w.r.flat_map(move |i| self.window.t.clone().map(move |k| self.grid.index(i, k)))
    }

    /// `∫ f dm` over the valid window.
    pub fn haar_integral(&self) -> Complex64 {
        let terms: Vec<Complex64> = self
            .window_indices()
            .map(|idx| self.values[idx] * self.grid.haar_weights[idx])
            .collect();
        csum(&terms)
    }

    /// `‖(1 + 𝒜)^{−β} f‖_{Lᵖ(Hₙ)}` over the valid window; `p = ∞` is the weighted sup.
    pub fn weighted_lp_norm(&self, p: f64, beta: f64) -> Result<f64> {
        check_norm_params(p, beta)?;
        let nt = self.grid.t_count();
        let weighted: Vec<(f64, f64)> = self
            .window_indices()
            .map(|idx| {
                let (r, t) = (self.grid.r_nodes[idx / nt], self.grid.t_nodes[idx % nt]);
                let damp = if beta == 0.0 {
                    1.0
                } else {
                    Complex64::new(1.0 + 0.25 * r * r, t).norm().powf(-beta)
                };
                (self.values[idx].norm() * damp, self.grid.haar_weights[idx])
            })
            .collect();
        Ok(lp_from_samples(&weighted, p))
    }

    pub fn l2_norm(&self) -> f64 {
        self.weighted_lp_norm(2.0, 0.0).expect("valid parameters")
    }

    pub fn max_abs(&self) -> f64 {
        self.window_indices()
            .map(|idx| self.values[idx].norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> RadialFunction {
        RadialFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            window: self.window.clone(),
        }
    }

    /// Pointwise combination over the intersection of both windows.
    pub fn zip_with<F>(&self, other: &RadialFunction, f: F) -> Result<RadialFunction>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.same_grid(other)?;
        let window = Window {
            r: self.window.r.start.max(other.window.r.start)
                ..self.window.r.end.min(other.window.r.end),
            t: self.window.t.start.max(other.window.t.start)
                ..self.window.t.end.min(other.window.t.end),
        };
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(RadialFunction {
            grid: self.grid.clone(),
            values,
            window,
        })
    }

    pub fn sub(&self, other: &RadialFunction) -> Result<RadialFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Restricts the valid window (used to compare functions on a common window).
    pub fn restrict(&self, window: &Window) -> RadialFunction {
        RadialFunction {
            grid: self.grid.clone(),
            values: self.values.clone(),
            window: Window {
                r: self.window.r.start.max(window.r.start)..self.window.r.end.min(window.r.end),
                t: self.window.t.start.max(window.t.start)..self.window.t.end.min(window.t.end),
            },
        }
    }

    /// Radial sublaplacian `Lf = −(∂_r² f + (2n−1)/r ∂_r f + (r²/4) ∂_t² f)`.
    pub fn sublaplacian_apply(&self) -> Result<RadialFunction> {
        let h = STENCIL_HALF_WIDTH;
        self.require_stencil("r", self.window.r.len())?;
        self.require_stencil("t", self.window.t.len())?;
        let r_st = stencils(&self.grid.r_nodes);
        let t_st = stencils(&self.grid.t_nodes);
        let out_window = self.window.shrink(h, h);
        let n = self.grid.n as f64;
        let nt = self.grid.t_count();
        let zero = Complex64::new(0.0, 0.0);
        let values: Vec<Complex64> = (0..self.grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, k) = (idx / nt, idx % nt);
                if !out_window.contains(i, k) {
                    return zero;
                }
                let r = self.grid.r_nodes[i];
                let (dr1, dr2) = &r_st[i];
                let (_, dt2) = &t_st[k];
                let mut f_r = zero;
                let mut f_rr = zero;
                let mut f_tt = zero;
                for s in 0..=2 * h {
                    let fr = self.values[self.grid.index(i + s - h, k)];
                    f_r += fr * dr1[s];
                    f_rr += fr * dr2[s];
                    f_tt += self.values[self.grid.index(i, k + s - h)] * dt2[s];
                }
                -(f_rr + f_r * ((2.0 * n - 1.0) / r) + f_tt * (0.25 * r * r))
            })
            .collect();
        RadialFunction::with_window(self.grid.clone(), values, out_window)
    }

    /// Central derivative `T f = ∂_t f`.
    pub fn time_derivative_apply(&self) -> Result<RadialFunction> {
        let h = STENCIL_HALF_WIDTH;
        self.require_stencil("t", self.window.t.len())?;
        let t_st = stencils(&self.grid.t_nodes);
        let out_window = self.window.shrink(0, h);
        let nt = self.grid.t_count();
        let zero = Complex64::new(0.0, 0.0);
        let values: Vec<Complex64> = (0..self.grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, k) = (idx / nt, idx % nt);
                if !out_window.contains(i, k) {
                    return zero;
                }
                let (dt1, _) = &t_st[k];
                (0..=2 * h)
                    .map(|s| self.values[self.grid.index(i, k + s - h)] * dt1[s])
                    .sum()
            })
            .collect();
        RadialFunction::with_window(self.grid.clone(), values, out_window)
    }

    fn require_stencil(&self, axis: &'static str, have: usize) -> Result<()> {
        let needed = 2 * STENCIL_HALF_WIDTH + 1;
        if have < needed {
            Err(Error::GridTooSmall { axis, needed, have })
        } else {
            Ok(())
        }
    }

    /// Pointwise product with `𝒜^power` (or `conj(𝒜)^power`).
    pub fn multiply_by_a(&self, power: u32, conjugate: bool) -> RadialFunction {
        let nt = self.grid.t_count();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| {
                let a = Complex64::new(
                    0.25 * self.grid.r_nodes[idx / nt].powi(2),
                    self.grid.t_nodes[idx % nt],
                );
                let a = if conjugate { a.conj() } else { a };
                v * a.powu(power)
            })
            .collect();
        RadialFunction {
            grid: self.grid.clone(),
            values,
            window: self.window.clone(),
        }
    }

    /// Largest Korányi norm among nodes where `|f| > threshold · max|f|`.
    pub fn support_radius(&self, threshold: f64) -> Result<SupportReport> {
        if !(threshold > 0.0) {
            return Err(Error::invalid("threshold", "must be positive"));
        }
        let peak = self.max_abs();
        let nt = self.grid.t_count();
        let koranyi_radius = if peak == 0.0 {
            0.0
        } else {
            self.window_indices()
                .filter(|&idx| self.values[idx].norm() > threshold * peak)
                .map(|idx| {
                    let r = self.grid.r_nodes[idx / nt];
                    koranyi_from_parts(r * r, self.grid.t_nodes[idx % nt])
                })
                .fold(0.0, f64::max)
        };
        Ok(SupportReport {
            koranyi_radius,
            threshold,
        })
    }
}

pub(crate) fn check_norm_params(p: f64, beta: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::invalid("p", "must lie in [1, ∞]"));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", "must be a finite nonnegative number"));
    }
    Ok(())
}

/// `(Σ w |a|^p)^{1/p}` with the magnitudes rescaled by their maximum so large
/// powers do not overflow; `p = ∞` returns the maximum.
pub(crate) fn lp_from_samples(samples: &[(f64, f64)], p: f64) -> f64 {
    let peak = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return peak;
    }
    let terms: Vec<f64> = samples
        .iter()
        .map(|&(a, w)| w * (a / peak).powf(p))
        .collect();
    peak * pairwise_sum(&terms).powf(1.0 / p)
}

type Stencil = ([f64; 5], [f64; 5]);

fn stencils(nodes: &[f64]) -> Vec<Stencil> {
    let h = STENCIL_HALF_WIDTH;
    (0..nodes.len())
        .map(|i| {
            if i < h || i + h >= nodes.len() {
                return ([0.0; 5], [0.0; 5]);
            }
            let c = fd_weights(nodes[i], &nodes[i - h..=i + h], 2);
            let mut d1 = [0.0; 5];
            let mut d2 = [0.0; 5];
            d1.copy_from_slice(&c[1]);
            d2.copy_from_slice(&c[2]);
            (d1, d2)
        })
        .collect()
}
