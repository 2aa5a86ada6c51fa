//! Test functions on both sides of the transform.
//!
//! Radial profiles are written in `u = ρ⁴ = r⁴/16 + t²`, so their supports are
//! Korányi balls and annuli.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{FanFunction, FanGrid, Sign};
use crate::radial::{RadialFunction, RadialGrid};

/// `r⁴/16 + t²`.
pub fn rho4(r: f64, t: f64) -> f64 {
    r.powi(4) / 16.0 + t * t
}

/// Radial test functions on `Hₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialSpec {
    /// `(1 − ρ⁴/R⁴)₊^m`.
    Ball { radius: f64, power: u32 },
    /// `c · ((ρ⁴ − a⁴)(b⁴ − ρ⁴))₊^m`, scaled to peak value 1.
    Annulus { inner: f64, outer: f64, power: u32 },
    /// `exp(1 − 1/(1 − ρ⁴/R⁴))` inside the ball, a C^∞ bump with peak 1.
    SmoothBall { radius: f64 },
    /// `g(|z|) h(t)` with the annular profile `g` and even bump `h` of [`tensor_g`], [`tensor_h`].
    Tensor,
}

impl RadialSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialSpec::Ball { radius, .. } | RadialSpec::SmoothBall { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid("test_function.radius", "must be positive"));
                }
            }
            RadialSpec::Annulus { inner, outer, .. } => {
                if !(inner > 0.0 && outer > inner && outer.is_finite()) {
                    return Err(Error::invalid("test_function.inner", "need 0 < inner < outer"));
                }
            }
            RadialSpec::Tensor => {}
        }
        Ok(())
    }

    /// Value at `(r, t)`.
    pub fn eval(&self, r: f64, t: f64) -> f64 {
        match *self {
            RadialSpec::Ball { radius, power } => (1.0 - rho4(r, t) / radius.powi(4)).max(0.0).powi(power as i32),
            RadialSpec::Annulus { inner, outer, power } => {
                let (a, b) = (inner.powi(4), outer.powi(4));
                let u = rho4(r, t);
                let peak = 0.25 * (b - a) * (b - a);
                ((u - a) * (b - u) / peak).max(0.0).powi(power as i32)
            }
            RadialSpec::SmoothBall { radius } => {
                let s = rho4(r, t) / radius.powi(4);
                if s >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s)).exp()
                }
            }
            RadialSpec::Tensor => tensor_g(r) * tensor_h(t),
        }
    }

    /// Korányi radius of the support.
    pub fn support_radius(&self) -> f64 {
        match *self {
            RadialSpec::Ball { radius, .. } | RadialSpec::SmoothBall { radius } => radius,
            RadialSpec::Annulus { outer, .. } => outer,
            RadialSpec::Tensor => (4f64.powi(4) / 16.0 + 1.0).powf(0.25),
        }
    }

    /// Smallest `(r_max, t_max)` box containing the support.
    pub fn bounding_box(&self) -> (f64, f64) {
        match *self {
            RadialSpec::Tensor => (4.0, 1.0),
            _ => {
                let rho = self.support_radius();
                (2.0 * rho, rho * rho)
            }
        }
    }

    pub fn sample(&self, grid: Arc<RadialGrid>) -> Result<RadialFunction> {
        self.validate()?;
        let spec = *self;
        RadialFunction::from_real_fn(grid, move |r, t| spec.eval(r, t))
    }
}

/// C² smootherstep `6s⁵ − 15s⁴ + 10s³` clamped to `[0, 1]`.
pub fn smootherstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (s * (6.0 * s - 15.0) + 10.0)
}

/// Nonpositive annular profile: `0` outside `1 < |z| < 4`, `−1` on `[2, 3]`,
/// smootherstep ramps on `[1, 2]` and `[3, 4]`.
pub fn tensor_g(r: f64) -> f64 {
    if r <= 1.0 || r >= 4.0 {
        0.0
    } else if r < 2.0 {
        -smootherstep(r - 1.0)
    } else if r <= 3.0 {
        -1.0
    } else {
        -smootherstep(4.0 - r)
    }
}

/// Even C^∞ bump `exp(−1/(1 − t²))` on `(−1, 1)`.
pub fn tensor_h(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Functions on the fan with compact support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FanSpec {
    /// Unit mass at one node (`sign` is `1` or `−1`).
    Node { sign: i64, j: usize, lambda_index: usize },
    /// Profile on rays `0..=rays`, both signs: the indicator of
    /// `lambda_lo ≤ |λ| ≤ lambda_hi` times `((|λ|−lo)/(hi−lo))^edge_power`,
    /// which vanishes at the inner edge and jumps at the outer one.
    Band { rays: usize, lambda_lo: f64, lambda_hi: f64, edge_power: u32 },
    /// `((|λ|−lo)(hi−|λ|))₊^power` on rays `0..=rays`, both signs, smooth at both edges.
    SmoothBand { rays: usize, lambda_lo: f64, lambda_hi: f64, power: u32 },
}

impl FanSpec {
    pub fn validate(&self, grid: &FanGrid) -> Result<()> {
        match *self {
            FanSpec::Node { sign, j, lambda_index } => {
                Sign::from_factor(sign).map_err(|_| Error::invalid("fan_function.sign", "must be 1 or -1"))?;
                if j > grid.j_max() {
                    return Err(Error::invalid("fan_function.j", "exceeds j_max"));
                }
                if lambda_index >= grid.lambda_count() {
                    return Err(Error::invalid("fan_function.lambda_index", "outside the λ grid"));
                }
            }
            FanSpec::Band { rays, lambda_lo, lambda_hi, .. } | FanSpec::SmoothBand { rays, lambda_lo, lambda_hi, .. } => {
                if rays > grid.j_max() {
                    return Err(Error::invalid("fan_function.rays", "exceeds j_max"));
                }
                if !(lambda_lo > 0.0 && lambda_hi > lambda_lo) {
                    return Err(Error::invalid("fan_function.lambda_lo", "need 0 < lambda_lo < lambda_hi"));
                }
                if lambda_hi > grid.lambda_max() {
                    return Err(Error::invalid("fan_function.lambda_hi", "exceeds lambda_max"));
                }
            }
        }
        Ok(())
    }

    /// `ρ(F) = max ξ` over the support, as sampled on `grid`.
    pub fn spectral_radius(&self, grid: &FanGrid) -> f64 {
        let f = match self.sample(Arc::new(grid.clone())) {
            Ok(f) => f,
            Err(_) => return f64::NAN,
        };
        let mut rho: f64 = 0.0;
        for s in Sign::BOTH {
            for j in 0..=grid.j_max() {
                for i in 0..grid.lambda_count() {
                    if f.get(s, j, i) != Complex64::new(0.0, 0.0) {
                        rho = rho.max(grid.xi(j, i));
                    }
                }
            }
        }
        rho
    }

    pub fn sample(&self, grid: Arc<FanGrid>) -> Result<FanFunction> {
        self.validate(&grid)?;
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            FanSpec::Node { sign, j, lambda_index } => {
                let sign = Sign::from_factor(sign)?;
                let mut values = vec![zero; grid.len()];
                values[grid.index(sign, j, lambda_index)] = Complex64::new(1.0, 0.0);
                let valid_j = grid.j_max();
                FanFunction::with_window(grid, values, valid_j, 0)
            }
            FanSpec::Band { rays, lambda_lo, lambda_hi, edge_power } => {
                // tolerate round-off in lattice nodes that sit on the edges
                let eps = 1e-9 * grid.spacing();
                FanFunction::from_fn(grid, move |j, lam, _| {
                    let a = lam.abs();
                    if j > rays || a < lambda_lo - eps || a > lambda_hi + eps {
                        return zero;
                    }
                    let s = ((a - lambda_lo) / (lambda_hi - lambda_lo)).clamp(0.0, 1.0);
                    Complex64::new(s.powi(edge_power as i32), 0.0)
                })
            }
            FanSpec::SmoothBand { rays, lambda_lo, lambda_hi, power } => FanFunction::from_fn(grid, move |j, lam, _| {
                let a = lam.abs();
                if j > rays || a <= lambda_lo || a >= lambda_hi {
                    return zero;
                }
                let width = lambda_hi - lambda_lo;
                let s = 4.0 * (a - lambda_lo) * (lambda_hi - a) / (width * width);
                Complex64::new(s.powi(power as i32), 0.0)
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_profiles() {
        let ball = RadialSpec::Ball { radius: 1.0, power: 1 };
        assert_eq!(ball.eval(0.0, 0.0), 1.0);
        assert_eq!(ball.eval(2.0, 0.0), 0.0);
        assert_eq!(ball.bounding_box(), (2.0, 1.0));
        let ann = RadialSpec::Annulus { inner: 1.0, outer: 2.0, power: 1 };
        assert_eq!(ann.eval(0.0, 0.5), 0.0);
        assert!(ann.eval(0.0, (8.5f64).sqrt()) > 0.99);
        assert_eq!(ann.eval(4.0, 0.0), 0.0);
        assert_eq!(ann.support_radius(), 2.0);
        let smooth = RadialSpec::SmoothBall { radius: 1.0 };
        assert_eq!(smooth.eval(0.0, 0.0), 1.0);
        assert_eq!(smooth.eval(0.0, 1.0), 0.0);
        assert!(RadialSpec::Annulus { inner: 2.0, outer: 1.0, power: 1 }.validate().is_err());
    }

    #[test]
    fn tensor_profiles() {
        assert_eq!(tensor_g(0.5), 0.0);
        assert_eq!(tensor_g(2.5), -1.0);
        assert!((tensor_g(1.5) + 0.5).abs() < 1e-15);
        assert!((tensor_g(3.5) + 0.5).abs() < 1e-15);
        assert!(tensor_g(1.2) < 0.0 && tensor_g(1.2) > -1.0);
        assert_eq!(tensor_h(0.3), tensor_h(-0.3));
        assert_eq!(tensor_h(1.0), 0.0);
        assert_eq!(smootherstep(0.0), 0.0);
        assert_eq!(smootherstep(1.0), 1.0);
    }

    #[test]
    fn fan_specs() {
        let grid = Arc::new(FanGrid::lattice(1, 4, 0.125, 20).unwrap());
        let band = FanSpec::Band { rays: 2, lambda_lo: 0.5, lambda_hi: 1.0, edge_power: 0 };
        assert_eq!(band.spectral_radius(&grid), 5.0);
        let smooth = FanSpec::SmoothBand { rays: 0, lambda_lo: 1.0, lambda_hi: 2.0, power: 2 };
        let rho = smooth.spectral_radius(&grid);
        assert!(rho < 2.0 && rho > 1.8);
        let node = FanSpec::Node { sign: -1, j: 3, lambda_index: 7 };
        let f = node.sample(grid.clone()).unwrap();
        assert_eq!(f.get(Sign::Negative, 3, 7), Complex64::new(1.0, 0.0));
        assert_eq!(node.spectral_radius(&grid), 7.0 * 1.0);
        assert!(FanSpec::Node { sign: 2, j: 0, lambda_index: 0 }.validate(&grid).is_err());
        assert!(FanSpec::Band { rays: 9, lambda_lo: 0.5, lambda_hi: 1.0, edge_power: 0 }
            .validate(&grid)
            .is_err());
    }
}
