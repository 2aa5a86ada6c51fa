//! Points of the Heisenberg group `Hₙ = Cⁿ × R` and its homogeneous gauge.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point `(z, t)` with `z ∈ Cⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    pub z: Vec<Complex64>,
    pub t: f64,
}

/// The `U(n)`-orbit of a point, recorded as `(|z|, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r: f64,
    pub t: f64,
}

impl GroupPoint {
    pub fn new(z: Vec<Complex64>, t: f64) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        Ok(Self { z, t })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            z: vec![Complex64::new(0.0, 0.0); n],
            t: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn inverse(&self) -> Self {
        Self {
            z: self.z.iter().map(|w| -w).collect(),
            t: -self.t,
        }
    }

    /// Anisotropic dilation `(z, t) ↦ (s z, s² t)`.
    pub fn dilate(&self, s: f64) -> Self {
        Self {
            z: self.z.iter().map(|w| w * s).collect(),
            t: s * s * self.t,
        }
    }

    pub fn z_norm_sq(&self) -> f64 {
        self.z.iter().map(|w| w.norm_sqr()).sum()
    }

    pub fn radial(&self) -> RadialPoint {
        RadialPoint {
            r: self.z_norm_sq().sqrt(),
            t: self.t,
        }
    }
}

impl RadialPoint {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::invalid("r", "must be nonnegative"));
        }
        Ok(Self { r, t })
    }

    pub fn koranyi_norm(&self) -> f64 {
        koranyi_from_parts(self.r * self.r, self.t)
    }

    pub fn a_weight(&self) -> Complex64 {
        Complex64::new(0.25 * self.r * self.r, self.t)
    }
}

/// `(z, t)(w, u) = (z + w, t + u + ½ Im⟨w|z⟩)` with `⟨w|z⟩ = Σ w_k conj(z_k)`.
pub fn group_multiply(p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let twist: f64 = q
        .z
        .iter()
        .zip(&p.z)
        .map(|(w, z)| (w * z.conj()).im)
        .sum();
    Ok(GroupPoint {
        z: p.z.iter().zip(&q.z).map(|(z, w)| z + w).collect(),
        t: p.t + q.t + 0.5 * twist,
    })
}

/// Korányi gauge `(|z|⁴/16 + t²)^{1/4}`.
pub fn koranyi_norm(p: &GroupPoint) -> f64 {
    koranyi_from_parts(p.z_norm_sq(), p.t)
}

/// `𝒜(z, t) = |z|²/4 + i t`; its modulus is the squared Korányi norm.
pub fn a_weight(p: &GroupPoint) -> Complex64 {
    Complex64::new(0.25 * p.z_norm_sq(), p.t)
}

// hypot keeps the quartic from overflowing or losing the smaller term
pub(crate) fn koranyi_from_parts(r_sq: f64, t: f64) -> f64 {
    (0.25 * r_sq).hypot(t).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_inverse() {
        let p = GroupPoint::new(vec![c(0.3, -1.2), c(2.0, 0.5)], 0.7).unwrap();
        let e = GroupPoint::identity(2);
        assert_eq!(group_multiply(&e, &p).unwrap(), p);
        let q = group_multiply(&p, &p.inverse()).unwrap();
        assert!(q.z.iter().all(|w| w.norm() == 0.0) && q.t == 0.0);
    }

    #[test]
    fn twisted_product_n1() {
        let p = GroupPoint::new(vec![c(1.0, 0.0)], 0.0).unwrap();
        let q = GroupPoint::new(vec![c(0.0, 1.0)], 0.0).unwrap();
        let pq = group_multiply(&p, &q).unwrap();
        assert_eq!(pq.z[0], c(1.0, 1.0));
        assert!((pq.t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = GroupPoint::identity(1);
        let q = GroupPoint::identity(2);
        assert!(matches!(
            group_multiply(&p, &q),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(GroupPoint::new(vec![], 0.0).is_err());
    }

    #[test]
    fn koranyi_examples() {
        assert_eq!(koranyi_norm(&GroupPoint::identity(3)), 0.0);
        let p = GroupPoint::new(vec![c(0.0, 0.0)], -9.0).unwrap();
        assert!((koranyi_norm(&p) - 3.0).abs() < 1e-15);
        let p = GroupPoint::new(vec![c(2.0, 0.0)], 1.0).unwrap();
        assert!((koranyi_norm(&p) - 2f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn a_weight_examples() {
        assert_eq!(a_weight(&GroupPoint::identity(2)), c(0.0, 0.0));
        let p = GroupPoint::new(vec![c(0.0, 0.0)], 1.0).unwrap();
        assert_eq!(a_weight(&p), c(0.0, 1.0));
    }

    fn point(n: usize) -> impl Strategy<Value = GroupPoint> {
        (
            proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), n),
            -10.0..10.0f64,
        )
            .prop_map(|(z, t)| GroupPoint {
                z: z.into_iter().map(|(a, b)| c(a, b)).collect(),
                t,
            })
    }

    proptest! {
        #[test]
        fn koranyi_is_homogeneous(p in point(2), s in 0.01..50.0f64) {
            let lhs = koranyi_norm(&p.dilate(s));
            let rhs = s * koranyi_norm(&p);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
        }

        #[test]
        fn a_weight_modulus_is_squared_gauge(p in point(3)) {
            let lhs = a_weight(&p).norm();
            let rhs = koranyi_norm(&p).powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
        }

        #[test]
        fn product_is_associative(p in point(2), q in point(2), w in point(2)) {
            let a = group_multiply(&group_multiply(&p, &q).unwrap(), &w).unwrap();
            let b = group_multiply(&p, &group_multiply(&q, &w).unwrap()).unwrap();
            prop_assert!((a.t - b.t).abs() <= 1e-13);
            for (x, y) in a.z.iter().zip(&b.z) {
                prop_assert!((x - y).norm() <= 1e-13);
            }
        }
    }
}
