//! Gauss–Legendre rules, finite-difference stencils and deterministic summation.

use std::num::NonZeroUsize;
use std::ops::Add;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights mapped onto `[a, b]`, nodes ascending.
pub fn gauss_legendre(count: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let degree = NonZeroUsize::new(count).ok_or_else(|| Error::invalid("count", "must be >= 1"))?;
    if !(b > a) {
        return Err(Error::invalid("interval", format!("empty interval [{a}, {b}]")));
    }
    let rule = GaussLegendre::new(degree);
    let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    Ok(pairs
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .unzip())
}

/// Composite trapezoid weights on a uniform grid of `count` nodes with spacing `h`.
pub fn trapezoid_weights(count: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; count];
    if count > 1 {
        w[0] = 0.5 * h;
        w[count - 1] = 0.5 * h;
    }
    w
}

/// Fornberg's algorithm: weights for derivatives `0..=order` at `x0` from the nodes `xs`.
///
/// Returns `weights[m][k]`, the coefficient of `f(xs[k])` in the `m`-th derivative.
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Summation with a fixed binary tree, so the result depends only on the input order.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Add<Output = T> + Default,
{
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of a mapped sequence without keeping the caller's buffer around.
pub fn pairwise_sum_by<T, F>(len: usize, mut term: F) -> T
where
    T: Copy + Add<Output = T> + Default,
    F: FnMut(usize) -> T,
{
    let buf: Vec<T> = (0..len).map(&mut term).collect();
    pairwise_sum(&buf)
}

pub(crate) fn csum(xs: &[Complex64]) -> Complex64 {
    pairwise_sum(xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5, 0.0, 2.0).unwrap();
        // degree 9 is the highest exact degree for 5 nodes
        let exact = 2f64.powi(10) / 10.0;
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((got - exact).abs() < 1e-12 * exact);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(x[0] > 0.0 && w.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn large_rule_weights_sum_to_length() {
        let (_, w) = gauss_legendre(2000, -3.0, 3.0).unwrap();
        assert!((w.iter().sum::<f64>() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn fornberg_reproduces_centered_stencil() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let c = fd_weights(0.0, &xs, 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for k in 0..5 {
            assert!((c[1][k] - d1[k]).abs() < 1e-14);
            assert!((c[2][k] - d2[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn fornberg_nonuniform_is_exact_on_quartics() {
        let xs = [0.1, 0.25, 0.45, 0.7, 1.0];
        let x0 = 0.45;
        let c = fd_weights(x0, &xs, 2);
        let f = |x: f64| 3.0 * x.powi(4) - x.powi(3) + 2.0 * x;
        let d1: f64 = xs.iter().zip(&c[1]).map(|(x, w)| w * f(*x)).sum();
        let d2: f64 = xs.iter().zip(&c[2]).map(|(x, w)| w * f(*x)).sum();
        assert!((d1 - (12.0 * x0.powi(3) - 3.0 * x0 * x0 + 2.0)).abs() < 1e-10);
        assert!((d2 - (36.0 * x0 * x0 - 6.0 * x0)).abs() < 1e-9);
    }

    #[test]
    fn pairwise_sum_is_order_fixed() {
        let xs: Vec<f64> = (0..1000).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let a = pairwise_sum(&xs);
        let b = pairwise_sum(&xs.clone());
        assert_eq!(a.to_bits(), b.to_bits());
        let naive: f64 = xs.iter().sum();
        assert!((a - naive).abs() < 1e-12);
    }
}
