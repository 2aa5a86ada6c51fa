//! Test-side oracles shared by the integration targets.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

/// Gaussian integer `re + i·im`.
#[derive(Clone, Debug)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn new(re: i64, im: i64) -> Self {
        GaussInt { re: re.into(), im: im.into() }
    }
    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn scale(&self, k: &BigInt) -> GaussInt {
        GaussInt { re: &self.re * k, im: &self.im * k }
    }
    fn add(&self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// `num / den` rounded to f64 (about 64 significant bits before the final rounding).
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let mut v = q.to_f64().unwrap();
    // apply 2^{−shift} in steps that stay inside the exponent range
    let mut s = shift;
    while s != 0 {
        let step = s.clamp(-1000, 1000);
        v *= 2f64.powi(-step as i32);
        s -= step;
    }
    v
}

/// Exact `₁F₁(A/2; c; X/2)` for Gaussian-integer `A`, integer `c ≥ 1`, integer `X`,
/// summed in rational arithmetic until the tail is below `2^{−80}` of the partial sum
/// or below `2^{−140}` absolutely (polynomial cases can sum to exactly zero).
pub fn kummer_exact(a_re2: i64, a_im2: i64, c: i64, x2: i64) -> Complex64 {
    assert!(c >= 1);
    let x = BigInt::from(x2);
    // S_k·D_k with D_k = 4ᵏ (c)_k k!; P_k = Π_{i<k} (A + 2i) · Xᵏ
    let mut sd = GaussInt::new(1, 0);
    let mut den = BigInt::from(1);
    let mut p = GaussInt::new(1, 0);
    let a_mag = ((a_re2 * a_re2 + a_im2 * a_im2) as f64).sqrt() / 2.0;
    let x_mag = (x2 as f64).abs() / 2.0;
    for k in 1.. {
        let factor = GaussInt::new(a_re2 + 2 * (k - 1), a_im2);
        p = p.mul(&factor).scale(&x);
        let step = BigInt::from(4 * (c + k - 1) * k);
        sd = sd.scale(&step).add(&p);
        den *= &step;
        if p.is_zero() {
            break;
        }
        // past the peak each later term is at most half the previous one
        let decaying = k as f64 > 2.0 * (a_mag + x_mag) + c as f64 + 2.0;
        if decaying && (p.bits() + 82 < sd.bits() || p.bits() + 142 < den.bits()) {
            break;
        }
    }
    Complex64::new(ratio_to_f64(&sd.re, &den), ratio_to_f64(&sd.im, &den))
}

/// `e^x ₁F₁(c − a; c; −x)` from the exact sum, for the same half-integer inputs.
pub fn kummer_exact_transformed(a_re2: i64, a_im2: i64, c: i64, x2: i64) -> Complex64 {
    let m = kummer_exact(2 * c - a_re2, -a_im2, c, -x2);
    m * (x2 as f64 / 2.0).exp()
}

/// Relative error of `a` against the oracle `b`; absolute when `b` is below the
/// oracle's own resolution, where it stands for an exact zero.
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let s = b.norm();
    if s < 1e-25 {
        a.norm()
    } else {
        (a - b).norm() / s
    }
}

