//! Double-double arithmetic for evaluating log-monomial series near `t = 1`,
//! where partial-fraction coefficients cancel heavily.
//!
//! Only what series evaluation needs is provided: `+`, `-`, `*`, `/`, `exp`
//! and `ln`. Relative accuracy is about `1e-30` for moderate arguments.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Working precision for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum WorkingPrecision {
    /// Plain `f64` (53 bits).
    Double,
    /// Double-double (about 106 bits).
    #[default]
    DoubleDouble,
}

impl WorkingPrecision {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            24..=53 => Ok(Self::Double),
            54..=106 => Ok(Self::DoubleDouble),
            _ => Err(Error::Precision(bits)),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Self::Double => 53,
            Self::DoubleDouble => 106,
        }
    }
}


#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn from_bigint(value: &BigInt) -> Self {
        let hi = value.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return Self::new(hi);
        }
        let rest = value - BigInt::from_f64_exact(hi);
        Self::new(hi) + Self::new(rest.to_f64().unwrap_or(0.0))
    }

    pub fn from_rational(value: &Rational) -> Self {
        Self::from_bigint(value.numer()) / Self::from_bigint(value.denom())
    }

    fn ldexp(self, exp: i32) -> Self {
        let scale = 2f64.powi(exp);
        Self {
            hi: self.hi * scale,
            lo: self.lo * scale,
        }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Self::new(k)).ldexp(-10);
        // |r| < 3.4e-4: ten Taylor terms of expm1 reach double-double accuracy.
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = term * r / Self::new(i as f64);
            sum = sum + term;
        }
        // (1 + s)^2 - 1 = 2s + s^2, kept in expm1 form to avoid cancellation.
        for _ in 0..10 {
            sum = sum * Self::new(2.0) + sum * sum;
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::new(f64::NAN);
        }
        let mut y = Self::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    pub fn powi(self, exp: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

trait FromF64Exact {
    fn from_f64_exact(value: f64) -> Self;
}

impl FromF64Exact for BigInt {
    fn from_f64_exact(value: f64) -> Self {
        Rational::from_float(value)
            .map(|q| q.to_integer())
            .unwrap_or_else(BigInt::zero)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let r = self - other * Self::new(q1);
        let q2 = r.hi / other.hi;
        let r = r - other * Self::new(q2);
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::new(q3)
    }
}

/// `t^μ (ln t)^j` in double-double, for `t > 0`.
pub fn log_monomial(t: DoubleDouble, ln_t: DoubleDouble, mu: &Rational, log_power: u32) -> DoubleDouble {
    let power = if mu.is_zero() {
        DoubleDouble::ONE
    } else if mu.is_integer() && mu.numer().abs() < BigInt::from(64) {
        let e = mu.numer().to_i64().unwrap_or(0);
        let p = t.powi(e.unsigned_abs() as u32);
        if e < 0 {
            DoubleDouble::ONE / p
        } else {
            p
        }
    } else {
        (DoubleDouble::from_rational(mu) * ln_t).exp()
    };
    power * ln_t.powi(log_power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b) / b).to_f64().abs()
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[0.1, 0.25, 0.5, 0.9, 0.999, 3.0, 1e-5] {
            let v = DoubleDouble::new(x);
            assert!(rel(v.ln().exp(), v) < 1e-29, "x = {x}");
        }
    }

    #[test]
    fn exact_powers() {
        let t = DoubleDouble::new(0.25);
        let cube = (t.ln() * DoubleDouble::new(3.0)).exp();
        assert!(rel(cube, DoubleDouble::new(0.015625)) < 1e-29);
        let tenth = DoubleDouble::from_rational(&rat(1, 10));
        let p = (tenth.ln() * DoubleDouble::new(13.0)).exp();
        let exact = tenth.powi(13);
        assert!(rel(p, exact) < 1e-28);
    }

    #[test]
    fn ln_two_constant() {
        let ln2 = DoubleDouble::new(2.0).ln();
        assert!((ln2 - LN2).to_f64().abs() < 1e-31);
    }

    #[test]
    fn division_is_accurate() {
        let third = DoubleDouble::ONE / DoubleDouble::new(3.0);
        let back = third * DoubleDouble::new(3.0);
        assert!((back - DoubleDouble::ONE).to_f64().abs() < 1e-31);
    }

    #[test]
    fn precision_bits() {
        assert_eq!(WorkingPrecision::from_bits(53).unwrap(), WorkingPrecision::Double);
        assert_eq!(WorkingPrecision::from_bits(106).unwrap(), WorkingPrecision::DoubleDouble);
        assert!(WorkingPrecision::from_bits(128).is_err());
    }
}
