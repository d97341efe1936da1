//! Exact rational helpers shared by the symbolic modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Nearest `f64`; exact for dyadic rationals that fit.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// The exact rational value of a finite double.
pub fn from_f64(value: f64) -> Option<Rational> {
    if value.is_finite() {
        Rational::from_float(value)
    } else {
        None
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.125"` exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let digits: BigInt = format!("{}{}", if whole_abs.is_empty() { "0" } else { whole_abs }, frac)
            .parse()
            .ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(digits, scale);
        return Some(if negative { -value } else { value });
    }
    text.parse::<BigInt>().ok().map(Rational::from_integer)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generator of the additive group `a ℤ + b ℤ` for positive rationals.
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    let num = a.numer().abs() * b.denom();
    let other = b.numer().abs() * a.denom();
    let g = num.gcd(&other);
    Rational::new(g, a.denom() * b.denom())
}

/// Formats as `num/den`, or just `num` for integers.
pub fn display(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn pow(value: &Rational, exp: u32) -> Rational {
    num_traits::pow(value.clone(), exp as usize)
}

pub fn two_pow(exp: i64) -> Rational {
    let base = Rational::from_integer(BigInt::from(2));
    if exp >= 0 {
        num_traits::pow(base, exp as usize)
    } else {
        num_traits::pow(base, (-exp) as usize).recip()
    }
}

pub fn sign_pow(exp: u32) -> Rational {
    if exp.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}
