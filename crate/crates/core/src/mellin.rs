//! Rational functions of the Mellin variable `s` that vanish at infinity.
//!
//! Sign convention: a term `c · (s + a)^{-k}` is stored under the key `(a, k)`.
//! Its pole sits at `s = -a` and its inverse transform is
//! `c · t^a (-log t)^{k-1} / (k-1)!`, so the time-domain exponent is `μ = a`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{factorial, sign_pow, to_f64, Rational};
use crate::series::LogMonomialSeries;

/// `Σ c_{a,k} (s + a)^{-k}` in canonical partial-fraction form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalMellin {
    terms: BTreeMap<(Rational, u32), Rational>,
}

impl RationalMellin {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c · (s + a)^{-k}`.
    pub fn pole(a: Rational, multiplicity: u32, coefficient: Rational) -> Result<Self> {
        Self::from_terms([(a, multiplicity, coefficient)])
    }

    /// `(s + a)^{-1}`.
    pub fn simple(a: Rational) -> Self {
        let mut out = Self::zero();
        out.accumulate(a, 1, Rational::one());
        out
    }

    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, u32, Rational)>,
    {
        let mut out = Self::zero();
        for (a, k, c) in terms {
            if k == 0 {
                return Err(Error::ZeroMultiplicity);
            }
            out.accumulate(a, k, c);
        }
        Ok(out)
    }

    fn accumulate(&mut self, a: Rational, k: u32, c: Rational) {
        debug_assert!(k >= 1);
        if c.is_zero() {
            return;
        }
        let key = (a, k);
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(a, k, c)` sorted by `a`, then `k`.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, u32, &Rational)> {
        self.terms.iter().map(|((a, k), c)| (a, *k, c))
    }

    pub fn coefficient(&self, a: &Rational, k: u32) -> Rational {
        self.terms
            .get(&(a.clone(), k))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Map from `a` (pole at `s = -a`) to the pole order.
    pub fn poles(&self) -> BTreeMap<Rational, u32> {
        let mut out = BTreeMap::new();
        for (a, k) in self.terms.keys() {
            let e = out.entry(a.clone()).or_insert(0);
            *e = (*e).max(*k);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, k), c) in &other.terms {
            out.accumulate(a.clone(), *k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(key, c)| (key.clone(), c * factor))
                .collect(),
        }
    }

    pub fn eval(&self, s: &Rational) -> Option<Rational> {
        let mut acc = Rational::zero();
        for ((a, k), c) in &self.terms {
            let base = s + a;
            if base.is_zero() {
                return None;
            }
            acc += c / crate::rational::pow(&base, *k);
        }
        Some(acc)
    }

    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|((a, k), c)| to_f64(c) * (s + to_f64(a)).powi(-(*k as i32)))
            .sum()
    }

    /// `(num, den)` with `den = Π (s + a)^{k_max(a)}` monic.
    pub fn to_quotient(&self) -> (Poly, Poly) {
        let poles = self.poles();
        let den = poles
            .iter()
            .fold(Poly::one(), |acc, (a, k)| &acc * &Poly::linear(a.clone()).pow(*k));
        let mut num = Poly::zero();
        for ((a, k), c) in &self.terms {
            let cofactor = poles.iter().fold(Poly::constant(c.clone()), |acc, (b, kb)| {
                let e = if b == a { kb - k } else { *kb };
                &acc * &Poly::linear(b.clone()).pow(e)
            });
            num = &num + &cofactor;
        }
        (num, den)
    }

    /// Residues of `t^{-s} f(s)`: `(s+a)^{-k} ↦ t^a (-log t)^{k-1} / (k-1)!`.
    pub fn inverse_mellin(&self) -> LogMonomialSeries {
        LogMonomialSeries::from_terms(self.terms.iter().map(|((a, k), c)| {
            let j = k - 1;
            let factor = sign_pow(j) / Rational::from_integer(factorial(j));
            (a.clone(), j, c * factor)
        }))
    }

    /// Mellin-dual of the pointwise product on `(0, 1]`.
    ///
    /// On simple poles this is `1/(s+a) ∗ 1/(s+b) = 1/(s+a+b)`; at higher
    /// multiplicity `(s+a)^{-k} ∗ (s+b)^{-l} = C(k+l-2, k-1) (s+a+b)^{-(k+l-1)}`.
    pub fn convolve(&self, other: &Self) -> Self {
        self.inverse_mellin().mul(&other.inverse_mellin()).mellin()
    }

    /// `Π_j (s + v_j)^{-1}` with repeated entries merged into higher order.
    pub fn reciprocal_product(values: &[Rational]) -> Self {
        let mut counts: BTreeMap<Rational, u32> = BTreeMap::new();
        for v in values {
            *counts.entry(v.clone()).or_insert(0) += 1;
        }
        let factors: Vec<(Rational, u32)> = counts.into_iter().collect();
        let den = factors
            .iter()
            .fold(Poly::one(), |acc, (a, k)| &acc * &Poly::linear(a.clone()).pow(*k));
        partial_fractions(&Poly::one(), &den, &factors)
            .expect("denominator built from its own factors")
    }
}

/// Partial fractions of `num / den` where `den = Π (s + a)^k` over `factors`.
pub fn partial_fractions(
    num: &Poly,
    den: &Poly,
    factors: &[(Rational, u32)],
) -> Result<RationalMellin> {
    let mut merged: BTreeMap<Rational, u32> = BTreeMap::new();
    for (a, k) in factors {
        if *k == 0 {
            return Err(Error::ZeroMultiplicity);
        }
        *merged.entry(a.clone()).or_insert(0) += k;
    }
    let rebuilt = merged
        .iter()
        .fold(Poly::one(), |acc, (a, k)| &acc * &Poly::linear(a.clone()).pow(*k));
    if &rebuilt != den {
        return Err(Error::RootMismatch);
    }
    let den_degree = den.degree().unwrap_or(0);
    if let Some(d) = num.degree() {
        if d >= den_degree {
            return Err(Error::Degree {
                num: d,
                den: den_degree,
            });
        }
    }

    let mut out = RationalMellin::zero();
    for (a, k) in &merged {
        // Expand around s = -a with h = s + a.
        let shift = -a.clone();
        let num_h = num.shift(&shift);
        let other_h = merged
            .iter()
            .filter(|(b, _)| *b != a)
            .fold(Poly::one(), |acc, (b, kb)| {
                &acc * &Poly::linear(b - a).pow(*kb)
            });
        let taylor = num_h.series_div(&other_h, *k as usize);
        for (i, c) in taylor.into_iter().enumerate() {
            out.accumulate(a.clone(), k - i as u32, c);
        }
    }
    Ok(out)
}

/// Mellin transform of `t^μ (log t)^j`: `(-1)^j j! (s + μ)^{-(j+1)}`.
pub fn mellin_log_monomial(mu: Rational, log_power: u32) -> RationalMellin {
    let c = sign_pow(log_power) * Rational::from_integer(factorial(log_power));
    let mut out = RationalMellin::zero();
    out.accumulate(mu, log_power + 1, c);
    out
}
