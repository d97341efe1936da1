//! Finite log-monomial series `Σ ĉ_{μ,j} t^μ (log t)^j` on `(0, 1]`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::mellin::{mellin_log_monomial, RationalMellin};
use crate::precise::{log_monomial, DoubleDouble, WorkingPrecision};
use crate::rational::{to_f64, Rational};

/// Keys are `(μ, j)`; iteration order is by increasing exponent, then log power.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogMonomialSeries {
    terms: BTreeMap<(Rational, u32), Rational>,
}

impl LogMonomialSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant function 1.
    pub fn one() -> Self {
        Self::monomial(Rational::zero(), 0, Rational::from_integer(1.into()))
    }

    pub fn monomial(mu: Rational, log_power: u32, coefficient: Rational) -> Self {
        let mut out = Self::zero();
        out.accumulate(mu, log_power, coefficient);
        out
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, u32, Rational)>,
    {
        let mut out = Self::zero();
        for (mu, j, c) in terms {
            out.accumulate(mu, j, c);
        }
        out
    }

    pub(crate) fn accumulate(&mut self, mu: Rational, log_power: u32, coefficient: Rational) {
        if coefficient.is_zero() {
            return;
        }
        let key = (mu, log_power);
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += coefficient;
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

    /// `(μ, j, ĉ)` in increasing `(μ, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, u32, &Rational)> {
        self.terms.iter().map(|((mu, j), c)| (mu, *j, c))
    }

    pub fn coefficient(&self, mu: &Rational, log_power: u32) -> Rational {
        self.terms
            .get(&(mu.clone(), log_power))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn max_log_power(&self) -> Option<u32> {
        self.terms.keys().map(|(_, j)| *j).max()
    }

    /// Smallest exponent present (the dominant term as `t → 0⁺`).
    pub fn leading_exponent(&self) -> Option<&Rational> {
        self.terms.keys().next().map(|(mu, _)| mu)
    }

    /// Terms with exponent `μ` exactly, as coefficients of `(log t)^j`.
    pub fn log_polynomial_at(&self, mu: &Rational) -> Vec<Rational> {
        let top = self
            .terms
            .keys()
            .filter(|(m, _)| m == mu)
            .map(|(_, j)| *j as usize)
            .max();
        let Some(top) = top else { return Vec::new() };
        (0..=top as u32).map(|j| self.coefficient(mu, j)).collect()
    }

    /// Keeps the terms whose exponent satisfies `keep`.
    pub fn filter_exponents(&self, keep: impl Fn(&Rational) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((mu, _), _)| keep(mu))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((mu, j), c) in &other.terms {
            out.accumulate(mu.clone(), *j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::from_integer(1.into()))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c * factor))
                .collect(),
        }
    }

    /// Pointwise product: `t^a log^i t · t^b log^j t = t^{a+b} log^{i+j} t`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, i), c) in &self.terms {
            for ((b, j), d) in &other.terms {
                out.accumulate(a + b, i + j, c * d);
            }
        }
        out
    }

    /// Mellin transform on `(0, 1]`, term by term.
    pub fn mellin(&self) -> RationalMellin {
        let mut out = RationalMellin::zero();
        for ((mu, j), c) in &self.terms {
            out = out.add(&mellin_log_monomial(mu.clone(), *j).scale(c));
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        let ln_t = t.ln();
        let mut sum = 0.0;
        let mut comp = 0.0;
        for ((mu, j), c) in &self.terms {
            let term = to_f64(c) * (to_f64(mu) * ln_t).exp() * ln_t.powi(*j as i32);
            // Neumaier summation
            let s = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - s) + term;
            } else {
                comp += (term - s) + sum;
            }
            sum = s;
        }
        sum + comp
    }

    pub fn eval_precise(&self, t: f64) -> f64 {
        let t_dd = DoubleDouble::new(t);
        let ln_t = t_dd.ln();
        self.terms
            .iter()
            .fold(DoubleDouble::ZERO, |acc, ((mu, j), c)| {
                acc + DoubleDouble::from_rational(c) * log_monomial(t_dd, ln_t, mu, *j)
            })
            .to_f64()
    }

    pub fn eval_with(&self, t: f64, precision: WorkingPrecision) -> f64 {
        match precision {
            WorkingPrecision::Double => self.eval(t),
            WorkingPrecision::DoubleDouble => self.eval_precise(t),
        }
    }

    /// `Σ |ĉ| t^μ |log t|^j`, an upper bound for `|self(t)|`.
    pub fn abs_envelope(&self, t: f64) -> f64 {
        let ln_t = t.ln();
        self.terms
            .iter()
            .map(|((mu, j), c)| to_f64(&c.abs()) * (to_f64(mu) * ln_t).exp() * ln_t.abs().powi(*j as i32))
            .sum()
    }
}
