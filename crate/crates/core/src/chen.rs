//! Splitting an iterated integral over a concatenated path.
//!
//! For `γ = γ_1 ⋯ γ_m`,
//! `∫_γ ω_1 … ω_k = Σ_{k_1+…+k_m = k} Π_j ∫_{γ_j} ω_{a_j} … ω_{b_j}`
//! where piece `j` receives the `j`-th contiguous block of the word.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::series::LogMonomialSeries;

/// `∫_{γ_piece} ω_start … ω_end`, all indices 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementarySymbol {
    pub piece: usize,
    pub start: usize,
    pub end: usize,
}

impl ElementarySymbol {
    pub fn new(piece: usize, start: usize, end: usize) -> Self {
        Self { piece, start, end }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

impl fmt::Display for ElementarySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E({},[{}..{}])", self.piece, self.start, self.end)
    }
}

/// Integer polynomial in elementary symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedPolynomial {
    length: usize,
    pieces: usize,
    terms: Vec<(i64, Vec<ElementarySymbol>)>,
}

impl IteratedPolynomial {
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn pieces(&self) -> usize {
        self.pieces
    }

    pub fn terms(&self) -> &[(i64, Vec<ElementarySymbol>)] {
        &self.terms
    }

    /// Every symbol that occurs, sorted and deduplicated.
    pub fn symbols(&self) -> Vec<ElementarySymbol> {
        let mut out: Vec<ElementarySymbol> = self
            .terms
            .iter()
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for IteratedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, factors)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *c != 1 || factors.is_empty() {
                write!(f, "{c}")?;
                if !factors.is_empty() {
                    write!(f, "·")?;
                }
            }
            for (j, s) in factors.iter().enumerate() {
                if j > 0 {
                    write!(f, "·")?;
                }
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

/// Weak compositions of `k` into `m` parts, first part descending.
fn compositions(k: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in compositions(k - first, m - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The splitting polynomial for a word of length `k` over `m` pieces.
///
/// There are `C(k+m-1, m-1)` terms, all with coefficient `+1`; empty blocks
/// stand for the empty integral `1` and are left out.
pub fn decompose(k: usize, m: usize) -> IteratedPolynomial {
    let terms = if m == 0 {
        Vec::new()
    } else {
        compositions(k, m)
            .into_iter()
            .map(|blocks| {
                let mut start = 1;
                let mut factors = Vec::new();
                for (j, &len) in blocks.iter().enumerate() {
                    if len > 0 {
                        factors.push(ElementarySymbol::new(j + 1, start, start + len - 1));
                    }
                    start += len;
                }
                (1, factors)
            })
            .collect()
    };
    IteratedPolynomial {
        length: k,
        pieces: m,
        terms,
    }
}

/// Values that elementary symbols can be substituted by.
pub trait IteratedRing: Clone {
    fn one() -> Self;
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale_int(&self, c: i64) -> Self;
}

impl IteratedRing for f64 {
    fn one() -> Self {
        1.0
    }
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_int(&self, c: i64) -> Self {
        self * c as f64
    }
}

impl IteratedRing for LogMonomialSeries {
    fn one() -> Self {
        LogMonomialSeries::one()
    }
    fn zero() -> Self {
        LogMonomialSeries::zero()
    }
    fn add(&self, other: &Self) -> Self {
        LogMonomialSeries::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        LogMonomialSeries::mul(self, other)
    }
    fn scale_int(&self, c: i64) -> Self {
        self.scale(&Rational::from_integer(c.into()))
    }
}

impl IteratedRing for Rational {
    fn one() -> Self {
        Rational::from_integer(1.into())
    }
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_int(&self, c: i64) -> Self {
        self * Rational::from_integer(c.into())
    }
}

/// Substitutes every symbol through `provider` and expands.
pub fn evaluate<R, F>(poly: &IteratedPolynomial, provider: F) -> Result<R>
where
    R: IteratedRing,
    F: Fn(&ElementarySymbol) -> Option<R>,
{
    let mut total = R::zero();
    for (c, factors) in &poly.terms {
        let mut term = R::one();
        for symbol in factors {
            let value =
                provider(symbol).ok_or_else(|| Error::MissingSymbol(symbol.to_string()))?;
            term = term.mul(&value);
        }
        total = total.add(&term.scale_int(*c));
    }
    Ok(total)
}
