//! Mellin transforms of elementary iterated integrals over a saddle piece.
//!
//! Along `x^λ1 y^λ2 = t` with `x` running from `t^{1/λ1}` to 1, the iterated
//! integral of the monomial forms `x^{m_i-1} y^{n_i} dx` has Mellin transform
//! `λ1^{-l} ℓ^l_α(s)` where `ℓ^l_α = Π_{j=0}^{l} (s + v_j)^{-1}` is the
//! generalised compensator of the pole vector `v`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mellin::RationalMellin;
use crate::rational::{from_f64, int, pow, to_f64, two_pow, Rational};
use crate::saddle::{pullback_form, Differential, EdgeSeries, FormSeries, SaddleChart};
use crate::series::LogMonomialSeries;

/// Largest number of stored monomial tuples expanded by [`elementary_mellin`].
const TUPLE_BUDGET: usize = 2_000_000;

/// `α = (m_1, n_1, …, m_l, n_l)`, stored as `l` pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pairs: Vec<(i64, i64)>,
}

impl MultiIndex {
    pub fn new(pairs: Vec<(i64, i64)>) -> Self {
        Self { pairs }
    }

    /// From the flat form `(m_1, n_1, …, m_l, n_l)`.
    pub fn from_flat(entries: &[i64]) -> Result<Self> {
        if !entries.len().is_multiple_of(2) {
            return Err(Error::InvalidIndex(format!(
                "odd number of entries ({})",
                entries.len()
            )));
        }
        Ok(Self::new(
            entries.chunks(2).map(|c| (c[0], c[1])).collect(),
        ))
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `|α| = Σ (m_i + n_i + 2M)`.
    pub fn weight(&self, pole_bound: u32) -> i64 {
        self.pairs
            .iter()
            .map(|(m, n)| m + n + 2 * pole_bound as i64)
            .sum()
    }

    pub fn check(&self, chart: &SaddleChart) -> Result<()> {
        let min = chart.min_index();
        for &(m, n) in &self.pairs {
            if m < min || n < min {
                return Err(Error::IndexBelowBound {
                    m,
                    n,
                    pole_bound: chart.pole_bound(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (m, n)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}, {n}")?;
        }
        write!(f, ")")
    }
}

/// `v_j = λ1^{-1} Σ_{i≤j} m_i + λ2^{-1} Σ_{i>j} n_i` for `j = 0..=l`.
pub fn pole_vector(alpha: &MultiIndex, chart: &SaddleChart) -> Vec<Rational> {
    let inv1 = chart.lambda1().recip();
    let inv2 = chart.lambda2().recip();
    let l = alpha.len();
    let mut prefix = 0i64;
    let mut suffix: i64 = alpha.pairs.iter().map(|(_, n)| n).sum();
    let mut out = Vec::with_capacity(l + 1);
    for j in 0..=l {
        if j > 0 {
            let (m, n) = alpha.pairs[j - 1];
            prefix += m;
            suffix -= n;
        }
        out.push(&inv1 * int(prefix) + &inv2 * int(suffix));
    }
    out
}

/// `ℓ^l_α(s) = Π_{j=0}^{l} (s + v_j)^{-1}` in partial-fraction form.
pub fn compensator(alpha: &MultiIndex, chart: &SaddleChart) -> RationalMellin {
    RationalMellin::reciprocal_product(&pole_vector(alpha, chart))
}

/// `x^{m-1} y^n dx` or `x^m y^{n-1} dy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub m: i64,
    pub n: i64,
    pub differential: Differential,
}

impl Monomial {
    pub fn dx(m: i64, n: i64) -> Self {
        Self {
            m,
            n,
            differential: Differential::Dx,
        }
    }

    pub fn dy(m: i64, n: i64) -> Self {
        Self {
            m,
            n,
            differential: Differential::Dy,
        }
    }
}

/// Exact Mellin transform of the iterated integral of monomial forms.
pub fn monomial_mellin(monomials: &[Monomial], chart: &SaddleChart) -> RationalMellin {
    let mut factor = pow(&chart.lambda1().recip(), monomials.len() as u32);
    for mono in monomials {
        if mono.differential == Differential::Dy {
            factor = -factor * chart.mu_ratio();
        }
    }
    let alpha = MultiIndex::new(monomials.iter().map(|m| (m.m, m.n)).collect());
    compensator(&alpha, chart).scale(&factor)
}

/// Truncated `Σ c_α ℓ^l_α` with a certified bound on what was discarded.
///
/// The time-domain contribution of every discarded term is bounded using
/// `|x^m y^n| ≤ t^{-κ}` on the level curve and the volume
/// `(ln(1/t) / λ1)^l / l!` of the simplex in `ln x`, so the whole discarded
/// part is at most `D · t^{-lκ} (ln 1/t)^l / l!` with `D = discarded_constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct MellinSeries {
    length: usize,
    terms: BTreeMap<MultiIndex, Rational>,
    truncation: u32,
    envelope: f64,
    discarded_constant: f64,
    kappa: f64,
    rigorous: bool,
    chart: SaddleChart,
}

impl MellinSeries {
    pub fn empty(length: usize, chart: &SaddleChart, truncation: u32) -> Self {
        Self {
            length,
            terms: BTreeMap::new(),
            truncation,
            envelope: 0.0,
            discarded_constant: 0.0,
            kappa: 0.0,
            rigorous: true,
            chart: chart.clone(),
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// `C` with `|c_α| ≤ C 2^{-|α|}`.
    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    pub fn discarded_constant(&self) -> f64 {
        self.discarded_constant
    }

    /// Exponent `κ` of the pointwise bound `t^{-κ}` on one monomial.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// False when an envelope constant had to be estimated from the data.
    pub fn is_rigorous(&self) -> bool {
        self.rigorous
    }

    pub fn chart(&self) -> &SaddleChart {
        &self.chart
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of the kept terms as one rational function.
    pub fn to_rational_mellin(&self) -> RationalMellin {
        let parts: Vec<RationalMellin> = self
            .terms
            .par_iter()
            .map(|(alpha, c)| compensator(alpha, &self.chart).scale(c))
            .collect();
        parts
            .iter()
            .fold(RationalMellin::zero(), |acc, part| acc.add(part))
    }

    /// Bound on the time-domain value of the discarded terms at level `t`.
    pub fn discarded_bound(&self, t: f64) -> f64 {
        discarded_profile(self.discarded_constant, self.length, self.kappa, t)
    }
}

/// `D t^{-lκ} (ln 1/t)^l / l!`.
pub(crate) fn discarded_profile(constant: f64, length: usize, kappa: f64, t: f64) -> f64 {
    if constant == 0.0 {
        return 0.0;
    }
    let l = length as i32;
    let log = (-t.ln()).max(0.0);
    let fact: f64 = (1..=length).map(|k| k as f64).product();
    constant * t.powf(-(l as f64) * kappa) * log.powi(l) / fact
}

/// Mass of `Σ 2^{-(m+n)}` over one factor, normalised so that all indices
/// `m, n > -M` together have mass 1, restricted to `m + n ≤ truncation`.
fn known_mass(truncation: i64, pole_bound: u32) -> Rational {
    let top = truncation + 2 * pole_bound as i64;
    let mut mass = Rational::zero();
    for w in 2..=top {
        mass += int(w - 1) * two_pow(-w);
    }
    mass
}

/// Expands `∫ ω_1 … ω_l` over the saddle piece into compensators.
///
/// The forms must have passed [`crate::saddle::validate_chart`]; `dy` parts
/// are folded in through [`pullback_form`].
pub fn elementary_mellin(
    forms: &[FormSeries],
    chart: &SaddleChart,
    truncation: u32,
) -> Result<MellinSeries> {
    let l = forms.len();
    let pulled: Vec<FormSeries> = forms.iter().map(|f| pullback_form(chart, f)).collect();
    let mut out = MellinSeries::empty(l, chart, truncation);
    if pulled.iter().any(|f| f.dx().is_empty() && f.is_exact()) {
        return Ok(out);
    }
    for (i, form) in pulled.iter().enumerate() {
        if !form.is_exact() && form.envelope().is_none() {
            return Err(Error::EnvelopeMissing(i));
        }
    }

    let pole_bound = chart.pole_bound();
    let scale = pow(&chart.lambda1().recip(), l as u32);
    let min = chart.min_index();
    for form in &pulled {
        for &(m, n) in form.dx().keys() {
            if m < min || n < min {
                return Err(Error::IndexBelowBound { m, n, pole_bound });
            }
        }
    }

    let count = pulled
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.dx().len()))
        .filter(|&c| c <= TUPLE_BUDGET)
        .ok_or_else(|| Error::Budget("too many monomial tuples".into()))?;

    let lists: Vec<Vec<(&(i64, i64), &Rational)>> =
        pulled.iter().map(|f| f.dx().iter().collect()).collect();
    let mut dropped = Rational::zero();
    let mut any_tuple = false;
    for flat in 0..count {
        let mut rest = flat;
        let mut pairs = Vec::with_capacity(l);
        let mut c = scale.clone();
        for list in lists.iter().rev() {
            let (idx, coeff) = list[rest % list.len()];
            rest /= list.len();
            pairs.push(*idx);
            c *= coeff;
        }
        pairs.reverse();
        let alpha = MultiIndex::new(pairs);
        any_tuple = true;
        if alpha.weight(pole_bound) <= truncation as i64 {
            out.terms.insert(alpha, c);
        } else {
            dropped += c.abs();
        }
    }
    if l > 0 && any_tuple && out.terms.is_empty() {
        return Err(Error::DegenerateTruncation(truncation));
    }

    // Unknown coefficients beyond a form's truncation only enter through the
    // envelope: C = λ1^{-l} 2^{2Ml} Π C_i times the mass they can carry.
    let mut known = Rational::one();
    let mut envelope = to_f64(&scale) * 2f64.powi(2 * pole_bound as i32 * l as i32);
    let mut rigorous = true;
    for form in &pulled {
        envelope *= form.envelope().unwrap_or(0.0);
        if !form.is_exact() {
            known *= known_mass(form.truncation(), pole_bound);
            rigorous &= !form.envelope_estimated();
        }
    }
    // Round the envelope and mass upward by a few ulps.
    let envelope = envelope * (1.0 + 1e-14);
    let unknown = to_f64(&(Rational::one() - known)) * (1.0 + 1e-14);
    out.envelope = envelope;
    out.discarded_constant = (to_f64(&dropped) + envelope * unknown) * (1.0 + 1e-14);
    out.kappa = (pole_bound.saturating_sub(1)) as f64
        * (to_f64(&chart.lambda1().recip()) + to_f64(&chart.lambda2().recip()));
    out.rigorous = rigorous;
    for (alpha, c) in &out.terms {
        debug_assert!(
            to_f64(&c.abs()) <= envelope * 2f64.powi(-(alpha.weight(pole_bound) as i32)) * 1.000001
                || pulled.iter().all(|f| f.is_exact())
        );
    }
    Ok(out)
}

/// How the coefficients of an edge integral were obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Supplied,
    /// Least-squares fit on quadrature samples; not certified.
    Fitted { residual: f64 },
}

/// Elementary iterated integral of length `l` over an edge piece.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeIntegral {
    pub series: EdgeSeries,
    pub length: usize,
    pub provenance: Provenance,
}

impl EdgeIntegral {
    pub fn supplied(series: EdgeSeries, length: usize) -> Self {
        Self {
            series,
            length,
            provenance: Provenance::Supplied,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.provenance == Provenance::Supplied
    }
}

/// Least-squares fit of `Σ_{k ∈ lattice} c_k t^{k/λ}` to `(t, value)` samples.
pub fn fit_edge_series(
    samples: &[(f64, f64)],
    branch_exponent: Rational,
    lattice: std::ops::RangeInclusive<i64>,
    length: usize,
    threshold: f64,
) -> Result<EdgeIntegral> {
    let ks: Vec<i64> = lattice.collect();
    if ks.is_empty() || samples.len() < ks.len() {
        return Err(Error::InvalidEdge(format!(
            "{} samples for {} unknowns",
            samples.len(),
            ks.len()
        )));
    }
    if let Some(&(t, _)) = samples.iter().find(|(t, _)| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::LevelOutOfRange(t));
    }
    let lambda = to_f64(&branch_exponent);
    let a = DMatrix::from_fn(samples.len(), ks.len(), |i, j| {
        samples[i].0.powf(ks[j] as f64 / lambda)
    });
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidEdge(e.to_string()))?;
    let residual = (&a * &x - &b).amax();
    if residual > threshold {
        return Err(Error::FitResidual {
            residual,
            threshold,
        });
    }
    let coefficients = ks
        .iter()
        .zip(x.iter())
        .map(|(&k, &c)| (k, from_f64(c).unwrap_or_else(Rational::zero)))
        .collect();
    Ok(EdgeIntegral {
        series: EdgeSeries::new(branch_exponent, coefficients)?,
        length,
        provenance: Provenance::Fitted { residual },
    })
}

/// Puiseux-type series of an edge integral, all log powers zero.
pub fn edge_elementary(edge: &EdgeIntegral) -> LogMonomialSeries {
    edge.series.to_series()
}
