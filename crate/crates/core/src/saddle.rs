//! Local saddle chart, one-forms as truncated bi-indexed series, edge pieces
//! and polycycle descriptors.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{display, from_f64, to_f64, Rational};
use crate::series::LogMonomialSeries;

/// Linearising chart of a saddle with first integral `H = x^λ1 y^λ2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleChart {
    lambda1: Rational,
    lambda2: Rational,
    mu_ratio: Rational,
    pole_bound: u32,
    scale: f64,
}

impl SaddleChart {
    pub fn new(lambda1: Rational, lambda2: Rational, pole_bound: u32) -> Result<Self> {
        Self::with_scale(lambda1, lambda2, pole_bound, 1.0)
    }

    /// `scale` relates the user's level value to the normalised one:
    /// `t = t_user / scale`.
    pub fn with_scale(
        lambda1: Rational,
        lambda2: Rational,
        pole_bound: u32,
        scale: f64,
    ) -> Result<Self> {
        if !lambda1.is_positive() {
            return Err(Error::NonPositiveExponent {
                name: "lambda1",
                value: display(&lambda1),
            });
        }
        if !lambda2.is_positive() {
            return Err(Error::NonPositiveExponent {
                name: "lambda2",
                value: display(&lambda2),
            });
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidScale(scale));
        }
        let mu_ratio = &lambda1 / &lambda2;
        Ok(Self {
            lambda1,
            lambda2,
            mu_ratio,
            pole_bound,
            scale,
        })
    }

    pub fn lambda1(&self) -> &Rational {
        &self.lambda1
    }

    pub fn lambda2(&self) -> &Rational {
        &self.lambda2
    }

    /// `λ1 / λ2`, the factor relating `dy/y` to `dx/x` on a level curve.
    pub fn mu_ratio(&self) -> &Rational {
        &self.mu_ratio
    }

    pub fn pole_bound(&self) -> u32 {
        self.pole_bound
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Smallest admissible index: every `m, n` must exceed `-M`.
    pub fn min_index(&self) -> i64 {
        1 - self.pole_bound as i64
    }

    pub fn normalize_level(&self, t_user: f64) -> f64 {
        t_user / self.scale
    }

    /// Generator `g` of the pole lattice `λ1^{-1} ℤ + λ2^{-1} ℤ = g ℤ`.
    pub fn lattice_spacing(&self) -> Rational {
        crate::rational::rational_gcd(&self.lambda1.recip(), &self.lambda2.recip())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Differential {
    Dx,
    Dy,
}

/// `Σ c'_{m,n} x^{m-1} y^n dx + c''_{m,n} x^m y^{n-1} dy`.
///
/// The stored coefficients are exact; entries with `m + n` above `truncation`
/// are unknown and only controlled through the envelope
/// `|c(m, n)| ≤ C · 2^{-m-n}`, unless the form is marked exact (a finite sum
/// of the stored monomials).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormSeries {
    dx: BTreeMap<(i64, i64), Rational>,
    dy: BTreeMap<(i64, i64), Rational>,
    truncation: Option<i64>,
    envelope: Option<f64>,
    envelope_estimated: bool,
    exact: bool,
}

impl FormSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_dx(mut self, m: i64, n: i64, c: Rational) -> Self {
        insert(&mut self.dx, m, n, c);
        self
    }

    pub fn with_dy(mut self, m: i64, n: i64, c: Rational) -> Self {
        insert(&mut self.dy, m, n, c);
        self
    }

    /// Convenience for real coefficients, converted exactly.
    pub fn with_dx_f64(self, m: i64, n: i64, c: f64) -> Self {
        self.with_dx(m, n, from_f64(c).unwrap_or_else(Rational::zero))
    }

    pub fn with_dy_f64(self, m: i64, n: i64, c: f64) -> Self {
        self.with_dy(m, n, from_f64(c).unwrap_or_else(Rational::zero))
    }

    pub fn with_envelope(mut self, envelope: f64) -> Self {
        self.envelope = Some(envelope);
        self.envelope_estimated = false;
        self
    }

    pub fn with_truncation(mut self, truncation: i64) -> Self {
        self.truncation = Some(truncation);
        self
    }

    /// Declares that all coefficients beyond the stored ones vanish.
    pub fn exact(mut self) -> Self {
        self.exact = true;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn dx(&self) -> &BTreeMap<(i64, i64), Rational> {
        &self.dx
    }

    pub fn dy(&self) -> &BTreeMap<(i64, i64), Rational> {
        &self.dy
    }

    pub fn envelope(&self) -> Option<f64> {
        self.envelope
    }

    pub fn envelope_estimated(&self) -> bool {
        self.envelope_estimated
    }

    /// Declared truncation, or the largest stored `m + n`.
    pub fn truncation(&self) -> i64 {
        self.truncation.unwrap_or_else(|| {
            self.indices().map(|(m, n)| m + n).max().unwrap_or(0)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.dx.is_empty() && self.dy.is_empty()
    }

    fn indices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.dx.keys().chain(self.dy.keys()).copied()
    }

    /// Envelope constant the stored data needs: `max |c| · 2^{m+n}`.
    pub fn estimate_envelope(&self) -> f64 {
        self.dx
            .iter()
            .chain(self.dy.iter())
            .map(|(&(m, n), c)| to_f64(&c.abs()) * 2f64.powi((m + n) as i32))
            .fold(0.0, f64::max)
    }
}

fn insert(map: &mut BTreeMap<(i64, i64), Rational>, m: i64, n: i64, c: Rational) {
    let slot = map.entry((m, n)).or_insert_with(Rational::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(&(m, n));
    }
}

/// Checks indices and envelopes; fills in estimated envelopes where absent.
pub fn validate_chart(
    chart: &SaddleChart,
    forms: &[FormSeries],
) -> Result<(SaddleChart, Vec<FormSeries>)> {
    let min = chart.min_index();
    let mut out = Vec::with_capacity(forms.len());
    for form in forms {
        let mut form = form.clone();
        let truncation = form.truncation();
        for (m, n) in form.indices() {
            if m < min || n < min {
                return Err(Error::IndexBelowBound {
                    m,
                    n,
                    pole_bound: chart.pole_bound,
                });
            }
            if m + n > truncation {
                return Err(Error::IndexBeyondTruncation {
                    m,
                    n,
                    truncation: truncation.max(0) as u32,
                });
            }
        }
        match form.envelope {
            Some(envelope) => {
                for (&(m, n), c) in form.dx.iter().chain(form.dy.iter()) {
                    let bound = envelope * 2f64.powi(-((m + n) as i32));
                    let coefficient = to_f64(c);
                    if coefficient.abs() > bound {
                        return Err(Error::EnvelopeViolated {
                            m,
                            n,
                            coefficient,
                            bound,
                        });
                    }
                }
            }
            None => {
                form.envelope = Some(form.estimate_envelope());
                form.envelope_estimated = true;
            }
        }
        form.truncation = Some(truncation);
        out.push(form);
    }
    Ok((chart.clone(), out))
}

/// Rewrites `dy`-monomials as `dx`-monomials on `x^λ1 y^λ2 = t`.
///
/// `λ1 dx/x + λ2 dy/y = 0` gives `x^m y^{n-1} dy = -(λ1/λ2) x^{m-1} y^n dx`.
pub fn pullback_form(chart: &SaddleChart, form: &FormSeries) -> FormSeries {
    if form.dy.is_empty() {
        return form.clone();
    }
    let factor = -chart.mu_ratio().clone();
    let mut dx = form.dx.clone();
    for (&(m, n), c) in &form.dy {
        insert(&mut dx, m, n, c * &factor);
    }
    FormSeries {
        dx,
        dy: BTreeMap::new(),
        truncation: form.truncation,
        envelope: form
            .envelope
            .map(|c| c * (1.0 + to_f64(chart.mu_ratio()))),
        envelope_estimated: form.envelope_estimated,
        exact: form.exact,
    }
}

/// Series in `t^{1/λ}` describing an elementary integral over an edge piece.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSeries {
    branch_exponent: Rational,
    coefficients: BTreeMap<i64, Rational>,
}

impl EdgeSeries {
    /// `Σ_k c_k t^{k/λ}`.
    pub fn new(branch_exponent: Rational, coefficients: BTreeMap<i64, Rational>) -> Result<Self> {
        if !branch_exponent.is_positive() {
            return Err(Error::NonPositiveExponent {
                name: "branch exponent",
                value: display(&branch_exponent),
            });
        }
        let coefficients = coefficients
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(Self {
            branch_exponent,
            coefficients,
        })
    }

    pub fn branch_exponent(&self) -> &Rational {
        &self.branch_exponent
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, Rational> {
        &self.coefficients
    }

    /// Highest lattice index kept.
    pub fn truncation(&self) -> Option<i64> {
        self.coefficients.keys().next_back().copied()
    }

    pub fn exponent(&self, k: i64) -> Rational {
        Rational::from_integer(k.into()) / &self.branch_exponent
    }

    pub fn to_series(&self) -> LogMonomialSeries {
        LogMonomialSeries::from_terms(
            self.coefficients
                .iter()
                .map(|(&k, c)| (self.exponent(k), 0, c.clone())),
        )
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.to_series().eval(t)
    }
}

/// One piece of a polycycle: a saddle chart with its forms, or an edge whose
/// elementary integrals are given by series in `t^{1/λ}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Saddle {
        chart: SaddleChart,
        forms: Vec<FormSeries>,
    },
    Edge {
        series: Vec<EdgeSeries>,
    },
}

impl Piece {
    fn is_saddle(&self) -> bool {
        matches!(self, Piece::Saddle { .. })
    }
}

/// Ordered pieces of the cycle with interior cut parameters
/// `0 < v_1 < … < v_{m-1} < 1` on the normalised path parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PolycycleDescriptor {
    pieces: Vec<Piece>,
    cuts: Vec<f64>,
}

impl PolycycleDescriptor {
    pub fn new(pieces: Vec<Piece>, cuts: Vec<f64>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidPolycycle("no pieces".into()));
        }
        if cuts.len() + 1 != pieces.len() {
            return Err(Error::InvalidPolycycle(format!(
                "{} pieces need {} cuts, got {}",
                pieces.len(),
                pieces.len() - 1,
                cuts.len()
            )));
        }
        let mut previous = 0.0;
        for &c in &cuts {
            if !(c > previous && c < 1.0) {
                return Err(Error::InvalidPolycycle(format!(
                    "cut {c} not strictly increasing inside (0, 1)"
                )));
            }
            previous = c;
        }
        for pair in pieces.windows(2) {
            if pair[0].is_saddle() == pair[1].is_saddle() {
                return Err(Error::InvalidPolycycle(
                    "saddle and edge pieces must alternate".into(),
                ));
            }
        }
        Ok(Self { pieces, cuts })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Parameter interval `[v_i, v_{i+1}]` of piece `i` (0-based).
    pub fn interval(&self, i: usize) -> (f64, f64) {
        let start = if i == 0 { 0.0 } else { self.cuts[i - 1] };
        let end = self.cuts.get(i).copied().unwrap_or(1.0);
        (start, end)
    }
}

impl Default for SaddleChart {
    fn default() -> Self {
        Self::new(Rational::one(), Rational::one(), 1).expect("unit chart")
    }
}
