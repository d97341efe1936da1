//! Pole bookkeeping, partial sums, tail bounds and zero-free certificates for
//! elements of the algebra generated by elementary iterated integrals.
//!
//! An [`AlgebraElement`] is an exact rational Mellin function (the kept part)
//! together with a pointwise bound on whatever truncation left out. Its formal
//! expansion is `Σ ĉ_{μ,j} t^μ (log t)^j`, the residues of `t^{-s} 𝓜f(s)`.
//!
//! Tail bounds. Let `s_p` be the gap point and split the kept expansion into
//! `Î_p` (exponents `μ < s_p`) and the rest. Since the kept part is a finite
//! sum of residues, the rest is an exact finite sum, and on `(0, 1]`
//!
//! ```text
//! t^ν |log t|^j = t^{s_p} · e^{-(ν - s_p) w} w^j ≤ t^{s_p} (j / (e (ν - s_p)))^j,   w = -log t,
//! ```
//!
//! so `|kept - Î_p| ≤ C_total t^{s_p}` with `C_total = Σ |ĉ| (j / (e(ν - s_p)))^j`.
//! This replaces a contour estimate over the vertical line `Re s = s_p`: the
//! integral there equals the same residue sum, and bounding it term by term is
//! both rigorous and sharper. The truncation residual is added on top.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::chen::IteratedRing;
use crate::elementary::{discarded_profile, EdgeIntegral, MellinSeries};
use crate::error::{Error, Result};
use crate::mellin::RationalMellin;
use crate::rational::{int, rat, to_f64, Rational};
use crate::series::LogMonomialSeries;

/// Pointwise bound on the part of an element that is not represented exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Residual {
    Zero,
    /// `constant · t^{-lκ} (ln 1/t)^l / l!` from a truncated [`MellinSeries`].
    Discarded {
        constant: f64,
        length: usize,
        kappa: f64,
    },
    Scaled(f64, Box<Residual>),
    Sum(Box<Residual>, Box<Residual>),
    /// `|fg - k_f k_g| ≤ R_f (|k_g| + R_g) + |k_f| R_g`.
    Product {
        left: Box<Residual>,
        left_kept: LogMonomialSeries,
        right: Box<Residual>,
        right_kept: LogMonomialSeries,
    },
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        matches!(self, Residual::Zero)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Residual::Zero => 0.0,
            Residual::Discarded {
                constant,
                length,
                kappa,
            } => discarded_profile(*constant, *length, *kappa, t),
            Residual::Scaled(c, inner) => c.abs() * inner.eval(t),
            Residual::Sum(a, b) => a.eval(t) + b.eval(t),
            Residual::Product {
                left,
                left_kept,
                right,
                right_kept,
            } => {
                let l = left.eval(t);
                let r = right.eval(t);
                l * (right_kept.abs_envelope(t) + r) + left_kept.abs_envelope(t) * r
            }
        }
    }

    fn sum(a: &Residual, b: &Residual) -> Residual {
        match (a, b) {
            (Residual::Zero, x) | (x, Residual::Zero) => x.clone(),
            _ => Residual::Sum(Box::new(a.clone()), Box::new(b.clone())),
        }
    }

    fn scaled(c: f64, a: &Residual) -> Residual {
        if a.is_zero() || c == 0.0 {
            Residual::Zero
        } else {
            Residual::Scaled(c, Box::new(a.clone()))
        }
    }
}

/// Element of the algebra generated by elementary iterated integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    kept: RationalMellin,
    residual: Residual,
    rigorous: bool,
    length: usize,
}

impl AlgebraElement {
    /// An exactly known Mellin function of an integral of length `length`.
    pub fn exact(kept: RationalMellin, length: usize) -> Self {
        Self {
            kept,
            residual: Residual::Zero,
            rigorous: true,
            length,
        }
    }

    pub fn from_series(series: &LogMonomialSeries, length: usize) -> Self {
        Self::exact(series.mellin(), length)
    }

    pub fn from_mellin_series(series: &MellinSeries) -> Self {
        let residual = if series.discarded_constant() == 0.0 {
            Residual::Zero
        } else {
            Residual::Discarded {
                constant: series.discarded_constant(),
                length: series.length(),
                kappa: series.kappa(),
            }
        };
        Self {
            kept: series.to_rational_mellin(),
            residual,
            rigorous: series.is_rigorous(),
            length: series.length(),
        }
    }

    /// Edge integrals are taken as exact when supplied and non-rigorous when
    /// fitted.
    pub fn from_edge(edge: &EdgeIntegral) -> Self {
        Self {
            kept: edge.series.to_series().mellin(),
            residual: Residual::Zero,
            rigorous: edge.is_certified(),
            length: edge.length,
        }
    }

    pub fn kept(&self) -> &RationalMellin {
        &self.kept
    }

    pub fn residual(&self) -> &Residual {
        &self.residual
    }

    pub fn is_rigorous(&self) -> bool {
        self.rigorous
    }

    /// Total iterated-integral length; drives the reference exponent `d`.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn expansion(&self) -> LogMonomialSeries {
        self.kept.inverse_mellin()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            kept: self.kept.add(&other.kept),
            residual: Residual::sum(&self.residual, &other.residual),
            rigorous: self.rigorous && other.rigorous,
            length: self.length.max(other.length),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            kept: self.kept.scale(c),
            residual: Residual::scaled(to_f64(c), &self.residual),
            rigorous: self.rigorous,
            length: self.length,
        }
    }

    /// Pointwise product, i.e. Mellin convolution of the kept parts.
    pub fn mul(&self, other: &Self) -> Self {
        let left_kept = self.kept.inverse_mellin();
        let right_kept = other.kept.inverse_mellin();
        let kept = left_kept.mul(&right_kept).mellin();
        let residual = if self.residual.is_zero() && other.residual.is_zero() {
            Residual::Zero
        } else {
            Residual::Product {
                left: Box::new(self.residual.clone()),
                left_kept,
                right: Box::new(other.residual.clone()),
                right_kept,
            }
        };
        Self {
            kept,
            residual,
            rigorous: self.rigorous && other.rigorous,
            length: self.length + other.length,
        }
    }
}

impl IteratedRing for AlgebraElement {
    fn one() -> Self {
        Self::from_series(&LogMonomialSeries::one(), 0)
    }
    fn zero() -> Self {
        Self::exact(RationalMellin::zero(), 0)
    }
    fn add(&self, other: &Self) -> Self {
        AlgebraElement::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        AlgebraElement::mul(self, other)
    }
    fn scale_int(&self, c: i64) -> Self {
        self.scale(&int(c))
    }
}

/// Poles `s = -a` sorted by decreasing location, down to `-(depth + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleLattice {
    poles: Vec<(Rational, u32)>,
    spacing: Option<Rational>,
    depth: u32,
}

impl PoleLattice {
    pub fn from_mellin(f: &RationalMellin, depth: u32) -> Self {
        Self::from_map(f.poles(), depth)
    }

    /// Poles of a product of integrals: every choice of one pole `-a_j` with
    /// multiplicity `k_j` per factor gives `-Σ a_j` with multiplicity
    /// `Σ k_j - (n - 1)`; the largest multiplicity wins.
    pub fn from_product(factors: &[&RationalMellin], depth: u32) -> Self {
        let mut acc: BTreeMap<Rational, u32> = BTreeMap::new();
        let mut first = true;
        for f in factors {
            let poles = f.poles();
            if first {
                acc = poles;
                first = false;
                continue;
            }
            let mut next = BTreeMap::new();
            for (a, k) in &acc {
                for (b, l) in &poles {
                    let slot = next.entry(a + b).or_insert(0);
                    *slot = (*slot).max(k + l - 1);
                }
            }
            acc = next;
        }
        Self::from_map(acc, depth)
    }

    fn from_map(poles: BTreeMap<Rational, u32>, depth: u32) -> Self {
        let bound = int(depth as i64 + 1);
        Self {
            poles: poles
                .into_iter()
                .filter(|(a, _)| *a <= bound)
                .map(|(a, k)| (-a, k))
                .collect(),
            spacing: None,
            depth,
        }
    }

    /// Records the generator of the lattice `λ1^{-1} ℤ + λ2^{-1} ℤ`.
    pub fn with_spacing(mut self, spacing: Rational) -> Self {
        self.spacing = Some(spacing);
        self
    }

    /// `(location, multiplicity)` with locations strictly decreasing.
    pub fn poles(&self) -> &[(Rational, u32)] {
        &self.poles
    }

    pub fn spacing(&self) -> Option<&Rational> {
        self.spacing.as_ref()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of poles with location in `[-(p+1), -p]`.
    pub fn count_in_strip(&self, p: u32) -> usize {
        let lo = -int(p as i64 + 1);
        let hi = -int(p as i64);
        self.poles
            .iter()
            .filter(|(s, _)| *s >= lo && *s <= hi)
            .count()
    }
}

pub fn pole_lattice(f: &AlgebraElement, depth: u32) -> PoleLattice {
    PoleLattice::from_mellin(f.kept(), depth)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapPoint {
    pub s_p: Rational,
    /// Half the width of the pole-free interval around `s_p`.
    pub rho: Rational,
}

/// Midpoint of the widest pole-free subinterval of `[p, p+1]` (in `a = -s`);
/// ties go to the larger midpoint.
pub fn select_gap_point(lattice: &PoleLattice, p: u32) -> Result<GapPoint> {
    if p == 0 {
        return Err(Error::InvalidOrder);
    }
    if lattice.depth < p {
        return Err(Error::LatticeTooShallow {
            depth: lattice.depth,
            p,
        });
    }
    let lo = int(p as i64);
    let hi = int(p as i64 + 1);
    let mut points: Vec<Rational> = lattice
        .poles
        .iter()
        .map(|(s, _)| -s.clone())
        .filter(|a| *a > lo && *a < hi)
        .collect();
    points.push(lo);
    points.push(hi);
    points.sort();
    let mut best: Option<(Rational, Rational)> = None;
    for pair in points.windows(2) {
        let width = &pair[1] - &pair[0];
        let better = match &best {
            None => true,
            Some((w, _)) => width >= *w,
        };
        if better {
            best = Some((width, (&pair[0] + &pair[1]) / int(2)));
        }
    }
    let (width, s_p) = best.expect("interval has two endpoints");
    Ok(GapPoint {
        s_p,
        rho: width / int(2),
    })
}

fn gap_for(f: &AlgebraElement, p: u32) -> Result<GapPoint> {
    select_gap_point(&pole_lattice(f, p + 1), p)
}

/// Residue sum over the poles `-μ` with `μ < s_p`.
pub fn partial_sum(f: &AlgebraElement, p: u32) -> Result<LogMonomialSeries> {
    let gap = gap_for(f, p)?;
    Ok(f.expansion().filter_exponents(|mu| *mu < gap.s_p))
}

/// Certified `B(p, t) ≥ |f(t) - Î_p(t)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCertificate {
    pub p: u32,
    pub s_p: Rational,
    pub rho: Rational,
    /// Constant in front of `t^{s_p}`.
    pub c_total: f64,
    /// Reference exponent `d = L²` for total length `L`, as in the classical
    /// `C s_p^d t^{s_p}` form; not used by [`TailCertificate::bound`].
    pub d: u32,
    pub rigorous: bool,
    residual: Residual,
}

impl TailCertificate {
    pub fn bound(&self, t: f64) -> f64 {
        let s = to_f64(&self.s_p);
        self.c_total * t.powf(s) + self.residual.eval(t)
    }

    /// The classical shape `C_total s_p^d t^{s_p}` for comparison.
    pub fn reference_bound(&self, t: f64) -> f64 {
        let s = to_f64(&self.s_p);
        self.c_total * s.powi(self.d as i32) * t.powf(s)
    }
}

/// `sup_{w ≥ 0} e^{-δ w} w^j = (j / (e δ))^j`.
fn decay_peak(j: u32, delta: f64) -> f64 {
    if j == 0 {
        1.0
    } else {
        (j as f64 / (std::f64::consts::E * delta)).powi(j as i32)
    }
}

pub fn tail_certificate(f: &AlgebraElement, p: u32) -> Result<TailCertificate> {
    let gap = gap_for(f, p)?;
    let expansion = f.expansion();
    let s = to_f64(&gap.s_p);
    let c_total: f64 = expansion
        .terms()
        .filter(|(mu, _, _)| **mu > gap.s_p)
        .map(|(mu, j, c)| to_f64(&c.abs()) * decay_peak(j, to_f64(mu) - s))
        .fold(0.0, |acc, x| acc + x)
        * (1.0 + 1e-12);
    let d = (f.length * f.length) as u32;
    Ok(TailCertificate {
        p,
        s_p: gap.s_p,
        rho: gap.rho,
        c_total,
        d,
        rigorous: f.rigorous,
        residual: f.residual.clone(),
    })
}

pub fn tail_bound(f: &AlgebraElement, p: u32, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::LevelOutOfRange(t));
    }
    Ok(tail_certificate(f, p)?.bound(t))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroCertificate {
    /// `f = t^μ P(log t) + o(t^μ)` with `P ≠ 0`, and `f` has no zeros on
    /// `(0, t_star)`. `poly[j]` is the coefficient of `(log t)^j`.
    ZeroFree {
        mu: Rational,
        poly: Vec<Rational>,
        t_star: f64,
        p: u32,
        s_p: Rational,
    },
    /// Every expansion coefficient below order `order` vanishes.
    ZeroToOrder { order: u32, residual_bound: f64 },
    Inconclusive { reason: String },
}

/// Lower bound `|c_J| w^J - Σ_{j<J} |c_j| w^j` on `|P(-w)|`.
fn poly_lower(abs: &[f64], w: f64) -> f64 {
    let top = abs.len() - 1;
    let mut out = abs[top] * w.powi(top as i32);
    for (j, c) in abs[..top].iter().enumerate() {
        out -= c * w.powi(j as i32);
    }
    out
}

/// Certifies that `f` has no zeros on `(0, t*)` for some `t* ≤ t_max`.
///
/// With `w = -log t`, dividing by `t^μ` leaves the leading log-polynomial,
/// bounded below by `L(w)`, against the other kept terms and the tail,
/// bounded above by `U(w) = Σ |ĉ| e^{-(ν-μ) w} w^j + C_total e^{-(s_p-μ) w}`.
/// Past `w_min`, `L` increases and every summand of `U` decreases, so
/// `L(w_0) > U(w_0)` at one `w_0 ≥ w_min` settles all `w ≥ w_0`.
pub fn certify_zero_free(f: &AlgebraElement, p_max: u32, t_max: f64) -> ZeroCertificate {
    if !f.rigorous {
        return ZeroCertificate::Inconclusive {
            reason: "bounds rest on estimated or fitted data".into(),
        };
    }
    if !(t_max > 0.0 && t_max <= 1.0) {
        return ZeroCertificate::Inconclusive {
            reason: format!("t_max = {t_max} outside (0, 1]"),
        };
    }
    let expansion = f.expansion();
    let order_limit = int(p_max as i64 + 1);
    let leading = expansion.leading_exponent().cloned();
    let Some(mu) = leading.filter(|mu| *mu < order_limit) else {
        let residual_bound = match tail_certificate(f, p_max.max(1)) {
            Ok(cert) => cert.bound(t_max),
            Err(e) => {
                return ZeroCertificate::Inconclusive {
                    reason: e.to_string(),
                }
            }
        };
        return ZeroCertificate::ZeroToOrder {
            order: p_max,
            residual_bound,
        };
    };
    if !f.residual.is_zero() {
        return ZeroCertificate::Inconclusive {
            reason: "truncation residual is not dominated by the leading term".into(),
        };
    }
    let poly = expansion.log_polynomial_at(&mu);
    // Coefficients of P(-w) in w.
    let abs: Vec<f64> = poly.iter().map(|c| to_f64(&c.abs())).collect();
    let top = abs.len() - 1;
    let w_inc = if top == 0 {
        0.0
    } else {
        let s: f64 = abs[..top]
            .iter()
            .enumerate()
            .map(|(j, c)| j as f64 * c)
            .sum();
        (s / (top as f64 * abs[top])).max(1.0)
    };

    let first_p = (mu.floor().to_integer().max(0.into()) + 1u32)
        .try_into()
        .unwrap_or(1u32)
        .max(1);
    let mut best: Option<ZeroCertificate> = None;
    for p in first_p..=p_max.max(first_p) {
        let Ok(cert) = tail_certificate(f, p) else { continue };
        if cert.s_p <= mu {
            continue;
        }
        let mu_f = to_f64(&mu);
        let others: Vec<(f64, u32, f64)> = expansion
            .terms()
            .filter(|(nu, _, _)| **nu > mu && **nu < cert.s_p)
            .map(|(nu, j, c)| (to_f64(nu) - mu_f, j, to_f64(&c.abs())))
            .collect();
        let tail_delta = to_f64(&cert.s_p) - mu_f;
        let upper = |w: f64| -> f64 {
            let mut u: f64 = others
                .iter()
                .map(|(d, j, c)| c * (-d * w).exp() * w.powi(*j as i32))
                .sum();
            u += cert.c_total * (-tail_delta * w).exp();
            u * (1.0 + 1e-12)
        };
        let w_dec = others
            .iter()
            .map(|(d, j, _)| *j as f64 / d)
            .fold(0.0, f64::max);
        let w_min = w_inc.max(w_dec).max(-t_max.ln());
        let holds = |w: f64| poly_lower(&abs, w) > upper(w);

        let mut hi = w_min;
        let mut found = holds(hi);
        let mut step = 1.0;
        while !found && hi < 1e4 {
            hi = w_min + step;
            step *= 2.0;
            found = holds(hi);
        }
        if !found {
            continue;
        }
        let mut lo = w_min;
        if !holds(lo) {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if holds(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        } else {
            hi = lo;
        }
        let t_star = (-hi).exp();
        let improves = match &best {
            Some(ZeroCertificate::ZeroFree { t_star: b, .. }) => t_star > *b,
            _ => true,
        };
        if improves {
            best = Some(ZeroCertificate::ZeroFree {
                mu: mu.clone(),
                poly: poly.clone(),
                t_star,
                p,
                s_p: cert.s_p.clone(),
            });
        }
    }
    best.unwrap_or_else(|| ZeroCertificate::Inconclusive {
        reason: "leading term not separated from the tail".into(),
    })
}

/// Lower bound on `ρ(s_p)` guaranteed by the gap selection.
pub fn guaranteed_gap(lattice: &PoleLattice, p: u32) -> Rational {
    rat(1, 2 * (lattice.count_in_strip(p) as i64 + 1))
}
