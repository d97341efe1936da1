//! Brute-force iterated integrals along parameterised paths.
//!
//! Deliberately independent of the symbolic modules: forms are plain closures
//! and the only inputs taken from the data model are the real exponents.
//!
//! `∫ ω_1 … ω_l = ∫_{u_1 ≤ … ≤ u_l} g_1(u_1) ⋯ g_l(u_l)` is computed by the
//! forward recursion `F_k(u) = ∫_0^u g_k F_{k-1}`, `F_0 = 1`, carried across
//! the pieces of the path. Each piece is cut into equal panels with 20-point
//! Gauss–Legendre nodes; inside a panel the running integrals are obtained at
//! every node from the spectral integration matrix, so one pass handles all
//! levels. Panels are doubled until two successive results agree.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::saddle::SaddleChart;

const NODES: usize = 20;
const MAX_PANELS: usize = 1 << 12;

type FormFn = dyn Fn(f64, f64) -> (f64, f64) + Send + Sync;
type CurveFn = dyn Fn(f64) -> [f64; 4] + Send + Sync;

/// `P(x, y) dx + Q(x, y) dy`.
#[derive(Clone)]
pub struct PlanarForm {
    eval: Arc<FormFn>,
}

impl fmt::Debug for PlanarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PlanarForm")
    }
}

impl PlanarForm {
    pub fn new(eval: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
        }
    }

    /// `Σ c x^{m-1} y^n dx + Σ c x^m y^{n-1} dy` from `(m, n, c)` triples.
    pub fn from_terms(dx: &[(i64, i64, f64)], dy: &[(i64, i64, f64)]) -> Self {
        let dx = dx.to_vec();
        let dy = dy.to_vec();
        Self::new(move |x, y| {
            let p = dx
                .iter()
                .map(|&(m, n, c)| c * x.powi((m - 1) as i32) * y.powi(n as i32))
                .sum();
            let q = dy
                .iter()
                .map(|&(m, n, c)| c * x.powi(m as i32) * y.powi((n - 1) as i32))
                .sum();
            (p, q)
        })
    }

    pub fn monomial_dx(m: i64, n: i64) -> Self {
        Self::from_terms(&[(m, n, 1.0)], &[])
    }

    pub fn monomial_dy(m: i64, n: i64) -> Self {
        Self::from_terms(&[], &[(m, n, 1.0)])
    }

    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.eval)(x, y)
    }
}

/// One piece, parameterised by `σ ∈ [0, 1]`.
#[derive(Clone)]
pub enum PathPiece {
    /// Arc of `x^λ1 y^λ2 = level` from `x_from` to `x_to`, parameterised by
    /// `log x` so that powers of `x` become smooth exponentials.
    Saddle {
        lambda1: f64,
        lambda2: f64,
        level: f64,
        x_from: f64,
        x_to: f64,
    },
    Segment {
        from: (f64, f64),
        to: (f64, f64),
    },
    /// `σ ↦ [x, y, dx/dσ, dy/dσ]`.
    Curve(Arc<CurveFn>),
}

impl fmt::Debug for PathPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathPiece::Saddle {
                lambda1,
                lambda2,
                level,
                x_from,
                x_to,
            } => write!(
                f,
                "Saddle(λ=({lambda1}, {lambda2}), t={level}, x: {x_from} → {x_to})"
            ),
            PathPiece::Segment { from, to } => write!(f, "Segment({from:?} → {to:?})"),
            PathPiece::Curve(_) => f.write_str("Curve"),
        }
    }
}

impl PathPiece {
    pub fn curve(f: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static) -> Self {
        PathPiece::Curve(Arc::new(f))
    }

    /// Point and velocity at `σ`.
    pub fn at(&self, sigma: f64) -> [f64; 4] {
        match self {
            PathPiece::Saddle {
                lambda1,
                lambda2,
                level,
                x_from,
                x_to,
            } => {
                let a = x_from.ln();
                let span = x_to.ln() - a;
                let lx = a + span * sigma;
                let x = lx.exp();
                let y = ((level.ln() - lambda1 * lx) / lambda2).exp();
                [x, y, x * span, -(lambda1 / lambda2) * y * span]
            }
            PathPiece::Segment { from, to } => {
                let dx = to.0 - from.0;
                let dy = to.1 - from.1;
                [from.0 + dx * sigma, from.1 + dy * sigma, dx, dy]
            }
            PathPiece::Curve(f) => f(sigma),
        }
    }

    pub fn start(&self) -> (f64, f64) {
        let p = self.at(0.0);
        (p[0], p[1])
    }

    pub fn end(&self) -> (f64, f64) {
        let p = self.at(1.0);
        (p[0], p[1])
    }
}

#[derive(Debug, Clone)]
pub struct ParamPath {
    pieces: Vec<PathPiece>,
}

impl ParamPath {
    pub fn new(pieces: Vec<PathPiece>) -> Self {
        Self { pieces }
    }

    pub fn pieces(&self) -> &[PathPiece] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> ParamPath {
        Self::new(vec![self.pieces[i].clone()])
    }

    pub fn start(&self) -> Option<(f64, f64)> {
        self.pieces.first().map(PathPiece::start)
    }

    pub fn end(&self) -> Option<(f64, f64)> {
        self.pieces.last().map(PathPiece::end)
    }
}

fn check_level(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(t))
    }
}

/// Arc of `x^λ1 y^λ2 = t` inside the unit square, `x` increasing.
pub fn saddle_path(chart: &SaddleChart, t: f64) -> Result<ParamPath> {
    let lambda1 = to_f64(chart.lambda1());
    let lambda2 = to_f64(chart.lambda2());
    saddle_arc(lambda1, lambda2, t, t.powf(1.0 / lambda1), 1.0)
}

/// Part of the arc with `x ∈ [x_from, x_to]`.
pub fn saddle_arc(lambda1: f64, lambda2: f64, t: f64, x_from: f64, x_to: f64) -> Result<ParamPath> {
    check_level(t)?;
    Ok(ParamPath::new(vec![PathPiece::Saddle {
        lambda1,
        lambda2,
        level: t,
        x_from,
        x_to,
    }]))
}

struct Rule {
    nodes: [f64; NODES],
    weights: [f64; NODES],
    /// `S[i][j] = ∫_{-1}^{x_i} L_j`, with `L_j` the Lagrange basis.
    cumulative: [[f64; NODES]; NODES],
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut nodes = [0.0; NODES];
        let mut weights = [0.0; NODES];
        for i in 0..n {
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        let mut p = vec![[0.0; NODES + 1]; n];
        for (i, &x) in nodes.iter().enumerate() {
            p[i][0] = 1.0;
            p[i][1] = x;
            for k in 2..=n {
                p[i][k] =
                    ((2 * k - 1) as f64 * x * p[i][k - 1] - (k - 1) as f64 * p[i][k - 2]) / k as f64;
            }
        }
        let mut cumulative = [[0.0; NODES]; NODES];
        for i in 0..n {
            let x = nodes[i];
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    let integral = if k == 0 {
                        x + 1.0
                    } else {
                        (p[i][k + 1] - p[i][k - 1]) / (2 * k + 1) as f64
                    };
                    s += (2 * k + 1) as f64 / 2.0 * p[j][k] * integral;
                }
                cumulative[i][j] = weights[j] * s;
            }
        }
        Rule {
            nodes,
            weights,
            cumulative,
        }
    })
}

/// Value and magnitude (the same integral of `|g_k|`) at fixed resolution.
fn sweep(forms: &[PlanarForm], path: &ParamPath, panels: usize) -> (f64, f64) {
    let rule = rule();
    let l = forms.len();
    let mut f = vec![0.0; l + 1];
    let mut a = vec![0.0; l + 1];
    f[0] = 1.0;
    a[0] = 1.0;
    let mut g = vec![[0.0; NODES]; l];
    let mut fk = vec![[0.0; NODES]; l + 1];
    let mut ak = vec![[0.0; NODES]; l + 1];
    for piece in path.pieces() {
        let h = 1.0 / panels as f64;
        for panel in 0..panels {
            let left = panel as f64 * h;
            for (i, &x) in rule.nodes.iter().enumerate() {
                let sigma = left + 0.5 * h * (x + 1.0);
                let [px, py, dx, dy] = piece.at(sigma);
                for (k, form) in forms.iter().enumerate() {
                    let (p, q) = form.eval(px, py);
                    g[k][i] = p * dx + q * dy;
                }
            }
            fk[0] = [1.0; NODES];
            ak[0] = [1.0; NODES];
            for k in 1..=l {
                let mut end = 0.0;
                let mut end_abs = 0.0;
                let mut prod = [0.0; NODES];
                let mut prod_abs = [0.0; NODES];
                for i in 0..NODES {
                    prod[i] = g[k - 1][i] * fk[k - 1][i];
                    prod_abs[i] = g[k - 1][i].abs() * ak[k - 1][i];
                    end += rule.weights[i] * prod[i];
                    end_abs += rule.weights[i] * prod_abs[i];
                }
                for i in 0..NODES {
                    let mut s = 0.0;
                    let mut s_abs = 0.0;
                    for j in 0..NODES {
                        s += rule.cumulative[i][j] * prod[j];
                        s_abs += rule.cumulative[i][j] * prod_abs[j];
                    }
                    fk[k][i] = f[k] + 0.5 * h * s;
                    ak[k][i] = a[k] + 0.5 * h * s_abs;
                }
                // Level k is updated after its running values were used above.
                f[k] += 0.5 * h * end;
                a[k] += 0.5 * h * end_abs;
            }
        }
    }
    (f[l], a[l])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Difference between the last two refinements.
    pub error: f64,
    /// The same iterated integral of `|g_k|`, a scale for relative accuracy.
    pub magnitude: f64,
}

/// `∫_path ω_1 … ω_l`; the empty word gives 1.
///
/// Converged when the error estimate is at most `tol · max(|value|, magnitude)`.
pub fn iterated_quadrature(
    forms: &[PlanarForm],
    path: &ParamPath,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if forms.is_empty() {
        return Ok(QuadratureResult {
            value: 1.0,
            error: 0.0,
            magnitude: 1.0,
        });
    }
    let mut panels = 2;
    let (mut previous, _) = sweep(forms, path, panels / 2);
    let mut error = f64::INFINITY;
    while panels <= MAX_PANELS {
        let (value, magnitude) = sweep(forms, path, panels);
        error = (value - previous).abs();
        if error <= tol * value.abs().max(magnitude) {
            return Ok(QuadratureResult {
                value,
                error,
                magnitude,
            });
        }
        previous = value;
        panels *= 2;
    }
    Err(Error::NonConvergence {
        achieved: error,
        requested: tol,
    })
}

/// First-order integral `∫_γ ω` over the whole cycle.
pub fn abelian_integral(form: &PlanarForm, path: &ParamPath, tol: f64) -> Result<QuadratureResult> {
    iterated_quadrature(std::slice::from_ref(form), path, tol)
}
