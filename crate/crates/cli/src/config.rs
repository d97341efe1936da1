//! Job configuration: TOML parsing and validation into library values.
//!
//! Form terms are `[m, n, c]` triples meaning `c x^(m-1) y^n dx` in a `dx`
//! list and `c x^m y^(n-1) dy` in a `dy` list. Coefficients and exponents may
//! be integers, floats (converted exactly) or rational strings such as `"2/3"`.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::{Path, PathBuf};

use polycycle_core::lie::QMatrix;
use polycycle_core::rational::{from_f64, parse_rational};
use polycycle_core::{
    validate_chart, EdgeSeries, FormSeries, Piece, PolycycleDescriptor, Rational, SaddleChart,
    WorkingPrecision,
};
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn to_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Int(i) => Some(Rational::from_integer((*i).into())),
            Scalar::Float(f) => from_f64(*f),
            Scalar::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    chart: Option<Spanned<RawChart>>,
    #[serde(default)]
    forms: Vec<Spanned<RawForm>>,
    path: Option<Spanned<RawPath>>,
    #[serde(default)]
    corpus: Vec<Spanned<RawCase>>,
    #[serde(default)]
    engine: RawEngine,
    #[serde(default)]
    output: RawOutput,
    lie: Option<Spanned<RawLie>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    lambda1: Scalar,
    lambda2: Scalar,
    pole_bound: u32,
    #[serde(default = "one")]
    scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForm {
    #[serde(default)]
    dx: Vec<(i64, i64, Scalar)>,
    #[serde(default)]
    dy: Vec<(i64, i64, Scalar)>,
    envelope: Option<f64>,
    truncation: Option<i64>,
    #[serde(default)]
    exact: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    pieces: Vec<String>,
    #[serde(default)]
    cuts: Vec<f64>,
    #[serde(default)]
    edges: Vec<Spanned<RawEdge>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    piece: usize,
    start: usize,
    end: usize,
    branch_exponent: Scalar,
    coefficients: Vec<(i64, Scalar)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    name: String,
    chart: Option<RawChart>,
    forms: Vec<RawForm>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEngine {
    truncation: Option<u32>,
    order: Option<u32>,
    t: Option<Vec<f64>>,
    t_max: Option<f64>,
    tol: Option<f64>,
    quad_tol: Option<f64>,
    precision: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLie {
    matrix: Vec<Vec<i64>>,
    max_degree: usize,
    p: Option<u32>,
    q: Option<u32>,
    #[serde(default = "default_checks")]
    checks: usize,
    #[serde(default)]
    seed: u64,
}

fn default_checks() -> usize {
    10
}

/// Edge data for the symbol `E(piece, [start..end])`.
#[derive(Debug, Clone)]
pub struct EdgeData {
    pub piece: usize,
    pub start: usize,
    pub end: usize,
    pub series: EdgeSeries,
}

#[derive(Debug, Clone)]
pub struct PathSpec {
    pub descriptor: PolycycleDescriptor,
    pub edges: Vec<EdgeData>,
}

/// One integral `∫ ω_1 … ω_l`, over the saddle arc or over a polycycle path.
#[derive(Debug, Clone)]
pub struct Job {
    pub name: String,
    pub chart: SaddleChart,
    pub forms: Vec<FormSeries>,
    pub path: Option<PathSpec>,
}

impl Job {
    /// Truncation keeping every stored monomial tuple.
    pub fn default_truncation(&self) -> u32 {
        let m = 2 * self.chart.pole_bound() as i64;
        self.forms
            .iter()
            .map(|f| (f.truncation() + m).max(0))
            .sum::<i64>()
            .try_into()
            .unwrap_or(u32::MAX)
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    pub truncation: Option<u32>,
    pub order: u32,
    pub t: Vec<f64>,
    pub t_max: f64,
    pub tol: f64,
    pub quad_tol: f64,
    pub precision: WorkingPrecision,
}

#[derive(Debug, Clone)]
pub struct LieJob {
    pub matrix: QMatrix,
    pub max_degree: usize,
    pub p: Option<u32>,
    pub q: Option<u32>,
    pub checks: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub main: Option<Job>,
    pub corpus: Vec<Job>,
    pub engine: Engine,
    pub out_dir: Option<PathBuf>,
    pub lie: Option<LieJob>,
}

/// Maps byte offsets to `file:line` prefixes.
struct Source<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Source<'_> {
    fn error(&self, span: Range<usize>, message: impl std::fmt::Display) -> CliError {
        let line = self.text[..span.start.min(self.text.len())]
            .bytes()
            .filter(|&b| b == b'\n')
            .count()
            + 1;
        CliError::Input(format!("{}:{line}: {message}", self.path.display()))
    }
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => {
            CliError::Input(format!("config not found: {}", path.display()))
        }
        _ => CliError::Input(format!("cannot read config {}: {e}", path.display())),
    })?;
    parse(path, &text)
}

pub fn parse(path: &Path, text: &str) -> Result<Config, CliError> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e.to_string().trim_end())))?;
    let src = Source { path, text };

    let main = match (&raw.chart, raw.forms.is_empty()) {
        (Some(chart), false) => {
            let span = chart.span();
            let chart = build_chart(chart.get_ref()).map_err(|e| src.error(span.clone(), e))?;
            let forms = raw
                .forms
                .iter()
                .map(|f| build_form(f.get_ref()).map_err(|e| src.error(f.span(), e)))
                .collect::<Result<Vec<_>, _>>()?;
            let (chart, forms) = validate_chart(&chart, &forms).map_err(|e| src.error(span, e))?;
            let path = raw
                .path
                .as_ref()
                .map(|p| build_path(&src, p, &chart, &forms))
                .transpose()?;
            Some(Job {
                name: "main".into(),
                chart,
                forms,
                path,
            })
        }
        (None, false) => {
            return Err(src.error(raw.forms[0].span(), "[[forms]] given without [chart]"));
        }
        (Some(chart), true) if raw.corpus.is_empty() => {
            return Err(src.error(chart.span(), "[chart] given without [[forms]]"));
        }
        _ => None,
    };
    if main.is_none() {
        if let Some(path) = &raw.path {
            return Err(src.error(path.span(), "[path] needs [chart] and [[forms]]"));
        }
    }

    let mut corpus = Vec::new();
    for case in &raw.corpus {
        let span = case.span();
        let c = case.get_ref();
        let chart = match (&c.chart, &raw.chart) {
            (Some(chart), _) => build_chart(chart),
            (None, Some(chart)) => build_chart(chart.get_ref()),
            (None, None) => Err("corpus case has no chart and there is no [chart]".into()),
        }
        .map_err(|e| src.error(span.clone(), format!("case {}: {e}", c.name)))?;
        if c.forms.is_empty() {
            return Err(src.error(span, format!("case {}: no forms", c.name)));
        }
        let forms = c
            .forms
            .iter()
            .map(build_form)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| src.error(span.clone(), format!("case {}: {e}", c.name)))?;
        let (chart, forms) = validate_chart(&chart, &forms)
            .map_err(|e| src.error(span.clone(), format!("case {}: {e}", c.name)))?;
        if !c.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
            return Err(src.error(
                span,
                format!("case name {:?} must use [A-Za-z0-9_-] only", c.name),
            ));
        }
        if corpus.iter().any(|j: &Job| j.name == c.name) || c.name == "main" {
            return Err(src.error(span, format!("duplicate case name {:?}", c.name)));
        }
        corpus.push(Job {
            name: c.name.clone(),
            chart,
            forms,
            path: None,
        });
    }

    let engine = build_engine(&raw.engine).map_err(|e| {
        CliError::Input(format!("{}: [engine]: {e}", path.display()))
    })?;
    let lie = raw
        .lie
        .as_ref()
        .map(|l| build_lie(l.get_ref()).map_err(|e| src.error(l.span(), e)))
        .transpose()?;

    Ok(Config {
        main,
        corpus,
        engine,
        out_dir: raw.output.dir,
        lie,
    })
}

fn rational(value: &Scalar, what: &str) -> Result<Rational, String> {
    value
        .to_rational()
        .ok_or_else(|| format!("{what}: cannot read {value:?} as a rational number"))
}

fn build_chart(raw: &RawChart) -> Result<SaddleChart, String> {
    SaddleChart::with_scale(
        rational(&raw.lambda1, "lambda1")?,
        rational(&raw.lambda2, "lambda2")?,
        raw.pole_bound,
        raw.scale,
    )
    .map_err(|e| e.to_string())
}

fn build_form(raw: &RawForm) -> Result<FormSeries, String> {
    let mut form = FormSeries::new();
    for (m, n, c) in &raw.dx {
        form = form.with_dx(*m, *n, rational(c, "dx coefficient")?);
    }
    for (m, n, c) in &raw.dy {
        form = form.with_dy(*m, *n, rational(c, "dy coefficient")?);
    }
    if let Some(envelope) = raw.envelope {
        if !(envelope.is_finite() && envelope >= 0.0) {
            return Err(format!("envelope must be finite and non-negative, got {envelope}"));
        }
        form = form.with_envelope(envelope);
    }
    if let Some(truncation) = raw.truncation {
        form = form.with_truncation(truncation);
    }
    if raw.exact {
        form = form.exact();
    }
    Ok(form)
}

fn build_path(
    src: &Source<'_>,
    raw: &Spanned<RawPath>,
    chart: &SaddleChart,
    forms: &[FormSeries],
) -> Result<PathSpec, CliError> {
    let span = raw.span();
    let p = raw.get_ref();
    let mut edges = Vec::new();
    for e in &p.edges {
        let edge = e.get_ref();
        let kind = p.pieces.get(edge.piece.wrapping_sub(1)).map(String::as_str);
        if kind != Some("edge") {
            return Err(src.error(e.span(), format!("piece {} is not an edge", edge.piece)));
        }
        if !(1 <= edge.start && edge.start <= edge.end && edge.end <= forms.len()) {
            return Err(src.error(
                e.span(),
                format!("span [{}..{}] outside 1..={}", edge.start, edge.end, forms.len()),
            ));
        }
        let coefficients = edge
            .coefficients
            .iter()
            .map(|(k, c)| rational(c, "edge coefficient").map(|c| (*k, c)))
            .collect::<Result<BTreeMap<_, _>, _>>()
            .map_err(|m| src.error(e.span(), m))?;
        let branch = rational(&edge.branch_exponent, "branch_exponent")
            .map_err(|m| src.error(e.span(), m))?;
        let series =
            EdgeSeries::new(branch, coefficients).map_err(|err| src.error(e.span(), err))?;
        edges.push(EdgeData {
            piece: edge.piece,
            start: edge.start,
            end: edge.end,
            series,
        });
    }
    let pieces = p
        .pieces
        .iter()
        .enumerate()
        .map(|(i, kind)| match kind.as_str() {
            "saddle" => Ok(Piece::Saddle {
                chart: chart.clone(),
                forms: forms.to_vec(),
            }),
            "edge" => Ok(Piece::Edge {
                series: edges
                    .iter()
                    .filter(|e| e.piece == i + 1)
                    .map(|e| e.series.clone())
                    .collect(),
            }),
            other => Err(src.error(
                span.clone(),
                format!("unknown piece kind {other:?} (expected \"saddle\" or \"edge\")"),
            )),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let descriptor =
        PolycycleDescriptor::new(pieces, p.cuts.clone()).map_err(|e| src.error(span, e))?;
    Ok(PathSpec { descriptor, edges })
}

fn build_engine(raw: &RawEngine) -> Result<Engine, String> {
    let t = raw
        .t
        .clone()
        .unwrap_or_else(|| (1..=9).map(|i| i as f64 / 10.0).collect());
    let t_max = raw.t_max.unwrap_or(1.0);
    let tol = raw.tol.unwrap_or(1e-8);
    let quad_tol = raw.quad_tol.unwrap_or(1e-12);
    for (name, value) in [("tol", tol), ("quad_tol", quad_tol)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("{name} must be positive, got {value}"));
        }
    }
    if !(t_max > 0.0 && t_max <= 1.0) {
        return Err(format!("t_max must lie in (0, 1], got {t_max}"));
    }
    let precision =
        WorkingPrecision::from_bits(raw.precision.unwrap_or(106)).map_err(|e| e.to_string())?;
    Ok(Engine {
        truncation: raw.truncation,
        order: raw.order.unwrap_or(3),
        t,
        t_max,
        tol,
        quad_tol,
        precision,
    })
}

fn build_lie(raw: &RawLie) -> Result<LieJob, String> {
    let rows: Vec<&[i64]> = raw.matrix.iter().map(Vec::as_slice).collect();
    let matrix = QMatrix::from_i64(&rows).map_err(|e| e.to_string())?;
    if !matrix.is_square() || matrix.rows() == 0 {
        return Err("matrix must be square and non-empty".into());
    }
    if raw.max_degree == 0 {
        return Err("max_degree must be at least 1".into());
    }
    Ok(LieJob {
        matrix,
        max_degree: raw.max_degree,
        p: raw.p,
        q: raw.q,
        checks: raw.checks,
        seed: raw.seed,
    })
}
