use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("numerator degree {num} is not below denominator degree {den}")]
    Degree { num: usize, den: usize },

    #[error("root multiset does not reproduce the denominator")]
    RootMismatch,

    #[error("pole multiplicity must be at least 1")]
    ZeroMultiplicity,

    #[error("exponent {name} must be positive, got {value}")]
    NonPositiveExponent { name: &'static str, value: String },

    #[error("index ({m}, {n}) below -M = -{pole_bound}")]
    IndexBelowBound { m: i64, n: i64, pole_bound: u32 },

    #[error("index ({m}, {n}) exceeds form truncation {truncation}")]
    IndexBeyondTruncation { m: i64, n: i64, truncation: u32 },

    #[error("envelope violated at ({m}, {n}): |{coefficient}| > {bound}")]
    EnvelopeViolated {
        m: i64,
        n: i64,
        coefficient: f64,
        bound: f64,
    },

    #[error("form {0} has no envelope constant; validate the chart first")]
    EnvelopeMissing(usize),

    #[error("truncation {0} keeps no term of a non-zero product")]
    DegenerateTruncation(u32),

    #[error("invalid scale {0}")]
    InvalidScale(f64),

    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("edge fit residual {residual:e} above threshold {threshold:e}")]
    FitResidual { residual: f64, threshold: f64 },

    #[error("invalid edge data: {0}")]
    InvalidEdge(String),

    #[error("invalid polycycle: {0}")]
    InvalidPolycycle(String),

    #[error("missing value for elementary symbol {0}")]
    MissingSymbol(String),

    #[error("pole lattice depth {depth} too shallow for p = {p}")]
    LatticeTooShallow { depth: u32, p: u32 },

    #[error("order p must be at least 1")]
    InvalidOrder,

    #[error("level t = {0} outside (0, 1]")]
    LevelOutOfRange(f64),

    #[error("quadrature did not converge: estimated error {achieved:e} > requested {requested:e}")]
    NonConvergence { achieved: f64, requested: f64 },

    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),

    #[error("unsupported working precision {0} bits (supported: 24..=106)")]
    Precision(u32),

    #[error("singular matrix")]
    SingularMatrix,

    #[error("matrix has non-integral entries")]
    NonIntegral,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("element is not a Lie polynomial")]
    NotLie,

    #[error("resource budget exceeded: {0}")]
    Budget(String),
}
