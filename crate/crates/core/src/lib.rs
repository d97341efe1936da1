//! Symbolic and numeric tools for iterated path integrals along the level
//! curves `x^λ1 y^λ2 = t` of a Darboux first integral near a saddle polycycle.
//!
//! The crate is organised bottom-up:
//!
//! * [`mellin`] and [`series`]: exact rational Mellin functions and their
//!   time-domain counterparts `Σ c t^μ (log t)^j`.
//! * [`saddle`]: the local saddle chart, one-forms as truncated Laurent series,
//!   edge pieces and polycycle descriptors.
//! * [`elementary`]: compensators and Mellin transforms of elementary iterated
//!   integrals with envelope-certified truncation.
//! * [`chen`]: splitting an iterated integral over a concatenated path into a
//!   polynomial in elementary integrals.
//! * [`asymptotic`]: pole bookkeeping, partial sums, tail bounds and zero-free
//!   certificates.
//! * [`quadrature`]: an independent nested-quadrature oracle.
//! * [`lie`]: Hall bases of free Lie algebras and quasi-unipotence checks.

pub mod asymptotic;
pub mod chen;
pub mod elementary;
pub mod error;
pub mod lie;
pub mod mellin;
pub mod poly;
pub mod precise;
pub mod quadrature;
pub mod rational;
pub mod saddle;
pub mod series;

pub use asymptotic::{
    certify_zero_free, partial_sum, pole_lattice, select_gap_point, tail_bound, AlgebraElement,
    GapPoint, PoleLattice, TailCertificate, ZeroCertificate,
};
pub use chen::{decompose, evaluate, ElementarySymbol, IteratedPolynomial, IteratedRing};
pub use elementary::{
    compensator, edge_elementary, elementary_mellin, fit_edge_series, monomial_mellin,
    pole_vector, EdgeIntegral, MellinSeries, Monomial, MultiIndex,
};
pub use error::{Error, Result};
pub use mellin::{mellin_log_monomial, partial_fractions, RationalMellin};
pub use poly::Poly;
pub use precise::WorkingPrecision;
pub use rational::Rational;
pub use saddle::{
    pullback_form, validate_chart, Differential, EdgeSeries, FormSeries, Piece,
    PolycycleDescriptor, SaddleChart,
};
pub use series::LogMonomialSeries;
