//! Shared fixtures for the benchmarks.

use polycycle_core::rational::int;
use polycycle_core::{validate_chart, FormSeries, SaddleChart};

/// A chart with `λ = (2, 3)` and pole bound 2.
pub fn chart() -> SaddleChart {
    SaddleChart::new(int(2), int(3), 2).expect("valid chart")
}

/// `count` validated forms with `terms` exact monomials each.
pub fn forms(count: usize, terms: i64) -> Vec<FormSeries> {
    let raw: Vec<FormSeries> = (0..count as i64)
        .map(|i| {
            (0..terms).fold(FormSeries::new(), |f, k| {
                f.with_dx(k + 1, (i + k) % 3, int(1 + k))
                    .with_dy(k, 1 + (i + k) % 2, int(-1))
            })
        })
        .collect();
    let estimate = raw.iter().map(FormSeries::estimate_envelope).fold(0.0, f64::max);
    let raw: Vec<FormSeries> = raw.into_iter().map(|f| f.with_envelope(estimate).with_truncation(terms + 3)).collect();
    validate_chart(&chart(), &raw).expect("valid forms").1
}
