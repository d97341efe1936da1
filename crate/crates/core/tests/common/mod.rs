//! Oracles and generators shared by the integration and acceptance tests.
//!
//! Everything here is computed without the library's symbolic code: closed
//! forms are integrated by hand, dimensions come from necklace counting, and
//! random inputs are seeded for reproducibility.
#![allow(dead_code)]

use polycycle_core::lie::QMatrix;
use polycycle_core::rational::{int, rat};
use polycycle_core::{Monomial, Rational, RationalMellin, SaddleChart};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `t ∈ {0.1, 0.2, …, 0.9}`.
pub fn decile_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// `t ∈ {0.05, 0.10, …, 0.95}`.
pub fn fine_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

fn mobius(mut n: u64) -> i64 {
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            out = -out;
        }
        p += 1;
    }
    if n > 1 {
        out = -out;
    }
    out
}

/// Number of primitive necklaces: `(1/k) Σ_{d | k} μ(d) n^{k/d}`.
pub fn witt_dimension(n: u64, k: u64) -> u64 {
    let total: i64 = (1..=k)
        .filter(|d| k.is_multiple_of(*d))
        .map(|d| mobius(d) * (n as i64).pow((k / d) as u32))
        .sum();
    (total / k as i64) as u64
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

pub fn chart(l1: i64, l2: i64, pole_bound: u32) -> SaddleChart {
    SaddleChart::new(int(l1), int(l2), pole_bound).unwrap()
}

/// The exponent pairs used by the monomial corpus.
pub const EXPONENTS: [(i64, i64); 3] = [(1, 1), (2, 3), (1, 2)];

/// A random monomial word: length `1..=3`, indices in `[-2, 5]`, random
/// differentials, exponents from [`EXPONENTS`].
#[derive(Debug, Clone)]
pub struct MonomialCase {
    pub lambda: (i64, i64),
    pub monomials: Vec<Monomial>,
}

impl MonomialCase {
    pub fn chart(&self) -> SaddleChart {
        chart(self.lambda.0, self.lambda.1, 3)
    }
}

pub fn random_monomial_case(rng: &mut ChaCha8Rng) -> MonomialCase {
    let lambda = EXPONENTS[rng.gen_range(0..EXPONENTS.len())];
    let l = rng.gen_range(1..=3);
    let monomials = (0..l)
        .map(|_| {
            let m = rng.gen_range(-2..=5);
            let n = rng.gen_range(-2..=5);
            if rng.gen_bool(0.3) {
                Monomial::dy(m, n)
            } else {
                Monomial::dx(m, n)
            }
        })
        .collect();
    MonomialCase { lambda, monomials }
}

/// Random proper rational Mellin function with poles in `[-6, 6] ∩ ℚ`
/// (denominators up to 4) and multiplicities up to 3.
pub fn random_mellin(rng: &mut ChaCha8Rng) -> RationalMellin {
    let count = rng.gen_range(1..=3);
    let terms: Vec<(Rational, u32, Rational)> = (0..count)
        .map(|_| {
            let den = rng.gen_range(1..=4);
            let a = rat(rng.gen_range(-6 * den..=6 * den), den);
            let k = rng.gen_range(1..=3);
            let mut c = rat(rng.gen_range(-9..=9), rng.gen_range(1..=5));
            if c == int(0) {
                c = int(1);
            }
            (a, k, c)
        })
        .collect();
    RationalMellin::from_terms(terms).unwrap()
}

/// A closed-form function together with its exact Mellin transform.
pub struct ClosedForm {
    pub name: &'static str,
    pub value: fn(f64) -> f64,
    pub mellin: RationalMellin,
    pub length: usize,
}

fn terms(list: &[(Rational, u32, Rational)]) -> RationalMellin {
    RationalMellin::from_terms(list.iter().cloned()).unwrap()
}

/// Integrals along the saddle piece evaluated by hand, with their Mellin
/// transforms from `∫_0^1 t^{s-1} t^a (log t)^j dt = (-1)^j j! / (s+a)^{j+1}`.
pub fn closed_form_corpus() -> Vec<ClosedForm> {
    vec![
        ClosedForm {
            // ∫_t^1 x² (t/x) dx
            name: "x^2 y dx",
            value: |t| (t - t * t * t) / 2.0,
            mellin: terms(&[(int(1), 1, rat(1, 2)), (int(3), 1, rat(-1, 2))]),
            length: 1,
        },
        ClosedForm {
            // ∫_t^1 (t/x₁ - t) dx₁
            name: "dx, x^-1 y dx",
            value: |t| t * t - t - t * t.ln(),
            mellin: terms(&[(int(2), 1, int(1)), (int(1), 1, int(-1)), (int(1), 2, int(1))]),
            length: 2,
        },
        ClosedForm {
            name: "y dx",
            value: |t| -t * t.ln(),
            mellin: terms(&[(int(1), 2, int(1))]),
            length: 1,
        },
        ClosedForm {
            name: "dy",
            value: |t| t - 1.0,
            mellin: terms(&[(int(1), 1, int(1)), (int(0), 1, int(-1))]),
            length: 1,
        },
        ClosedForm {
            name: "y dx + x y^2 dx",
            value: |t| -t * t.ln() - t * t * t.ln(),
            mellin: terms(&[(int(1), 2, int(1)), (int(2), 2, int(1))]),
            length: 1,
        },
        ClosedForm {
            // λ = (2, 3): ∫_{√t}^1 t^{1/3} x^{-2/3} dx
            name: "y dx, lambda (2,3)",
            value: |t| 3.0 * t.powf(1.0 / 3.0) - 3.0 * t.sqrt(),
            mellin: terms(&[(rat(1, 3), 1, int(3)), (rat(1, 2), 1, int(-3))]),
            length: 1,
        },
        ClosedForm {
            // (1 - t)³ / 6
            name: "dx dx dx",
            value: |t| (1.0 - t).powi(3) / 6.0,
            mellin: terms(&[
                (int(0), 1, rat(1, 6)),
                (int(1), 1, rat(-1, 2)),
                (int(2), 1, rat(1, 2)),
                (int(3), 1, rat(-1, 6)),
            ]),
            length: 3,
        },
        ClosedForm {
            // t² log² t / 2
            name: "y dx, y dx",
            value: |t| t * t * t.ln().powi(2) / 2.0,
            mellin: terms(&[(int(2), 3, int(1))]),
            length: 2,
        },
        ClosedForm {
            // ∫_t^1 t x^{-3} dx
            name: "x^-2 y dx",
            value: |t| 0.5 / t - t / 2.0,
            mellin: terms(&[(int(-1), 1, rat(1, 2)), (int(1), 1, rat(-1, 2))]),
            length: 1,
        },
        ClosedForm {
            // (-t log t)(t - 1)
            name: "product",
            value: |t| -t * t.ln() * (t - 1.0),
            mellin: terms(&[(int(2), 2, int(1)), (int(1), 2, int(-1))]),
            length: 2,
        },
    ]
}

/// Companion matrix of a monic integer polynomial given low-first.
fn companion(coeffs: &[i64]) -> Vec<Vec<i64>> {
    let n = coeffs.len() - 1;
    let mut m = vec![vec![0; n]; n];
    for i in 1..n {
        m[i][i - 1] = 1;
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[n - 1] = -coeffs[i];
    }
    m
}

/// Random integer matrix whose characteristic polynomial is a product of
/// cyclotomic polynomials: a block-triangular matrix with companion blocks of
/// `Φ_1, Φ_2, Φ_3, Φ_4, Φ_6`, conjugated by a random unimodular matrix.
pub fn random_quasiunipotent(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    let blocks: [&[i64]; 5] = [&[-1, 1], &[1, 1], &[1, 1, 1], &[1, 0, 1], &[1, -1, 1]];
    let mut b = vec![vec![0i64; n]; n];
    let mut at = 0;
    while at < n {
        let choice = loop {
            let c = blocks[rng.gen_range(0..blocks.len())];
            if at + c.len() - 1 <= n {
                break c;
            }
        };
        let block = companion(choice);
        for (i, row) in block.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                b[at + i][at + j] = *v;
            }
        }
        // Couplings above the diagonal keep the spectrum.
        for row in b.iter_mut().take(at) {
            for v in row.iter_mut().skip(at).take(block.len()) {
                *v = rng.gen_range(-1..=1);
            }
        }
        at += block.len();
    }
    let mut u = QMatrix::identity(n);
    let mut u_inv = QMatrix::identity(n);
    for _ in 0..3 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = rng.gen_range(-2..=2);
        let mut e = QMatrix::identity(n);
        e.set(i, j, int(c));
        let mut e_inv = QMatrix::identity(n);
        e_inv.set(i, j, int(-c));
        u = &u * &e;
        u_inv = &e_inv * &u_inv;
    }
    let rows: Vec<&[i64]> = b.iter().map(Vec::as_slice).collect();
    let b = QMatrix::from_i64(&rows).unwrap();
    &(&u * &b) * &u_inv
}

/// Random invertible integer matrix.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| int(rng.gen_range(-3..=3))).collect())
            .collect();
        let m = QMatrix::from_rows(rows).unwrap();
        if m.det() != int(0) {
            return m;
        }
    }
}
