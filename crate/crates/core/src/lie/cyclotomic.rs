//! Cyclotomic polynomials and the quasi-unipotence test for integer matrices.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{int, to_f64, Rational};

use super::matrix::QMatrix;

/// Largest degree for which a non-cyclotomic factor is split further.
const FACTOR_DEGREE_LIMIT: usize = 16;

pub fn euler_phi(d: u64) -> u64 {
    let mut n = d;
    let mut out = d;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// `Φ_d(z) = (z^d - 1) / Π_{e | d, e < d} Φ_e(z)`.
pub fn cyclotomic(d: u64) -> Poly {
    let mut z_d = Poly::monomial(Rational::one(), d as usize);
    z_d = &z_d - &Poly::one();
    (1..d)
        .filter(|e| d.is_multiple_of(*e))
        .fold(z_d, |acc, e| acc.exact_div(&cyclotomic(e)).expect("Φ_e divides z^d - 1"))
}

/// `(z^m - 1)^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annihilator {
    pub m: u64,
    pub n: u32,
}

impl Annihilator {
    pub fn poly(&self) -> Poly {
        let base = &Poly::monomial(Rational::one(), self.m as usize) - &Poly::one();
        base.pow(self.n)
    }
}

impl fmt::Display for Annihilator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.m == 1 {
            "z - 1".to_string()
        } else {
            format!("z^{} - 1", self.m)
        };
        if self.n == 1 {
            write!(f, "{base}")
        } else {
            write!(f, "({base})^{}", self.n)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuasiUnipotence {
    /// The characteristic polynomial is `Π Φ_d^{k_d}`.
    Yes {
        cyclotomic_factors: BTreeMap<u64, u32>,
        annihilator: Annihilator,
    },
    /// `witness` divides the characteristic polynomial and is not cyclotomic;
    /// `irreducible` is false only when it was too large to split.
    No { witness: Poly, irreducible: bool },
}

impl QuasiUnipotence {
    pub fn holds(&self) -> bool {
        matches!(self, QuasiUnipotence::Yes { .. })
    }
}

/// Decides whether every eigenvalue of the integer matrix is a root of unity.
pub fn is_quasiunipotent(matrix: &QMatrix) -> Result<QuasiUnipotence> {
    if !matrix.is_square() {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    if !matrix.is_integral() {
        return Err(Error::NonIntegral);
    }
    let mut rest = matrix.charpoly();
    let degree = matrix.rows() as u64;
    let mut factors = BTreeMap::new();
    // φ(d) ≥ sqrt(d / 2), so φ(d) ≤ deg forces d ≤ 2 deg².
    for d in 1..=(2 * degree * degree).max(1) {
        if euler_phi(d) > degree {
            continue;
        }
        let phi = cyclotomic(d);
        while rest.degree().unwrap_or(0) >= phi.degree().unwrap_or(0) {
            match rest.exact_div(&phi) {
                Some(q) => {
                    rest = q;
                    *factors.entry(d).or_insert(0u32) += 1;
                }
                None => break,
            }
        }
    }
    if rest.degree() != Some(0) {
        let (witness, irreducible) = smallest_factor(&rest);
        return Ok(QuasiUnipotence::No {
            witness,
            irreducible,
        });
    }
    let m = factors.keys().fold(1u64, |acc, d| acc.lcm(d));
    let step = &matrix.pow(m as u32) - &QMatrix::identity(matrix.rows());
    let mut power = step.clone();
    let mut n = 1;
    while !power.is_zero() {
        power = &power * &step;
        n += 1;
    }
    Ok(QuasiUnipotence::Yes {
        cyclotomic_factors: factors,
        annihilator: Annihilator { m, n },
    })
}

/// Smallest-degree monic integer factor, found by grouping numerical roots.
fn smallest_factor(p: &Poly) -> (Poly, bool) {
    let degree = p.degree().unwrap_or(0);
    if degree <= 1 {
        return (p.clone(), true);
    }
    if degree > FACTOR_DEGREE_LIMIT {
        return (p.clone(), false);
    }
    let roots = roots(p);
    for size in 1..=degree / 2 {
        let mut chosen = Vec::with_capacity(size);
        if let Some(f) = search(p, &roots, size, 0, &mut chosen) {
            return (f, true);
        }
    }
    (p.clone(), true)
}

fn search(p: &Poly, roots: &[Complex64], size: usize, from: usize, chosen: &mut Vec<usize>) -> Option<Poly> {
    if chosen.len() == size {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &i in chosen.iter() {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * roots[i];
            }
            coeffs = next;
        }
        if coeffs.iter().any(|c| c.im.abs() > 1e-6 || (c.re - c.re.round()).abs() > 1e-6) {
            return None;
        }
        let candidate = Poly::new(coeffs.iter().map(|c| int(c.re.round() as i64)).collect());
        return p.exact_div(&candidate).map(|_| candidate);
    }
    for i in from..roots.len() {
        chosen.push(i);
        if let Some(f) = search(p, roots, size, i + 1, chosen) {
            return Some(f);
        }
        chosen.pop();
    }
    None
}

/// Aberth–Ehrlich iteration on the monic polynomial.
fn roots(p: &Poly) -> Vec<Complex64> {
    let lead = p.leading();
    let c: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|v| Complex64::new(to_f64(&(v / &lead)), 0.0))
        .collect();
    let n = c.len() - 1;
    let radius = 1.0
        + c[..n]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::zero();
        let mut dv = Complex64::zero();
        for coeff in c.iter().rev() {
            dv = dv * x + v;
            v = v * x + coeff;
        }
        (v, dv)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::one() / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::one() - ratio * sum);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), Poly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(4), Poly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), Poly::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), Poly::from_i64(&[1, 0, -1, 0, 1]));
        for d in 1..40 {
            assert_eq!(cyclotomic(d).degree(), Some(euler_phi(d) as usize));
        }
    }

    #[test]
    fn fixed_matrices() {
        let unipotent = QMatrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        match is_quasiunipotent(&unipotent).unwrap() {
            QuasiUnipotence::Yes { annihilator, .. } => {
                assert_eq!(annihilator, Annihilator { m: 1, n: 2 });
                assert_eq!(annihilator.to_string(), "(z - 1)^2");
            }
            other => panic!("unexpected {other:?}"),
        }

        let scaling = QMatrix::from_i64(&[&[2, 0], &[0, 1]]).unwrap();
        match is_quasiunipotent(&scaling).unwrap() {
            QuasiUnipotence::No { witness, irreducible } => {
                assert_eq!(witness, Poly::from_i64(&[-2, 1]));
                assert!(irreducible);
            }
            other => panic!("unexpected {other:?}"),
        }

        let rotation = QMatrix::from_i64(&[&[0, -1], &[1, 0]]).unwrap();
        match is_quasiunipotent(&rotation).unwrap() {
            QuasiUnipotence::Yes {
                cyclotomic_factors,
                annihilator,
            } => {
                assert_eq!(cyclotomic_factors, BTreeMap::from([(4, 1)]));
                assert_eq!(annihilator.to_string(), "z^4 - 1");
                assert!(rotation.eval_poly(&annihilator.poly()).is_zero());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadratic_witness() {
        // Characteristic polynomial (z² - 3z + 1)(z + 1).
        let m = QMatrix::from_i64(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, -1]]).unwrap();
        match is_quasiunipotent(&m).unwrap() {
            QuasiUnipotence::No { witness, irreducible } => {
                assert_eq!(witness, Poly::from_i64(&[1, -3, 1]));
                assert!(irreducible);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_fractional_entries() {
        let m = QMatrix::from_rows(vec![vec![crate::rational::rat(1, 2)]]).unwrap();
        assert_eq!(is_quasiunipotent(&m), Err(Error::NonIntegral));
    }
}
