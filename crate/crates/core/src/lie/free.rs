//! Free Lie algebra on `n` generators, graded by degree, in the Lyndon basis.
//!
//! Lie elements of degree `k` are stored as dense tensors over words of length
//! `k` (index = word read in base `n`, first letter most significant), so the
//! index order is the lexicographic order of words. The standard bracketing
//! `P(w)` of a Lyndon word `w` equals `w` plus lexicographically larger words,
//! which makes rewriting a Lie element in the basis a triangular elimination.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest tensor length accepted by [`hall_basis`].
const TENSOR_BUDGET: usize = 1 << 20;

pub type Word = Vec<u8>;

/// Lyndon words of length exactly `k` over `n` letters, lexicographically.
pub fn lyndon_words(n: usize, k: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    // Duval's generation of all Lyndon words of length ≤ k.
    let mut w: Vec<usize> = vec![0];
    while !w.is_empty() {
        if w.len() == k {
            out.push(w.iter().map(|&c| c as u8).collect());
        }
        let m = w.len();
        while w.len() < k {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == n - 1 {
                w.pop();
            } else {
                break;
            }
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w < &w[i..])
}

/// Split `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u8]) -> Option<(&[u8], &[u8])> {
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .map(|i| (&w[..i], &w[i..]))
}

/// Bracket form of a Lyndon word, e.g. `[x1,[x1,x2]]`.
pub fn bracket_string(w: &[u8]) -> String {
    match standard_factorization(w) {
        None => format!("x{}", w[0] + 1),
        Some((u, v)) => format!("[{},{}]", bracket_string(u), bracket_string(v)),
    }
}

/// Graded pieces up to `max_degree` with Lyndon bases and their tensors.
#[derive(Debug, Clone)]
pub struct GradedFreeLie {
    generators: usize,
    max_degree: usize,
    basis: Vec<Vec<Word>>,
    tensors: Vec<Vec<Vec<Rational>>>,
}

pub fn hall_basis(generators: usize, max_degree: usize) -> Result<GradedFreeLie> {
    if generators == 0 || max_degree == 0 {
        return Err(Error::Dimension("need n ≥ 1 and K ≥ 1".into()));
    }
    let size = (generators as u128).checked_pow(max_degree as u32);
    if size.is_none_or(|s| s > TENSOR_BUDGET as u128) {
        return Err(Error::Budget(format!(
            "{generators}^{max_degree} tensor entries"
        )));
    }
    let mut alg = GradedFreeLie {
        generators,
        max_degree,
        basis: Vec::with_capacity(max_degree),
        tensors: Vec::with_capacity(max_degree),
    };
    for k in 1..=max_degree {
        let words = lyndon_words(generators, k);
        let tensors = words.iter().map(|w| alg.lyndon_tensor(w)).collect();
        alg.basis.push(words);
        alg.tensors.push(tensors);
    }
    Ok(alg)
}

impl GradedFreeLie {
    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `dim gr^k` for `k = 1..=K`.
    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.basis[degree - 1].len()
    }

    pub fn basis(&self, degree: usize) -> &[Word] {
        &self.basis[degree - 1]
    }

    pub fn basis_tensor(&self, degree: usize, index: usize) -> &[Rational] {
        &self.tensors[degree - 1][index]
    }

    fn tensor_len(&self, degree: usize) -> usize {
        self.generators.pow(degree as u32)
    }

    fn lyndon_tensor(&self, w: &[u8]) -> Vec<Rational> {
        match standard_factorization(w) {
            None => {
                let mut t = vec![Rational::zero(); self.generators];
                t[w[0] as usize] = Rational::one();
                t
            }
            Some((u, v)) => {
                let tu = self.lyndon_tensor(u);
                let tv = self.lyndon_tensor(v);
                self.commutator(&tu, u.len(), &tv, v.len())
            }
        }
    }

    /// `XY - YX` for homogeneous tensors of degrees `a` and `b`.
    pub fn commutator(&self, x: &[Rational], a: usize, y: &[Rational], b: usize) -> Vec<Rational> {
        let na = self.tensor_len(a);
        let nb = self.tensor_len(b);
        let mut out = vec![Rational::zero(); na * nb];
        for (i, xi) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let p = xi * yj;
                out[i * nb + j] += &p;
                out[j * na + i] -= &p;
            }
        }
        out
    }

    /// Tensor of the element with the given basis coordinates.
    pub fn tensor(&self, degree: usize, coords: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.tensor_len(degree)];
        for (c, t) in coords.iter().zip(&self.tensors[degree - 1]) {
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(t) {
                if !v.is_zero() {
                    *o += c * v;
                }
            }
        }
        out
    }

    /// Basis coordinates of a Lie element given as a tensor.
    pub fn coordinates(&self, degree: usize, tensor: &[Rational]) -> Result<Vec<Rational>> {
        let basis = &self.basis[degree - 1];
        let tensors = &self.tensors[degree - 1];
        let mut rest = tensor.to_vec();
        let mut coords = vec![Rational::zero(); basis.len()];
        let index_of = |w: &Word| -> usize {
            w.iter()
                .fold(0usize, |acc, &c| acc * self.generators + c as usize)
        };
        let mut start = 0;
        while let Some(pos) = (start..rest.len()).find(|&i| !rest[i].is_zero()) {
            let slot = basis
                .binary_search_by(|w| index_of(w).cmp(&pos))
                .map_err(|_| Error::NotLie)?;
            let c = rest[pos].clone();
            for (r, v) in rest.iter_mut().zip(&tensors[slot]) {
                if !v.is_zero() {
                    *r -= &c * v;
                }
            }
            coords[slot] = c;
            start = pos + 1;
        }
        Ok(coords)
    }

    /// `[u, v]` in basis coordinates.
    pub fn bracket(
        &self,
        a: usize,
        u: &[Rational],
        b: usize,
        v: &[Rational],
    ) -> Result<Vec<Rational>> {
        if a + b > self.max_degree {
            return Err(Error::Dimension(format!(
                "degree {} above {}",
                a + b,
                self.max_degree
            )));
        }
        let t = self.commutator(&self.tensor(a, u), a, &self.tensor(b, v), b);
        self.coordinates(a + b, &t)
    }

    /// Coordinates of the `i`-th basis element.
    pub fn unit(&self, degree: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim(degree)];
        v[i] = Rational::one();
        v
    }
}
