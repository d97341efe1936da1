//! Graded automorphisms induced by a degree-one matrix, and the `Var` checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

use super::cyclotomic::{is_quasiunipotent, QuasiUnipotence};
use super::free::GradedFreeLie;
use super::matrix::QMatrix;

/// Matrices of `l_*` on `gr^1, …, gr^K`, columns are images of basis elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedAutomorphism {
    matrices: Vec<QMatrix>,
}

impl GradedAutomorphism {
    pub fn degree(&self, k: usize) -> &QMatrix {
        &self.matrices[k - 1]
    }

    pub fn max_degree(&self) -> usize {
        self.matrices.len()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Checks `A[u, v] = [Au, Av]` for all pairs of basis elements.
    pub fn is_multiplicative(&self, alg: &GradedFreeLie) -> Result<bool> {
        let top = self.max_degree();
        for a in 1..top {
            for b in 1..=top - a {
                for i in 0..alg.dim(a) {
                    for j in 0..alg.dim(b) {
                        let u = alg.unit(a, i);
                        let v = alg.unit(b, j);
                        let lhs = self.degree(a + b).mul_vec(&alg.bracket(a, &u, b, &v)?);
                        let rhs = alg.bracket(
                            a,
                            &self.degree(a).mul_vec(&u),
                            b,
                            &self.degree(b).mul_vec(&v),
                        )?;
                        if lhs != rhs {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Applies `A` to every tensor position.
fn apply_positionwise(a: &QMatrix, tensor: &[Rational], n: usize, degree: usize) -> Vec<Rational> {
    let mut current = tensor.to_vec();
    let mut stride = 1;
    for _ in 0..degree {
        let mut next = vec![Rational::from_integer(0.into()); current.len()];
        for (idx, c) in current.iter().enumerate() {
            if c == &int(0) {
                continue;
            }
            let letter = (idx / stride) % n;
            let base = idx - letter * stride;
            for r in 0..n {
                let coeff = a.get(r, letter);
                if coeff != &int(0) {
                    next[base + r * stride] += coeff * c;
                }
            }
        }
        current = next;
        stride *= n;
    }
    current
}

/// Extends an invertible degree-one map to every graded piece.
pub fn extend_automorphism(alg: &GradedFreeLie, a: &QMatrix) -> Result<GradedAutomorphism> {
    let n = alg.generators();
    if a.rows() != n || a.cols() != n {
        return Err(Error::Dimension(format!(
            "expected {n}×{n}, got {}×{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.det() == int(0) {
        return Err(Error::SingularMatrix);
    }
    let mut matrices = Vec::with_capacity(alg.max_degree());
    for k in 1..=alg.max_degree() {
        let columns = (0..alg.dim(k))
            .map(|j| {
                let image = apply_positionwise(a, alg.basis_tensor(k, j), n, k);
                alg.coordinates(k, &image)
            })
            .collect::<Result<Vec<_>>>()?;
        matrices.push(QMatrix::from_columns(alg.dim(k), &columns));
    }
    Ok(GradedAutomorphism { matrices })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarReport {
    /// `(A^p - I)^q = 0` on degree one.
    pub precondition: bool,
    /// Number of random pairs on which the identity was checked.
    pub identity_checks: usize,
    /// `Var[x, y] = [Var x, Var y] + [Var x, y] + [x, Var y]` on all of them.
    pub identity_holds: bool,
    /// Per degree `k`: smallest `r` with `Var^r = 0` on `gr^k`, if any.
    pub nilpotency: Vec<Option<u32>>,
    /// Per degree `k`: the a-priori bound `k (q - 1) + 1`.
    pub bounds: Vec<u32>,
}

impl VarReport {
    pub fn passed(&self) -> bool {
        self.precondition
            && self.identity_holds
            && self
                .nilpotency
                .iter()
                .zip(&self.bounds)
                .all(|(r, b)| r.is_some_and(|r| r <= *b))
    }
}

fn nilpotency_order(m: &QMatrix) -> Option<u32> {
    let mut power = QMatrix::identity(m.rows());
    for r in 0..=m.rows() as u32 {
        if power.is_zero() {
            return Some(r);
        }
        power = &power * m;
    }
    None
}

/// Checks the `Var = A^p - id` identity on degree two and nilpotency of
/// `Var` on every graded piece up to `K`.
pub fn var_check(
    alg: &GradedFreeLie,
    a: &QMatrix,
    p: u32,
    q: u32,
    checks: usize,
    seed: u64,
) -> Result<VarReport> {
    let n = alg.generators();
    let var1 = &a.pow(p) - &QMatrix::identity(n);
    let precondition = var1.pow(q).is_zero();
    let auto = extend_automorphism(alg, a)?;
    let vars: Vec<QMatrix> = (1..=alg.max_degree())
        .map(|k| &auto.degree(k).pow(p) - &QMatrix::identity(alg.dim(k)))
        .collect();
    let bounds: Vec<u32> = (1..=alg.max_degree() as u32)
        .map(|k| k * q.saturating_sub(1) + 1)
        .collect();

    let mut identity_holds = true;
    let mut identity_checks = 0;
    if alg.max_degree() >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..checks {
            let x: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
            let y: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
            let vx = var1.mul_vec(&x);
            let vy = var1.mul_vec(&y);
            let lhs = vars[1].mul_vec(&alg.bracket(1, &x, 1, &y)?);
            let terms = [
                alg.bracket(1, &vx, 1, &vy)?,
                alg.bracket(1, &vx, 1, &y)?,
                alg.bracket(1, &x, 1, &vy)?,
            ];
            let rhs: Vec<Rational> = (0..lhs.len())
                .map(|i| terms.iter().map(|t| &t[i]).sum())
                .collect();
            identity_checks += 1;
            identity_holds &= lhs == rhs;
        }
    }
    Ok(VarReport {
        precondition,
        identity_checks,
        identity_holds,
        nilpotency: vars.iter().map(nilpotency_order).collect(),
        bounds,
    })
}

/// Quasi-unipotence of the induced map on each `gr^k`.
pub fn induced_quasiunipotence(
    alg: &GradedFreeLie,
    a: &QMatrix,
) -> Result<Vec<QuasiUnipotence>> {
    let auto = extend_automorphism(alg, a)?;
    (1..=alg.max_degree())
        .map(|k| is_quasiunipotent(auto.degree(k)))
        .collect()
}
