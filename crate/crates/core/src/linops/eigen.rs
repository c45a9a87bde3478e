//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Jacobi is slow asymptotically but the dimensions here are small, it yields
//! eigenvectors orthonormal to machine precision, and it never touches exact
//! zeros, so block-diagonal inputs stay block-diagonal throughout.

use alloc::vec::Vec;


use super::matrix::{ComplexMatrix, C64, ZERO};
use super::operators::{HermitianOperator, UnitaryOperator};

const MAX_SWEEPS: usize = 100;

/// Ascending spectrum and eigenvectors of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    energies: Vec<f64>,
    basis: UnitaryOperator,
}

impl EigenSystem {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns.
    pub fn basis(&self) -> &UnitaryOperator {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn spectral_span(&self) -> f64 {
        match (self.energies.first(), self.energies.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Gaps at or below this value are treated as degeneracies.
    pub fn degeneracy_threshold(&self) -> f64 {
        1e-12 * self.spectral_span().max(1.0)
    }

    pub fn max_abs_energy(&self) -> f64 {
        self.energies.iter().fold(0.0, |acc, e| acc.max(e.abs()))
    }

    /// `V† A V`: the matrix of `a` in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = self.basis.as_matrix();
        v.dagger().matmul(a).matmul(v)
    }

    /// `V A V†`: back from the eigenbasis.
    pub fn from_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.basis.as_matrix().conjugate(a)
    }

    /// `V diag(E) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.from_eigenbasis(&ComplexMatrix::from_real_diagonal(&self.energies))
    }

    /// Phases `e^{-i t E_n}`.
    pub fn phases(&self, t: f64) -> Vec<C64> {
        self.energies
            .iter()
            .map(|&e| C64::new(0.0, -t * e).exp())
            .collect()
    }

    /// `e^{-itH} = V diag(e^{-itE_n}) V†`.
    pub fn propagator(&self, t: f64) -> UnitaryOperator {
        let v = self.basis.as_matrix();
        let phases = self.phases(t);
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * phases[j]);
        UnitaryOperator::from_trusted(scaled.matmul_adjoint(v))
    }
}

/// Eigendecomposition of a Hermitian operator.
pub fn herm_eig(h: &HermitianOperator) -> EigenSystem {
    let (energies, vectors) = jacobi(h.as_matrix(), true);
    EigenSystem {
        energies,
        basis: UnitaryOperator::from_trusted(vectors.expect("vectors requested")),
    }
}

/// Eigenvalues only, ascending. The input is assumed Hermitian; only its
/// Hermitian part is used.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    jacobi(&a.hermitian_part(), false).0
}

fn jacobi(input: &ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = input.rows();
    let mut a = input.hermitian_part();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == ZERO {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let mag = apq.norm();
                let g = 100.0 * mag;
                if alpha.abs() + g == alpha.abs() && beta.abs() + g == beta.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;

                let diff = beta - alpha;
                let t = if diff.abs() + g == diff.abs() {
                    mag / diff
                } else {
                    let theta = 0.5 * diff / mag;
                    let t = 1.0 / (theta.abs() + libm::sqrt(1.0 + theta * theta));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                // Rotation J = D R with D = diag(1, conj(phase)) so that the
                // (p, q) entry of D† A D is real and positive.
                let phase = apq / mag;
                let j_pp = C64::new(c, 0.0);
                let j_pq = C64::new(s, 0.0);
                let j_qp = -phase.conj() * s;
                let j_qq = phase.conj() * c;

                apply_right(&mut a, p, q, j_pp, j_pq, j_qp, j_qq);
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                if let Some(v) = v.as_mut() {
                    apply_right(v, p, q, j_pp, j_pq, j_qp, j_qq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let energies = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    (energies, vectors)
}

/// Columns p and q of `m` replaced by `m J`.
#[inline]
fn apply_right(m: &mut ComplexMatrix, p: usize, q: usize, j_pp: C64, j_pq: C64, j_qp: C64, j_qq: C64) {
    for k in 0..m.rows() {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        if mkp == ZERO && mkq == ZERO {
            continue;
        }
        m[(k, p)] = mkp * j_pp + mkq * j_qp;
        m[(k, q)] = mkp * j_pq + mkq * j_qq;
    }
}
