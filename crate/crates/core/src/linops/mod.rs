//! Dense complex linear algebra: validated operator types, Hermitian
//! eigendecomposition, propagators, tensor products and partial traces.

mod eigen;
mod matrix;
mod operators;

pub use eigen::{herm_eig, hermitian_eigenvalues, EigenSystem};
pub use matrix::{ComplexMatrix, C64};
pub use operators::{unitarity_residual, DensityMatrix, HermitianOperator, Tolerances, UnitaryOperator};

use crate::error::{Error, Result};

/// Pauli matrices.
pub mod pauli {
    use super::{ComplexMatrix, HermitianOperator, C64};

    pub fn x() -> HermitianOperator {
        HermitianOperator::from_trusted(ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]))
    }

    pub fn y() -> HermitianOperator {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        });
        HermitianOperator::from_trusted(m)
    }

    pub fn z() -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&[1.0, -1.0])
    }
}

/// `e^{-itH}` via the eigendecomposition of `h`.
pub fn propagator(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "time must be finite".into(),
        });
    }
    Ok(herm_eig(h).propagator(t))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &a.matmul(b) - &b.matmul(a)
}

/// `[a, [b, rho]]`.
pub fn double_commutator(a: &ComplexMatrix, b: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    commutator(a, &commutator(b, rho))
}

fn check_bipartite(dim: usize, first: usize, second: usize) -> Result<()> {
    if first == 0 || second == 0 || first * second != dim {
        return Err(Error::DimensionMismatch {
            expected: first * second,
            found: dim,
        });
    }
    Ok(())
}

/// Traces out the environment of a system ⊗ environment matrix:
/// `(ρ_S)_{ij} = Σ_k ρ_{(i,k),(j,k)}` with composite index `i·dim_e + k`.
pub fn partial_trace_env_matrix(rho: &ComplexMatrix, dim_s: usize, dim_e: usize) -> Result<ComplexMatrix> {
    check_bipartite(rho.rows(), dim_s, dim_e)?;
    Ok(ComplexMatrix::from_fn(dim_s, dim_s, |i, j| {
        (0..dim_e).map(|k| rho[(i * dim_e + k, j * dim_e + k)]).sum()
    }))
}

/// Traces out the environment of an environment ⊗ system matrix, the layout in
/// which the embedded Hamiltonian is block diagonal: composite index
/// `k·dim_s + i`.
pub fn partial_trace_env_leading_matrix(rho: &ComplexMatrix, dim_e: usize, dim_s: usize) -> Result<ComplexMatrix> {
    check_bipartite(rho.rows(), dim_s, dim_e)?;
    Ok(ComplexMatrix::from_fn(dim_s, dim_s, |i, j| {
        (0..dim_e).map(|k| rho[(k * dim_s + i, k * dim_s + j)]).sum()
    }))
}

/// Reduced system state of a system ⊗ environment state.
pub fn partial_trace_env(rho_total: &DensityMatrix, dim_s: usize, dim_e: usize) -> Result<DensityMatrix> {
    partial_trace_env_matrix(rho_total.as_matrix(), dim_s, dim_e).map(DensityMatrix::from_trusted)
}

/// Reduced system state of an environment ⊗ system state.
pub fn partial_trace_env_leading(rho_total: &DensityMatrix, dim_e: usize, dim_s: usize) -> Result<DensityMatrix> {
    partial_trace_env_leading_matrix(rho_total.as_matrix(), dim_e, dim_s).map(DensityMatrix::from_trusted)
}

/// `½ Σ |λ_k(a − b)|`, clamped to [0, 1].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    trace_distance_matrix(a.as_matrix(), b.as_matrix())
}

/// Trace distance of two Hermitian matrices that need not be valid states.
pub fn trace_distance_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.rows(), b.rows(), "trace distance of states with different dimensions");
    let diff = a - b;
    let sum: f64 = hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum();
    (0.5 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn propagator_of_zero_is_identity() {
        let u = propagator(&HermitianOperator::zero(3), 2.7).unwrap();
        assert_eq!(u.as_matrix(), &ComplexMatrix::identity(3));
    }

    #[test]
    fn propagator_sigma_z_quarter_turn() {
        let u = propagator(&pauli::z(), PI / 2.0).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c(0.0, -1.0), c(0.0, 1.0)]);
        assert!(u.as_matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn propagator_sigma_x_half_turn_is_minus_identity() {
        let u = propagator(&pauli::x(), PI).unwrap();
        let expected = ComplexMatrix::identity(2).scale_real(-1.0);
        assert!(u.as_matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn propagator_rejects_non_finite_time() {
        assert!(propagator(&pauli::x(), f64::INFINITY).is_err());
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)), ComplexMatrix::identity(6));
        let zero_proj = DensityMatrix::basis_state(2, 0).into_matrix();
        let k = kron(pauli::z().as_matrix(), &zero_proj);
        assert_eq!(k, ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0, 0.0]));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho_s = DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(0.7, 0.0),
            (1, 1) => c(0.3, 0.0),
            (0, 1) => c(0.1, 0.2),
            _ => c(0.1, -0.2),
        }))
        .unwrap();
        let env = DensityMatrix::basis_state(3, 0);
        let total = DensityMatrix::new(kron(rho_s.as_matrix(), env.as_matrix())).unwrap();
        let reduced = partial_trace_env(&total, 2, 3).unwrap();
        assert!(reduced.as_matrix().max_abs_diff(rho_s.as_matrix()) < 1e-15);

        let leading = DensityMatrix::new(kron(env.as_matrix(), rho_s.as_matrix())).unwrap();
        let reduced = partial_trace_env_leading(&leading, 3, 2).unwrap();
        assert!(reduced.as_matrix().max_abs_diff(rho_s.as_matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = 1.0 / 2.0_f64.sqrt();
        let bell = DensityMatrix::pure(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let reduced = partial_trace_env(&bell, 2, 2).unwrap();
        assert!(reduced.as_matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).as_matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(6);
        assert!(matches!(partial_trace_env(&rho, 4, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = DensityMatrix::basis_state(2, 0);
        let one = DensityMatrix::basis_state(2, 1);
        assert_eq!(trace_distance(&zero, &zero), 0.0);
        assert!((trace_distance(&zero, &one) - 1.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &DensityMatrix::maximally_mixed(2)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let zz = commutator(pauli::z().as_matrix(), pauli::z().as_matrix());
        assert_eq!(zz.max_abs(), 0.0);
        let xy = commutator(pauli::x().as_matrix(), pauli::y().as_matrix());
        let expected = pauli::z().as_matrix().scale(c(0.0, 2.0));
        assert!(xy.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn double_commutator_of_dephasing_on_coherence() {
        // [σz, [σz, |+⟩⟨+|]] has off-diagonals 4·ρ01 and zero diagonal.
        let plus = DensityMatrix::plus(2);
        let dc = double_commutator(pauli::z().as_matrix(), pauli::z().as_matrix(), plus.as_matrix());
        assert_eq!(dc[(0, 0)], c(0.0, 0.0));
        assert!((dc[(0, 1)] - c(2.0, 0.0)).norm() < 1e-15);
    }
}
