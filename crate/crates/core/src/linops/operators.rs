use alloc::vec::Vec;

use super::eigen::hermitian_eigenvalues;
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Validation thresholds shared by every checked constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative bound on ‖A − A†‖_max, scaled by max(1, ‖A‖_max).
    pub hermiticity: f64,
    /// Absolute bound on ‖U†U − 1‖_max.
    pub unitarity: f64,
    /// Absolute bound on |Tr ρ − 1|.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a state is `-positivity`.
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            unitarity: 1e-10,
            trace: 1e-12,
            positivity: 1e-10,
        }
    }
}

fn require_square(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn require_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    require_square(m)?;
    let deviation = m.hermiticity_residual();
    if deviation > tol.hermiticity * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// A Hermitian operator with units of energy (ħ = 1).
///
/// Stored exactly Hermitian: accepted inputs are replaced by their Hermitian
/// part, so sums and real multiples stay exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        require_hermitian(&m, tol)?;
        Ok(Self(m.hermitian_part()))
    }

    pub fn zero(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(diag))
    }

    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }
}

/// A unitary operator, such as a propagator or a Kraus generator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator(ComplexMatrix);

impl UnitaryOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        require_square(&m)?;
        let deviation = unitarity_residual(&m);
        if deviation > tol.unitarity {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(unitarity_residual(&m) < 1e-9);
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.dagger())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0.matmul(&other.0))
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.0.conjugate(rho)
    }
}

/// ‖U†U − 1‖_max.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let gram = u.dagger().matmul(u);
    gram.max_abs_diff(&ComplexMatrix::identity(u.cols()))
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
///
/// States produced by master-equation integration carry the Hermiticity and
/// trace guarantees only; Redfield dynamics can leave the positive cone.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        require_hermitian(&m, tol)?;
        let m = m.hermitian_part();
        let trace = m.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::TraceNotOne { trace });
        }
        let min_eigenvalue = hermitian_eigenvalues(&m)[0];
        if min_eigenvalue < -tol.positivity {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self(m))
    }

    /// Projector onto a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::InvalidParameter {
                name: "psi",
                reason: "state vector is empty".into(),
            });
        }
        let norm = libm::sqrt(psi.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter {
                name: "psi",
                reason: "state vector has zero or non-finite norm".into(),
            });
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        let m = ComplexMatrix::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj());
        Ok(Self(m.hermitian_part()))
    }

    /// Computational basis projector |k⟩⟨k|.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self(m)
    }

    /// Uniform superposition (1/√d) Σ_k |k⟩.
    pub fn plus(dim: usize) -> Self {
        let amp = 1.0 / dim as f64;
        Self(ComplexMatrix::from_fn(dim, dim, |_, _| C64::new(amp, 0.0)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Wraps a matrix produced by trace- and Hermiticity-preserving numerics.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.0)[0]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.0)
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.0.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == ZERO))
    }
}
