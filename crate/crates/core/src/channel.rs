//! Exact reduced dynamics in three equivalent forms.
//!
//! * Kraus form: `Λ[ρ] = Σ_λ K_λ ρ K_λ†` with `K_λ = √p_λ U_λ(t)`.
//! * Ensemble average: `Σ_λ p_λ U_λ(t) ρ U_λ(t)†`, `U_λ(t) = e^{-it(H_S + H_λ)}`.
//! * Embedding: the system coupled to a static environment whose basis states
//!   label the realizations. The total Hamiltonian is block diagonal with
//!   blocks `H_S + H_λ`, the environment starts in `diag(p_λ)`, and the
//!   reduced state is recovered by tracing the environment out.
//!
//! The environment Hamiltonian commutes with the coupling and the initial
//! environment state is stationary, so it drops out and is not represented.

use alloc::vec::Vec;

use crate::ensemble::DisorderEnsemble;
use crate::error::{Error, Result};
use crate::linops::{
    herm_eig, partial_trace_env_leading_matrix, ComplexMatrix, DensityMatrix, EigenSystem, HermitianOperator,
    UnitaryOperator,
};

/// Largest total dimension `d_S · d_E` the embedding will materialize.
pub const MAX_EMBEDDED_DIM: usize = 4096;

const COMPLETENESS_TOLERANCE: f64 = 1e-10;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Precomputed eigensystems of every block `H_S + H_λ`, for evaluating the
/// ensemble average at many times.
#[derive(Debug, Clone)]
pub struct AverageEvolver {
    blocks: Vec<EigenSystem>,
    weights: Vec<f64>,
}

impl AverageEvolver {
    pub fn new(hs: &HermitianOperator, e: &DisorderEnsemble) -> Result<Self> {
        check_dim(hs.dim(), e.dim())?;
        Ok(Self {
            blocks: e.iter().map(|r| herm_eig(&hs.plus(&r.hamiltonian))).collect(),
            weights: e.weights(),
        })
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// One summand `p_λ U_λ(t) ρ U_λ(t)†`.
    pub fn term(&self, index: usize, rho0: &DensityMatrix, t: f64) -> ComplexMatrix {
        let u = self.blocks[index].propagator(t);
        u.conjugate(rho0.as_matrix()).scale_real(self.weights[index])
    }

    /// Sums per-realization terms in index order. Any caller that computes the
    /// terms elsewhere (e.g. in parallel) gets bit-identical results as long as
    /// it hands them over in the same order.
    pub fn accumulate<I: IntoIterator<Item = ComplexMatrix>>(dim: usize, terms: I) -> DensityMatrix {
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for term in terms {
            acc += &term;
        }
        DensityMatrix::from_trusted(acc)
    }

    pub fn state_at(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        check_dim(self.dim(), rho0.dim())?;
        Ok(Self::accumulate(self.dim(), (0..self.len()).map(|k| self.term(k, rho0, t))))
    }
}

/// Ensemble-averaged evolution `Σ_λ p_λ U_λ(t) ρ0 U_λ(t)†`.
pub fn evolve_average(
    hs: &HermitianOperator,
    e: &DisorderEnsemble,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    AverageEvolver::new(hs, e)?.state_at(rho0, t)
}

/// System embedded in a static environment of `dim_e` levels, one per
/// realization, in environment ⊗ system ordering so that the total
/// Hamiltonian is block diagonal.
#[derive(Debug, Clone)]
pub struct EmbeddedSystem {
    dim_s: usize,
    dim_e: usize,
    total_hamiltonian: HermitianOperator,
    weights: Vec<f64>,
}

impl EmbeddedSystem {
    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn total_hamiltonian(&self) -> &HermitianOperator {
        &self.total_hamiltonian
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Block `k` of the total Hamiltonian.
    pub fn block(&self, k: usize) -> ComplexMatrix {
        let h = self.total_hamiltonian.as_matrix();
        let off = k * self.dim_s;
        ComplexMatrix::from_fn(self.dim_s, self.dim_s, |i, j| h[(off + i, off + j)])
    }

    /// Largest entry outside the diagonal blocks.
    pub fn off_block_max(&self) -> f64 {
        let h = self.total_hamiltonian.as_matrix();
        let n = h.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i / self.dim_s != j / self.dim_s {
                    worst = worst.max(h[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Initial total state `diag(p) ⊗ ρ0` in environment ⊗ system ordering.
    pub fn initial_state(&self, rho0_s: &DensityMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim_s, rho0_s.dim())?;
        let env = ComplexMatrix::from_real_diagonal(&self.weights);
        Ok(crate::linops::kron(&env, rho0_s.as_matrix()))
    }
}

/// Builds the block-diagonal total Hamiltonian `Σ_λ |λ⟩⟨λ| ⊗ (H_S + H_λ)`.
pub fn embed(hs: &HermitianOperator, e: &DisorderEnsemble) -> Result<EmbeddedSystem> {
    check_dim(hs.dim(), e.dim())?;
    let dim_s = hs.dim();
    let dim_e = e.len();
    let dim = dim_s * dim_e;
    if dim > MAX_EMBEDDED_DIM {
        return Err(Error::TooLarge {
            dim,
            limit: MAX_EMBEDDED_DIM,
        });
    }
    let mut total = ComplexMatrix::zeros(dim, dim);
    for (k, r) in e.iter().enumerate() {
        let block = hs.plus(&r.hamiltonian);
        let off = k * dim_s;
        for i in 0..dim_s {
            for j in 0..dim_s {
                total[(off + i, off + j)] = block.as_matrix()[(i, j)];
            }
        }
    }
    Ok(EmbeddedSystem {
        dim_s,
        dim_e,
        total_hamiltonian: HermitianOperator::from_trusted(total),
        weights: e.weights(),
    })
}

/// Evolves the embedded system with the full propagator `e^{-itH}` and traces
/// out the environment. The total eigensystem and the initial state in that
/// eigenbasis are computed once.
#[derive(Debug, Clone)]
pub struct EmbeddedEvolver {
    dim_s: usize,
    dim_e: usize,
    eig: EigenSystem,
    rho0_eigenbasis: ComplexMatrix,
}

impl EmbeddedEvolver {
    pub fn new(sys: &EmbeddedSystem, rho0_s: &DensityMatrix) -> Result<Self> {
        let eig = herm_eig(sys.total_hamiltonian());
        let rho0 = sys.initial_state(rho0_s)?;
        let rho0_eigenbasis = eig.to_eigenbasis(&rho0);
        Ok(Self {
            dim_s: sys.dim_s,
            dim_e: sys.dim_e,
            eig,
            rho0_eigenbasis,
        })
    }

    /// Total state `U(t) ρ_0 U(t)†`.
    pub fn total_state_at(&self, t: f64) -> ComplexMatrix {
        let phases = self.eig.phases(t);
        let evolved = ComplexMatrix::from_fn(self.rho0_eigenbasis.rows(), self.rho0_eigenbasis.cols(), |i, j| {
            phases[i] * self.rho0_eigenbasis[(i, j)] * phases[j].conj()
        });
        self.eig.from_eigenbasis(&evolved)
    }

    pub fn state_at(&self, t: f64) -> DensityMatrix {
        let total = self.total_state_at(t);
        let reduced = partial_trace_env_leading_matrix(&total, self.dim_e, self.dim_s)
            .expect("dimensions fixed at construction");
        DensityMatrix::from_trusted(reduced)
    }
}

/// Reduced system state of the embedded dynamics at time `t`.
pub fn evolve_embedded(sys: &EmbeddedSystem, rho0_s: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    Ok(EmbeddedEvolver::new(sys, rho0_s)?.state_at(t))
}

/// A channel in Kraus form whose elements are scaled unitaries.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    terms: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds the channel `{√p_λ W_λ}`; fails if the weights are not a
    /// probability vector or completeness is violated.
    pub fn from_unitaries(unitaries: Vec<(UnitaryOperator, f64)>) -> Result<Self> {
        let dim = unitaries.first().ok_or(Error::EmptyEnsemble)?.0.dim();
        let mut terms = Vec::with_capacity(unitaries.len());
        for (index, (u, p)) in unitaries.into_iter().enumerate() {
            check_dim(dim, u.dim())?;
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidWeight { index, weight: p });
            }
            terms.push(u.into_matrix().scale_real(libm::sqrt(p)));
        }
        let channel = Self { terms };
        let residual = channel.completeness_residual();
        if residual > COMPLETENESS_TOLERANCE {
            let sum = channel.terms.iter().map(|k| k.dagger().matmul(k).trace().re).sum::<f64>() / dim as f64;
            return Err(Error::WeightsNotNormalized { sum });
        }
        Ok(channel)
    }

    pub fn terms(&self) -> &[ComplexMatrix] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.terms[0].rows()
    }

    /// ‖Σ K†K − 1‖_max.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for k in &self.terms {
            acc += &k.dagger().matmul(k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(n))
    }
}

/// Kraus elements `√p_λ U_λ(t)` of the ensemble channel at time `t`.
pub fn kraus_at(hs: &HermitianOperator, e: &DisorderEnsemble, t: f64) -> Result<KrausChannel> {
    check_dim(hs.dim(), e.dim())?;
    let unitaries = e
        .iter()
        .map(|r| (herm_eig(&hs.plus(&r.hamiltonian)).propagator(t), r.weight))
        .collect();
    KrausChannel::from_unitaries(unitaries)
}

/// `Σ_k K_k ρ K_k†`.
pub fn apply_kraus(k: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dim(k.dim(), rho.dim())?;
    let mut acc = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for term in &k.terms {
        acc += &term.conjugate(rho.as_matrix());
    }
    Ok(DensityMatrix::from_trusted(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{center, DisorderEnsemble};
    use crate::linops::{pauli, trace_distance, C64};
    use alloc::vec;

    #[test]
    fn evolvers_can_cross_threads() {
        fn check<T: Send + Sync>() {}
        check::<AverageEvolver>();
        check::<EmbeddedEvolver>();
        check::<KrausChannel>();
    }

    fn qubit_hs() -> HermitianOperator {
        pauli::z().scaled(0.5)
    }

    #[test]
    fn single_zero_realization_is_plain_unitary() {
        let e = DisorderEnsemble::new(vec![(HermitianOperator::zero(2), 1.0)]).unwrap();
        let hs = pauli::x().scaled(0.8);
        let rho0 = DensityMatrix::basis_state(2, 0);
        let t = 1.3;
        let got = evolve_average(&hs, &e, &rho0, t).unwrap();
        let u = herm_eig(&hs).propagator(t);
        assert!(got.as_matrix().max_abs_diff(&u.conjugate(rho0.as_matrix())) < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_fixed() {
        let e = DisorderEnsemble::two_point(&pauli::x(), 0.4).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        for t in [0.0, 0.5, 3.0] {
            let got = evolve_average(&qubit_hs(), &e, &mixed, t).unwrap();
            assert!(got.as_matrix().max_abs_diff(mixed.as_matrix()) < 1e-15);
        }
    }

    #[test]
    fn two_point_sigma_z_coherence_closed_form() {
        // ρ01(t) = ½ (e^{-it(1+2g)} + e^{-it(1-2g)})/2 = ½ e^{-it} cos(2gt)
        let g = 0.3;
        let e = DisorderEnsemble::two_point(&pauli::z(), g).unwrap();
        for t in [0.0, 0.7, 2.5, 9.0] {
            let rho = evolve_average(&qubit_hs(), &e, &DensityMatrix::plus(2), t).unwrap();
            let expected = C64::new(0.0, -t).exp() * (0.5 * (2.0 * g * t).cos());
            assert!((rho.element(0, 1) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn embed_shapes_and_blocks() {
        let e = DisorderEnsemble::new(vec![
            (pauli::x().scaled(0.1), 0.2),
            (pauli::y().scaled(0.3), 0.3),
            (pauli::z().scaled(-0.2), 0.5),
        ])
        .unwrap();
        let sys = embed(&qubit_hs(), &e).unwrap();
        assert_eq!(sys.total_hamiltonian().dim(), 6);
        assert_eq!(sys.dim_e(), 3);
        assert_eq!(sys.off_block_max(), 0.0);
        for (k, r) in e.iter().enumerate() {
            assert_eq!(sys.block(k), *qubit_hs().plus(&r.hamiltonian).as_matrix());
        }
        assert_eq!(sys.weights(), &[0.2, 0.3, 0.5]);
    }

    #[test]
    fn zero_interaction_embedding_repeats_hs() {
        let e = DisorderEnsemble::new(vec![(HermitianOperator::zero(2), 0.5), (HermitianOperator::zero(2), 0.5)]).unwrap();
        let hs = pauli::x().scaled(0.6);
        let sys = embed(&hs, &e).unwrap();
        let expected = crate::linops::kron(&ComplexMatrix::identity(2), hs.as_matrix());
        assert_eq!(sys.total_hamiltonian().as_matrix(), &expected);
        let rho0 = DensityMatrix::basis_state(2, 1);
        let got = evolve_embedded(&sys, &rho0, 2.0).unwrap();
        let u = herm_eig(&hs).propagator(2.0);
        assert!(got.as_matrix().max_abs_diff(&u.conjugate(rho0.as_matrix())) < 1e-14);
    }

    #[test]
    fn centered_embedding_blocks_match_original() {
        let e = DisorderEnsemble::new(vec![(pauli::z().scaled(0.9), 0.25), (pauli::x().scaled(0.2), 0.75)]).unwrap();
        let hs = qubit_hs();
        let c = center(&e);
        let original = embed(&hs, &e).unwrap();
        let shifted = embed(&c.fold_into(&hs), &c.ensemble).unwrap();
        let diff = original
            .total_hamiltonian()
            .as_matrix()
            .max_abs_diff(shifted.total_hamiltonian().as_matrix());
        assert!(diff < 1e-15);
    }

    #[test]
    fn deterministic_environment_selects_one_block() {
        let e = DisorderEnsemble::new(vec![
            (pauli::x().scaled(0.4), 1.0),
            (pauli::y().scaled(0.3), 0.0),
            (pauli::z().scaled(0.2), 0.0),
        ])
        .unwrap();
        let sys = embed(&qubit_hs(), &e).unwrap();
        let rho0 = DensityMatrix::plus(2);
        let got = evolve_embedded(&sys, &rho0, 1.7).unwrap();
        let u = herm_eig(&qubit_hs().plus(&pauli::x().scaled(0.4))).propagator(1.7);
        assert!(got.as_matrix().max_abs_diff(&u.conjugate(rho0.as_matrix())) < 1e-14);
    }

    #[test]
    fn embedding_respects_memory_guard() {
        let e = DisorderEnsemble::new((0..2049).map(|_| (HermitianOperator::zero(2), 1.0 / 2049.0)).collect());
        let e = e.unwrap();
        assert!(matches!(embed(&qubit_hs(), &e), Err(Error::TooLarge { dim: 4098, .. })));
    }

    #[test]
    fn kraus_at_zero_is_identity_map() {
        let e = DisorderEnsemble::two_point(&pauli::y(), 0.7).unwrap();
        let k = kraus_at(&qubit_hs(), &e, 0.0).unwrap();
        let rho = DensityMatrix::plus(2);
        assert!(apply_kraus(&k, &rho).unwrap().as_matrix().max_abs_diff(rho.as_matrix()) < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        let k = kraus_at(&qubit_hs(), &e, 2.3).unwrap();
        assert!(apply_kraus(&k, &mixed).unwrap().as_matrix().max_abs_diff(mixed.as_matrix()) < 1e-15);
    }

    #[test]
    fn identity_and_dephasing_kraus_channels() {
        let id = KrausChannel::from_unitaries(vec![(UnitaryOperator::identity(2), 1.0)]).unwrap();
        let rho = DensityMatrix::plus(2);
        assert_eq!(apply_kraus(&id, &rho).unwrap(), rho);

        let z = UnitaryOperator::new(pauli::z().into_matrix()).unwrap();
        let k = KrausChannel::from_unitaries(vec![(z, 0.5), (UnitaryOperator::identity(2), 0.5)]).unwrap();
        let out = apply_kraus(&k, &rho).unwrap();
        assert!(out.as_matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).as_matrix()) < 1e-15);
    }

    #[test]
    fn kraus_rejects_incomplete_weights() {
        let k = KrausChannel::from_unitaries(vec![(UnitaryOperator::identity(2), 0.5)]);
        assert!(matches!(k, Err(Error::WeightsNotNormalized { .. })));
    }

    #[test]
    fn three_routes_agree_on_a_mixed_ensemble() {
        let e = DisorderEnsemble::new(vec![
            (pauli::x().scaled(0.3), 0.3),
            (pauli::y().scaled(-0.5), 0.3),
            (pauli::z().scaled(0.2).plus(&pauli::x().scaled(0.1)), 0.4),
        ])
        .unwrap();
        let rho0 = DensityMatrix::basis_state(2, 0);
        let sys = embed(&qubit_hs(), &e).unwrap();
        for t in [0.0, 0.4, 3.3] {
            let avg = evolve_average(&qubit_hs(), &e, &rho0, t).unwrap();
            let emb = evolve_embedded(&sys, &rho0, t).unwrap();
            let kr = apply_kraus(&kraus_at(&qubit_hs(), &e, t).unwrap(), &rho0).unwrap();
            assert!(trace_distance(&avg, &emb) < 1e-12);
            assert!(trace_distance(&avg, &kr) < 1e-13);
        }
    }
}
