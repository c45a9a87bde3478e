//! Disorder ensembles `{(H_λ, p_λ)}`: construction, centering, quadrature
//! discretization of Gaussian disorder, and the two-point correlation of the
//! level gaps.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linops::{commutator, herm_eig, ComplexMatrix, EigenSystem, HermitianOperator};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
const MEAN_TOLERANCE: f64 = 1e-12;
const COMMUTATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub hamiltonian: HermitianOperator,
    pub weight: f64,
}

/// A finite, normalized ensemble of Hamiltonians.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderEnsemble {
    dim: usize,
    realizations: Vec<Realization>,
}

impl DisorderEnsemble {
    pub fn new(realizations: Vec<(HermitianOperator, f64)>) -> Result<Self> {
        let dim = realizations.first().ok_or(Error::EmptyEnsemble)?.0.dim();
        let mut sum = 0.0;
        for (index, (h, w)) in realizations.iter().enumerate() {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidWeight { index, weight: *w });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::WeightsNotNormalized { sum });
        }
        Ok(Self {
            dim,
            realizations: realizations
                .into_iter()
                .map(|(hamiltonian, weight)| Realization { hamiltonian, weight })
                .collect(),
        })
    }

    /// `{(+g·base, ½), (−g·base, ½)}`.
    pub fn two_point(base: &HermitianOperator, g: f64) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::InvalidParameter {
                name: "g",
                reason: "coupling must be finite".into(),
            });
        }
        Self::new(alloc::vec![(base.scaled(g), 0.5), (base.scaled(-g), 0.5)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    pub fn realizations(&self) -> &[Realization] {
        &self.realizations
    }

    pub fn iter(&self) -> impl Iterator<Item = &Realization> {
        self.realizations.iter()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.realizations.iter().map(|r| r.weight).collect()
    }

    /// Largest ‖H_λ‖_max over the ensemble.
    pub fn max_abs(&self) -> f64 {
        self.realizations
            .iter()
            .fold(0.0, |acc, r| acc.max(r.hamiltonian.max_abs()))
    }

    /// Fails unless the weighted mean vanishes, relative to the realization scale.
    pub fn require_zero_mean(&self) -> Result<()> {
        let residual = mean_hamiltonian(self).max_abs();
        if residual > MEAN_TOLERANCE * self.max_abs().max(1.0) {
            return Err(Error::NonZeroMean { residual });
        }
        Ok(())
    }

    /// Fails with the first realization violating `‖[H_λ, H_S]‖_max ≤ 1e-10 ‖H_λ‖_max ‖H_S‖_max`.
    pub fn require_commuting(&self, hs: &ComplexMatrix) -> Result<()> {
        let hs_scale = hs.max_abs();
        for (index, r) in self.realizations.iter().enumerate() {
            let h = r.hamiltonian.as_matrix();
            let residual = commutator(h, hs).max_abs();
            let allowed = COMMUTATION_TOLERANCE * h.max_abs() * hs_scale;
            if residual > allowed {
                return Err(Error::NonCommuting {
                    index,
                    residual,
                    allowed,
                });
            }
        }
        Ok(())
    }
}

/// An ensemble with its weighted mean split off: `H_λ = mean + centered_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredEnsemble {
    pub mean: HermitianOperator,
    pub ensemble: DisorderEnsemble,
}

impl CenteredEnsemble {
    /// System Hamiltonian with the mean folded in, `H_S + mean`.
    pub fn fold_into(&self, hs: &HermitianOperator) -> HermitianOperator {
        hs.plus(&self.mean)
    }
}

/// `Σ_λ p_λ H_λ`, accumulated in realization order.
pub fn mean_hamiltonian(e: &DisorderEnsemble) -> HermitianOperator {
    let mut acc = ComplexMatrix::zeros(e.dim, e.dim);
    for r in &e.realizations {
        acc.add_scaled(r.weight.into(), r.hamiltonian.as_matrix());
    }
    HermitianOperator::from_trusted(acc)
}

/// Moves the weighted mean out of the realizations.
pub fn center(e: &DisorderEnsemble) -> CenteredEnsemble {
    let mean = mean_hamiltonian(e);
    let realizations = e
        .realizations
        .iter()
        .map(|r| Realization {
            hamiltonian: r.hamiltonian.minus(&mean),
            weight: r.weight,
        })
        .collect();
    CenteredEnsemble {
        mean,
        ensemble: DisorderEnsemble {
            dim: e.dim,
            realizations,
        },
    }
}

/// Standard Gauss–Hermite nodes `x_k` and weights `v_k` for `∫ e^{-x²} f(x) dx`,
/// by Golub–Welsch on the symmetric Jacobi matrix of the Hermite recurrence.
/// Nodes ascend and are symmetrized about zero.
pub fn gauss_hermite_rule(n_nodes: usize) -> Result<Vec<(f64, f64)>> {
    if n_nodes == 0 {
        return Err(Error::InvalidParameter {
            name: "n_nodes",
            reason: "at least one node is required".into(),
        });
    }
    let jacobi = ComplexMatrix::from_fn(n_nodes, n_nodes, |i, j| {
        if i.abs_diff(j) == 1 {
            libm::sqrt(0.5 * i.max(j) as f64).into()
        } else {
            0.0.into()
        }
    });
    let eig = herm_eig(&HermitianOperator::from_trusted(jacobi));
    let sqrt_pi = libm::sqrt(core::f64::consts::PI);
    let v = eig.basis().as_matrix();
    let raw: Vec<(f64, f64)> = eig
        .energies()
        .iter()
        .enumerate()
        .map(|(k, &x)| (x, v[(0, k)].norm_sqr() * sqrt_pi))
        .collect();

    let mut rule = raw.clone();
    for k in 0..n_nodes {
        let mirror = n_nodes - 1 - k;
        let x = 0.5 * (raw[k].0 - raw[mirror].0);
        let w = 0.5 * (raw[k].1 + raw[mirror].1);
        rule[k] = (if k == mirror { 0.0 } else { x }, w);
    }
    Ok(rule)
}

/// Discretizes `λ ~ N(0, σ²)` with `H_λ = λ·base` on an `n_nodes` Gauss–Hermite
/// rule: `λ_k = σ√2·x_k`, `p_k = v_k/√π`.
pub fn gauss_hermite_ensemble(base: &HermitianOperator, sigma: f64, n_nodes: usize) -> Result<DisorderEnsemble> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: alloc::format!("must be positive and finite, got {sigma}"),
        });
    }
    let rule = gauss_hermite_rule(n_nodes)?;
    let sqrt_pi = libm::sqrt(core::f64::consts::PI);
    let total: f64 = rule.iter().map(|(_, v)| v / sqrt_pi).sum();
    let scale = sigma * core::f64::consts::SQRT_2;
    DisorderEnsemble::new(
        rule.iter()
            .map(|&(x, v)| (base.scaled(scale * x), v / sqrt_pi / total))
            .collect(),
    )
}

/// Equal-weight Monte-Carlo sample of `λ ~ N(0, σ²)`, `H_λ = λ·base`.
/// Only meant as a seeded cross-check of the quadrature ensembles.
pub fn monte_carlo_gaussian_ensemble<R: Rng + ?Sized>(
    base: &HermitianOperator,
    sigma: f64,
    samples: usize,
    rng: &mut R,
) -> Result<DisorderEnsemble> {
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "at least one sample is required".into(),
        });
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: alloc::format!("must be positive and finite, got {sigma}"),
        });
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated above");
    let w = 1.0 / samples as f64;
    let mut realizations: Vec<_> = (0..samples)
        .map(|_| (base.scaled(normal.sample(rng)), w))
        .collect();
    // Absorb the rounding of Σ 1/N so the weights pass normalization for any N.
    let sum: f64 = realizations.iter().map(|r| r.1).sum();
    realizations.iter_mut().for_each(|r| r.1 /= sum);
    DisorderEnsemble::new(realizations)
}

/// Two-point correlation of the level gaps,
/// `C₂(n, m) = Σ_λ p_λ (E_n^λ − E_m^λ)²`, with `E_n^λ = ⟨n|H_λ|n⟩` in the
/// eigenbasis of the system Hamiltonian described by `eig`.
///
/// Every realization must commute with that Hamiltonian.
pub fn c2(e: &DisorderEnsemble, eig: &EigenSystem, n: usize, m: usize) -> Result<f64> {
    if e.dim() != eig.dim() {
        return Err(Error::DimensionMismatch {
            expected: eig.dim(),
            found: e.dim(),
        });
    }
    if n >= eig.dim() || m >= eig.dim() {
        return Err(Error::InvalidParameter {
            name: "n, m",
            reason: alloc::format!("level index out of range for dimension {}", eig.dim()),
        });
    }
    e.require_commuting(&eig.reconstruct())?;
    if n == m {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (index, r) in e.iter().enumerate() {
        let diag = eig.to_eigenbasis(r.hamiltonian.as_matrix());
        let off = offdiagonal_max(&diag);
        if off > COMMUTATION_TOLERANCE * r.hamiltonian.max_abs().max(1.0) {
            return Err(Error::InvalidParameter {
                name: "ensemble",
                reason: alloc::format!(
                    "realization {index} is not diagonal in the eigenbasis of the degenerate system Hamiltonian (off-diagonal {off:.3e})"
                ),
            });
        }
        let gap = diag[(n, n)].re - diag[(m, m)].re;
        sum += r.weight * gap * gap;
    }
    Ok(sum)
}

fn offdiagonal_max(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)].norm())
        .fold(0.0, f64::max)
}
