//! Second-order master equations for the ensemble-averaged dynamics.
//!
//! All three generators share the form
//!
//! ```text
//! dρ/dt = −i[H_S, ρ] − Σ_λ p_λ [H_λ, [X_λ(t), ρ]]
//! ```
//!
//! and differ in the operator `X_λ`:
//!
//! * Redfield: `X_λ = H̃_λ(t) = ∫_0^t e^{−isH_S} H_λ e^{isH_S} ds`;
//! * pure dephasing (H_λ commuting with H_S): `X_λ = t·H_λ`;
//! * semigroup limit: `X_λ = Σ_mn R_mn ⟨m|H_λ|n⟩ |m⟩⟨n|` with the resolvent
//!   `R_mn = i/(E_n − E_m + iε)`, independent of time.
//!
//! The ensemble must have zero weighted mean; fold the mean into `H_S` with
//! [`crate::ensemble::center`] first.

mod integrate;
mod series;

pub use integrate::{integrate, recommended_max_dt};
pub use series::{time_grid, TimeSeries};

use alloc::vec::Vec;

use crate::ensemble::DisorderEnsemble;
use crate::error::{Error, Result};
use crate::linops::{commutator, double_commutator, herm_eig, ComplexMatrix, DensityMatrix, EigenSystem, HermitianOperator, C64};

/// Which master equation to solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    Redfield,
    Dephasing,
    /// Time-independent semigroup limit. `epsilon = 0` is the strict limit,
    /// where the divergent diagonal resolvent terms are dropped.
    Gksl { epsilon: f64 },
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Redfield => "redfield",
            GeneratorKind::Dephasing => "dephasing",
            GeneratorKind::Gksl { .. } => "gksl",
        }
    }
}

/// A master equation ready to be evaluated or integrated.
#[derive(Debug, Clone)]
pub struct MasterEqProblem {
    hs: HermitianOperator,
    ensemble: DisorderEnsemble,
    eig: EigenSystem,
    kind: GeneratorKind,
    /// `H_λ` in the eigenbasis of `H_S`.
    couplings_eigenbasis: Vec<ComplexMatrix>,
    /// Time-independent `X_λ` of the semigroup generator.
    gksl_operators: Vec<ComplexMatrix>,
}

impl MasterEqProblem {
    pub fn new(hs: HermitianOperator, ensemble: DisorderEnsemble, kind: GeneratorKind) -> Result<Self> {
        if hs.dim() != ensemble.dim() {
            return Err(Error::DimensionMismatch {
                expected: hs.dim(),
                found: ensemble.dim(),
            });
        }
        ensemble.require_zero_mean()?;
        let eig = herm_eig(&hs);
        let couplings_eigenbasis: Vec<_> = ensemble
            .iter()
            .map(|r| eig.to_eigenbasis(r.hamiltonian.as_matrix()))
            .collect();
        let gksl_operators = match kind {
            GeneratorKind::Dephasing => {
                ensemble.require_commuting(hs.as_matrix())?;
                Vec::new()
            }
            GeneratorKind::Redfield => Vec::new(),
            GeneratorKind::Gksl { epsilon } => {
                let r = gksl_resolvent(&eig, epsilon)?;
                couplings_eigenbasis
                    .iter()
                    .map(|h| eig.from_eigenbasis(&h.hadamard(&r)))
                    .collect()
            }
        };
        Ok(Self {
            hs,
            ensemble,
            eig,
            kind,
            couplings_eigenbasis,
            gksl_operators,
        })
    }

    pub fn hs(&self) -> &HermitianOperator {
        &self.hs
    }

    pub fn ensemble(&self) -> &DisorderEnsemble {
        &self.ensemble
    }

    pub fn eig(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.hs.dim()
    }

    fn require_kind(&self, expected: &'static str) -> Result<()> {
        if self.kind.name() != expected {
            return Err(Error::GeneratorMismatch {
                expected,
                found: self.kind.name(),
            });
        }
        Ok(())
    }

    /// Right-hand side of whichever generator this problem carries.
    pub fn rhs(&self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        match self.kind {
            GeneratorKind::Redfield => self.assemble(rho, |k| h_tilde_from_eigenbasis(&self.couplings_eigenbasis[k], &self.eig, t)),
            GeneratorKind::Dephasing => self.assemble(rho, |k| self.ensemble.realizations()[k].hamiltonian.as_matrix().scale_real(t)),
            GeneratorKind::Gksl { .. } => self.assemble(rho, |k| self.gksl_operators[k].clone()),
        }
    }

    /// `−i[H_S, ρ] − Σ_λ p_λ [H_λ, [X_λ, ρ]]`, summed in realization order.
    fn assemble(&self, rho: &ComplexMatrix, x: impl Fn(usize) -> ComplexMatrix) -> ComplexMatrix {
        let mut out = commutator(self.hs.as_matrix(), rho).scale(C64::new(0.0, -1.0));
        for (k, r) in self.ensemble.iter().enumerate() {
            if r.weight == 0.0 {
                continue;
            }
            let dc = double_commutator(r.hamiltonian.as_matrix(), &x(k), rho);
            out.add_scaled(C64::new(-r.weight, 0.0), &dc);
        }
        out
    }
}

/// `φ(Δ, t) = ∫_0^t e^{−isΔ} ds = (1 − e^{−itΔ})/(iΔ)`, evaluated without
/// cancellation; `t` on degenerate gaps.
fn gap_integral(delta: f64, t: f64, degeneracy: f64) -> C64 {
    if delta.abs() <= degeneracy {
        return C64::new(t, 0.0);
    }
    let x = t * delta;
    let half = libm::sin(0.5 * x);
    C64::new(libm::sin(x) / delta, -2.0 * half * half / delta)
}

fn h_tilde_from_eigenbasis(h_eig: &ComplexMatrix, eig: &EigenSystem, t: f64) -> ComplexMatrix {
    let e = eig.energies();
    let degeneracy = eig.degeneracy_threshold();
    let weighted = ComplexMatrix::from_fn(h_eig.rows(), h_eig.cols(), |m, n| {
        h_eig[(m, n)] * gap_integral(e[m] - e[n], t, degeneracy)
    });
    eig.from_eigenbasis(&weighted)
}

/// `H̃_λ(t) = ∫_0^t e^{−isH_S} H_λ e^{isH_S} ds` in closed form: in the
/// eigenbasis of `H_S`, element `(m, n)` is `(H_λ)_mn φ(E_m − E_n, t)`.
pub fn h_tilde(h_lambda: &HermitianOperator, eig: &EigenSystem, t: f64) -> ComplexMatrix {
    h_tilde_from_eigenbasis(&eig.to_eigenbasis(h_lambda.as_matrix()), eig, t)
}

/// Resolvent matrix `R_mn = i/(E_n − E_m + iε)`.
///
/// Off-diagonal entries follow the formula. Diagonal entries are `1/ε` for
/// `ε > 0` and are set to zero at `ε = 0`, where the limit diverges; in that
/// case every off-diagonal gap must be nondegenerate.
pub fn gksl_resolvent(eig: &EigenSystem, epsilon: f64) -> Result<ComplexMatrix> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: alloc::format!("must be finite and non-negative, got {epsilon}"),
        });
    }
    let e = eig.energies();
    let n = e.len();
    if epsilon == 0.0 {
        let threshold = eig.degeneracy_threshold();
        for m in 0..n {
            for k in (m + 1)..n {
                let gap = (e[k] - e[m]).abs();
                if gap <= threshold {
                    return Err(Error::DegenerateResolvent { m, n: k, gap });
                }
            }
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |m, k| {
        if m == k {
            if epsilon > 0.0 {
                C64::new(1.0 / epsilon, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        } else {
            C64::new(0.0, 1.0) / C64::new(e[k] - e[m], epsilon)
        }
    }))
}

/// Redfield right-hand side at time `t`.
pub fn redfield_rhs(p: &MasterEqProblem, rho: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    p.require_kind("redfield")?;
    check_state_dim(p, rho)?;
    Ok(p.rhs(rho, t))
}

/// Pure-dephasing right-hand side `−i[H_S, ρ] − t Σ_λ p_λ [H_λ, [H_λ, ρ]]`.
pub fn dephasing_rhs(p: &MasterEqProblem, rho: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    p.require_kind("dephasing")?;
    check_state_dim(p, rho)?;
    Ok(p.rhs(rho, t))
}

/// Time-independent semigroup right-hand side.
pub fn gksl_rhs(p: &MasterEqProblem, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    p.require_kind("gksl")?;
    check_state_dim(p, rho)?;
    Ok(p.rhs(rho, 0.0))
}

fn check_state_dim(p: &MasterEqProblem, rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != p.dim() || rho.cols() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho.rows(),
        });
    }
    Ok(())
}

/// Closed-form pure-dephasing solution: in the shared eigenbasis,
/// `ρ_nm(t) = ρ_nm(0) e^{−it(E_n − E_m)} e^{−t² C₂(n,m)/2}`.
pub fn dephasing_analytic(p: &MasterEqProblem, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    DephasingSolution::new(p)?.state_at(rho0, t)
}

/// Precomputed gap correlations for evaluating [`dephasing_analytic`] on a grid.
#[derive(Debug, Clone)]
pub struct DephasingSolution<'a> {
    problem: &'a MasterEqProblem,
    c2: ComplexMatrix,
}

impl<'a> DephasingSolution<'a> {
    pub fn new(problem: &'a MasterEqProblem) -> Result<Self> {
        problem.ensemble.require_commuting(problem.hs.as_matrix())?;
        let d = problem.dim();
        let mut c2 = ComplexMatrix::zeros(d, d);
        for n in 0..d {
            for m in 0..d {
                let v = crate::ensemble::c2(&problem.ensemble, &problem.eig, n, m)?;
                c2[(n, m)] = C64::new(v, 0.0);
            }
        }
        Ok(Self { problem, c2 })
    }

    /// `C₂(n, m)` for every level pair.
    pub fn correlations(&self) -> &ComplexMatrix {
        &self.c2
    }

    pub fn state_at(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        check_state_dim(self.problem, rho0.as_matrix())?;
        let eig = &self.problem.eig;
        let e = eig.energies();
        let initial = eig.to_eigenbasis(rho0.as_matrix());
        let evolved = ComplexMatrix::from_fn(e.len(), e.len(), |n, m| {
            let phase = C64::new(0.0, -t * (e[n] - e[m])).exp();
            let decay = libm::exp(-0.5 * t * t * self.c2[(n, m)].re);
            initial[(n, m)] * phase * decay
        });
        Ok(DensityMatrix::from_trusted(eig.from_eigenbasis(&evolved)))
    }
}
