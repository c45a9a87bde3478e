//! Observables and exact-versus-approximate error curves.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linops::{trace_distance, DensityMatrix, EigenSystem};
use crate::mastereq::TimeSeries;

/// Coherences smaller than this are treated as lost to rounding.
pub const COHERENCE_FLOOR: f64 = 1e-12;

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// How the level spacing entering the Heisenberg time is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapAverage {
    /// Mean of `|E_m − E_n|` over all pairs `m < n`.
    #[default]
    AllPairs,
    /// Mean spacing of neighbouring sorted levels, `(E_max − E_min)/(d − 1)`.
    Adjacent,
}

/// Heisenberg time `1/⟨|E_m − E_n|⟩` with the all-pairs average.
pub fn heisenberg_time(eig: &EigenSystem) -> Result<f64> {
    heisenberg_time_with(eig, GapAverage::AllPairs)
}

pub fn heisenberg_time_with(eig: &EigenSystem, average: GapAverage) -> Result<f64> {
    let e = eig.energies();
    if e.len() < 2 || eig.spectral_span() <= eig.degeneracy_threshold() {
        return Err(Error::DegenerateSpectrum);
    }
    let mean_gap = match average {
        GapAverage::AllPairs => {
            let mut sum = 0.0;
            let mut pairs = 0usize;
            for (m, em) in e.iter().enumerate() {
                for en in &e[m + 1..] {
                    sum += (en - em).abs();
                    pairs += 1;
                }
            }
            sum / pairs as f64
        }
        GapAverage::Adjacent => eig.spectral_span() / (e.len() - 1) as f64,
    };
    Ok(1.0 / mean_gap)
}

/// Empirical decay rate `−d ln|ρ_nm|/dt` of one eigenbasis coherence.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceRate {
    /// Sample times of the usable window.
    pub times: Vec<f64>,
    pub rates: Vec<f64>,
    /// Index of the first sample whose coherence fell below
    /// [`COHERENCE_FLOOR`]; the window stops just before it.
    pub truncated_at: Option<usize>,
}

/// Instantaneous decay rate of `|ρ_nm|` in the eigenbasis of `eig`, by
/// centered differences in the interior and one-sided differences at the
/// window ends. A window shorter than two samples yields no rates.
pub fn coherence_rate(series: &TimeSeries, eig: &EigenSystem, n: usize, m: usize) -> Result<CoherenceRate> {
    let d = eig.dim();
    if series.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: series.dim(),
        });
    }
    if n == m || n >= d || m >= d {
        return Err(Error::InvalidParameter {
            name: "n, m",
            reason: format!("need two distinct levels below {d}, got ({n}, {m})"),
        });
    }
    let mut log_abs = Vec::with_capacity(series.len());
    let mut truncated_at = None;
    for (k, (_, rho)) in series.iter().enumerate() {
        let c = eig.to_eigenbasis(rho.as_matrix())[(n, m)].norm();
        if c < COHERENCE_FLOOR {
            truncated_at = Some(k);
            break;
        }
        log_abs.push(libm::log(c));
    }
    let times = &series.times()[..log_abs.len()];
    let len = log_abs.len();
    let rates = if len < 2 {
        Vec::new()
    } else {
        (0..len)
            .map(|k| {
                let (a, b) = match k {
                    0 => (0, 1),
                    k if k == len - 1 => (k - 1, k),
                    k => (k - 1, k + 1),
                };
                -(log_abs[b] - log_abs[a]) / (times[b] - times[a])
            })
            .collect()
    };
    Ok(CoherenceRate {
        times: if len < 2 { Vec::new() } else { times.to_vec() },
        rates,
        truncated_at,
    })
}

/// Pointwise trace distance between two series on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    pub trace_distances: Vec<f64>,
    pub max_error: f64,
    /// First time at which the distance exceeds the threshold.
    pub breakdown_time: Option<f64>,
}

/// Compares two series sample by sample.
pub fn compare(exact: &TimeSeries, approx: &TimeSeries, threshold: f64) -> Result<ComparisonReport> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: format!("must be finite and non-negative, got {threshold}"),
        });
    }
    if exact.len() != approx.len() {
        return Err(Error::GridMismatch {
            index: exact.len().min(approx.len()),
        });
    }
    if exact.dim() != approx.dim() {
        return Err(Error::DimensionMismatch {
            expected: exact.dim(),
            found: approx.dim(),
        });
    }
    let mut trace_distances = Vec::with_capacity(exact.len());
    for (k, ((ta, a), (tb, b))) in exact.iter().zip(approx.iter()).enumerate() {
        if (ta - tb).abs() > 1e-12 * ta.abs().max(1.0) {
            return Err(Error::GridMismatch { index: k });
        }
        trace_distances.push(trace_distance(a, b));
    }
    let max_error = trace_distances.iter().copied().fold(0.0, f64::max);
    let breakdown_time = trace_distances
        .iter()
        .position(|&d| d > threshold)
        .map(|k| exact.times()[k]);
    Ok(ComparisonReport {
        times: exact.times().to_vec(),
        trace_distances,
        max_error,
        breakdown_time,
    })
}

/// Largest negative eigenvalue magnitude over the series; zero when every
/// state is positive semidefinite.
pub fn positivity_violation(series: &TimeSeries) -> f64 {
    series
        .states()
        .iter()
        .map(|rho| (-rho.min_eigenvalue()).max(0.0))
        .fold(0.0, f64::max)
}
