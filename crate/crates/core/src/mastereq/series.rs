use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linops::DensityMatrix;

/// Uniform grid `t_k = k·dt`, `k = 0..=N`, with `N = t_final/dt`.
///
/// `t_final` must be a whole multiple of `dt` to within a relative 1e-9 so
/// the last sample lands on `t_final`.
pub fn time_grid(t_final: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be finite and positive, got {dt}"),
        });
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_final",
            reason: format!("must be finite and non-negative, got {t_final}"),
        });
    }
    let ratio = t_final / dt;
    let steps = libm::round(ratio);
    if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidParameter {
            name: "t_final",
            reason: format!("{t_final} is not a whole multiple of dt = {dt}"),
        });
    }
    if steps > u32::MAX as f64 {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("grid of {steps} steps is too long"),
        });
    }
    let steps = steps as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// Reduced states sampled on an increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: states.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::InvalidSeries("time series is empty"));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSeries("times must be finite and strictly increasing"));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { times, states })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn last(&self) -> (f64, &DensityMatrix) {
        let k = self.len() - 1;
        (self.times[k], &self.states[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}
