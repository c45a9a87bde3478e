use alloc::vec::Vec;

use super::series::{time_grid, TimeSeries};
use super::MasterEqProblem;
use crate::error::{Error, Result};
use crate::linops::{ComplexMatrix, DensityMatrix, C64};

/// Largest `dt·max|E_n|` for which fixed-step RK4 resolves the coherent
/// rotation without noticeable phase error.
const STEP_RESOLUTION: f64 = 0.05;

/// Step size below which [`integrate`] stays quiet about resolution.
pub fn recommended_max_dt(p: &MasterEqProblem) -> f64 {
    let scale = p.eig().max_abs_energy().max(p.ensemble().max_abs());
    if scale == 0.0 {
        f64::INFINITY
    } else {
        STEP_RESOLUTION / scale
    }
}

/// Integrates the master equation with classical fixed-step RK4 on the grid
/// [`time_grid`]`(t_final, dt)`. The state is re-Hermitized after every step.
pub fn integrate(p: &MasterEqProblem, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<TimeSeries> {
    if rho0.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho0.dim(),
        });
    }
    let times = time_grid(t_final, dt)?;
    if dt > recommended_max_dt(p) {
        log::warn!(
            "dt = {dt} exceeds the recommended {:.3e} for this spectrum; RK4 phase errors may be visible",
            recommended_max_dt(p)
        );
    }
    let mut states = Vec::with_capacity(times.len());
    let mut rho = rho0.as_matrix().clone();
    states.push(rho0.clone());
    for (step, &t) in times.iter().enumerate().take(times.len() - 1) {
        rho = rk4_step(p, &rho, t, dt);
        if !rho.is_finite() {
            return Err(Error::NonFiniteState { step: step + 1 });
        }
        states.push(DensityMatrix::from_trusted(rho.clone()));
    }
    TimeSeries::new(times, states)
}

fn rk4_step(p: &MasterEqProblem, rho: &ComplexMatrix, t: f64, dt: f64) -> ComplexMatrix {
    let half = C64::new(0.5 * dt, 0.0);
    let k1 = p.rhs(rho, t);
    let mut y = rho.clone();
    y.add_scaled(half, &k1);
    let k2 = p.rhs(&y, t + 0.5 * dt);
    let mut y = rho.clone();
    y.add_scaled(half, &k2);
    let k3 = p.rhs(&y, t + 0.5 * dt);
    let mut y = rho.clone();
    y.add_scaled(C64::new(dt, 0.0), &k3);
    let k4 = p.rhs(&y, t + dt);

    let sixth = C64::new(dt / 6.0, 0.0);
    let third = C64::new(dt / 3.0, 0.0);
    let mut next = rho.clone();
    next.add_scaled(sixth, &k1);
    next.add_scaled(third, &k2);
    next.add_scaled(third, &k3);
    next.add_scaled(sixth, &k4);
    next.hermitian_part()
}
