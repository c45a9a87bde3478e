//! The end-to-end pipeline: exact channel, embedded cross-check, master
//! equations and comparisons.

use std::time::Instant;

use rayon::prelude::*;
use rndunit::analysis::{compare, positivity_violation, ComparisonReport};
use rndunit::channel::{embed, AverageEvolver, EmbeddedEvolver};
use rndunit::linops::{trace_distance, DensityMatrix};
use rndunit::mastereq::{integrate, MasterEqProblem, TimeSeries};
use rndunit::ensemble::DisorderEnsemble;
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::{GeneratorSpec, Scenario, ScenarioFile};

/// Largest tolerated trace distance between the averaged and embedded routes.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorReport {
    pub generator: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub threshold: f64,
    pub max_error: f64,
    pub breakdown_time: Option<f64>,
    /// Largest negative eigenvalue magnitude seen along the solution.
    pub positivity_violation: f64,
    pub times: Vec<f64>,
    pub trace_distances: Vec<f64>,
}

impl GeneratorReport {
    fn new(spec: &GeneratorSpec, threshold: f64, report: ComparisonReport, violation: f64) -> Self {
        Self {
            generator: spec.kind().name(),
            epsilon: match spec {
                GeneratorSpec::Gksl { epsilon } => Some(*epsilon),
                _ => None,
            },
            threshold,
            max_error: report.max_error,
            breakdown_time: report.breakdown_time,
            positivity_violation: violation,
            times: report.times,
            trace_distances: report.trace_distances,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloCheck {
    pub samples: usize,
    pub seed: u64,
    /// Largest trace distance between the quadrature and sampled exact series.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub scenario: String,
    pub version: &'static str,
    pub wall_time_seconds: f64,
    pub embedded_max_deviation: f64,
    pub monte_carlo: Option<MonteCarloCheck>,
    pub reports: Vec<GeneratorReport>,
    /// Resolved configuration; running it again reproduces the table.
    pub config: ScenarioFile,
}

/// A named series with its trace distance to the exact series per sample.
#[derive(Debug, Clone)]
pub struct NamedSeries {
    pub name: &'static str,
    pub series: TimeSeries,
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    /// Exact series first, then each generator in output order.
    pub series: Vec<NamedSeries>,
}

fn exact_series(s: &Scenario, ensemble: &DisorderEnsemble) -> Result<TimeSeries, CliError> {
    let evolver = AverageEvolver::new(&s.hs, ensemble).map_err(|e| CliError::from_run("exact channel", e))?;
    let states = s
        .times
        .par_iter()
        .map(|&t| evolver.state_at(&s.rho0, t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::from_run("exact channel", e))?;
    TimeSeries::new(s.times.clone(), states).map_err(|e| CliError::from_run("exact channel", e))
}

/// Checks the averaged channel against unitary evolution of the embedded
/// system at every sample; returns the largest deviation.
fn embedded_check(s: &Scenario, exact: &TimeSeries) -> Result<f64, CliError> {
    let system = embed(&s.hs, &s.ensemble).map_err(|e| CliError::from_run("embedding", e))?;
    let evolver = EmbeddedEvolver::new(&system, &s.rho0).map_err(|e| CliError::from_run("embedding", e))?;
    let distances: Vec<f64> = exact
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(t, rho)| trace_distance(rho, &evolver.state_at(t)))
        .collect();
    let (worst, at) = distances
        .iter()
        .zip(exact.times())
        .fold((0.0_f64, 0.0), |acc, (&d, &t)| if d.is_nan() || d > acc.0 { (d, t) } else { acc });
    if worst.is_nan() || worst > EQUIVALENCE_TOLERANCE {
        return Err(CliError::EquivalenceBreach {
            distance: worst,
            time: at,
            allowed: EQUIVALENCE_TOLERANCE,
        });
    }
    Ok(worst)
}

fn solve(s: &Scenario, spec: &GeneratorSpec) -> Result<TimeSeries, CliError> {
    let context = format!("generators.{}", spec.kind().name());
    let problem = MasterEqProblem::new(s.hs.clone(), s.ensemble.clone(), spec.kind())
        .map_err(|e| CliError::from_run(context.clone(), e))?;
    integrate(&problem, &s.rho0, s.file.t_final, s.file.dt).map_err(|e| CliError::from_run(context, e))
}

/// Runs a validated scenario. Nothing is written to disk.
pub fn run(s: &Scenario) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let exact = exact_series(s, &s.ensemble)?;
    let embedded_max_deviation = embedded_check(s, &exact)?;
    log::info!("exact channel matches the embedded evolution to {embedded_max_deviation:.2e}");

    let monte_carlo = match &s.monte_carlo {
        Some(sampled) => {
            let mc = exact_series(s, sampled)?;
            let max_deviation = exact
                .states()
                .par_iter()
                .zip(mc.states().par_iter())
                .map(|(a, b)| trace_distance(a, b))
                .reduce(|| 0.0, f64::max);
            log::info!("Monte Carlo ensemble ({} samples) deviates by at most {max_deviation:.3e}", sampled.len());
            Some(MonteCarloCheck {
                samples: sampled.len(),
                seed: s.file.seed,
                max_deviation,
            })
        }
        None => None,
    };

    let zeros = vec![0.0; exact.len()];
    let mut series = vec![NamedSeries {
        name: "exact",
        series: exact.clone(),
        distances: zeros,
    }];
    let mut reports = Vec::new();
    for spec in &s.generators {
        let approx = solve(s, spec)?;
        let report = compare(&exact, &approx, s.file.breakdown_threshold)
            .map_err(|e| CliError::from_run(format!("generators.{}", spec.kind().name()), e))?;
        let violation = positivity_violation(&approx);
        if violation > 0.0 {
            log::info!("{} solution leaves the positive cone by {violation:.3e}", spec.kind().name());
        }
        series.push(NamedSeries {
            name: spec.kind().name(),
            series: approx,
            distances: report.trace_distances.clone(),
        });
        reports.push(GeneratorReport::new(spec, s.file.breakdown_threshold, report, violation));
    }

    Ok(RunOutput {
        record: RunRecord {
            scenario: s.file.name.clone(),
            version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            embedded_max_deviation,
            monte_carlo,
            reports,
            config: s.file.clone(),
        },
        series,
    })
}

/// Reduced state of the exact series at sample `k`.
pub fn exact_state(out: &RunOutput, k: usize) -> &DensityMatrix {
    &out.series[0].series.states()[k]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;

    #[test]
    fn two_point_demo_breaks_down_in_window() {
        let s = Scenario::resolve(demo::two_point_breakdown()).unwrap();
        let out = run(&s).unwrap();
        assert_eq!(out.series.len(), 3);
        assert!(out.record.embedded_max_deviation <= EQUIVALENCE_TOLERANCE);
        for r in &out.record.reports {
            let t = r.breakdown_time.unwrap();
            assert!((0.5..=2.5).contains(&t), "{}: {t}", r.generator);
        }
        let rho = exact_state(&out, 0);
        assert_eq!(rho, &s.rho0);
    }

    #[test]
    fn no_generators_gives_exact_only() {
        let mut file = demo::two_point_breakdown();
        file.generators.clear();
        file.t_final = 1.0;
        let out = run(&Scenario::resolve(file).unwrap()).unwrap();
        assert_eq!(out.series.len(), 1);
        assert!(out.record.reports.is_empty());
    }

    #[test]
    fn degenerate_gksl_is_a_precondition_failure() {
        let mut file = demo::gksl_qubit();
        file.hs = crate::scenario::sigma_z(0.0);
        file.t_final = 1.0;
        let err = run(&Scenario::resolve(file).unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().starts_with("generators.gksl"), "{err}");
    }
}
