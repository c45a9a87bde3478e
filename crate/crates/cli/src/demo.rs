//! Built-in scenarios.

use crate::scenario::{sigma_x, sigma_z, EnsembleSpec, GeneratorSpec, ScenarioFile, StatePreset, StateSpec};

pub const DEMO_NAMES: [&str; 3] = ["gaussian-dephasing", "two-point-breakdown", "gksl-qubit"];

/// Qubit `σ_z/2` with Gaussian `λσ_z` disorder (σ = 0.2): the dephasing
/// master equation is exact here.
pub fn gaussian_dephasing() -> ScenarioFile {
    ScenarioFile {
        name: "gaussian-dephasing".into(),
        dim: 2,
        hs: sigma_z(0.5),
        ensemble: EnsembleSpec::Gaussian {
            base: sigma_z(1.0),
            sigma: 0.2,
            n_nodes: 32,
            monte_carlo_samples: Some(256),
        },
        rho0: StateSpec::Preset(StatePreset::Plus),
        t_final: 10.0,
        dt: 0.01,
        generators: vec![GeneratorSpec::Redfield, GeneratorSpec::Dephasing],
        seed: 7,
        output_path: "gaussian-dephasing.csv".into(),
        breakdown_threshold: 1e-2,
    }
}

/// Same qubit with two-point disorder `±0.5σ_z`: the master equation only
/// holds at short times.
pub fn two_point_breakdown() -> ScenarioFile {
    ScenarioFile {
        name: "two-point-breakdown".into(),
        dim: 2,
        hs: sigma_z(0.5),
        ensemble: EnsembleSpec::TwoPoint { base: sigma_z(1.0), g: 0.5 },
        rho0: StateSpec::Preset(StatePreset::Plus),
        t_final: 5.0,
        dt: 0.01,
        generators: vec![GeneratorSpec::Redfield, GeneratorSpec::Dephasing],
        seed: 0,
        output_path: "two-point-breakdown.csv".into(),
        breakdown_threshold: 1e-2,
    }
}

/// Transverse `±0.1σ_x` disorder on `σ_z/2`, Redfield against the
/// time-independent semigroup generator.
pub fn gksl_qubit() -> ScenarioFile {
    let base = sigma_x();
    ScenarioFile {
        name: "gksl-qubit".into(),
        dim: 2,
        hs: sigma_z(0.5),
        ensemble: EnsembleSpec::TwoPoint { base, g: 0.1 },
        rho0: StateSpec::Preset(StatePreset::Plus),
        t_final: 20.0,
        dt: 0.01,
        generators: vec![GeneratorSpec::Redfield, GeneratorSpec::Gksl { epsilon: 0.0 }],
        seed: 0,
        output_path: "gksl-qubit.csv".into(),
        breakdown_threshold: 1e-2,
    }
}

pub fn demo(name: &str) -> Option<ScenarioFile> {
    match name {
        "gaussian-dephasing" => Some(gaussian_dephasing()),
        "two-point-breakdown" => Some(two_point_breakdown()),
        "gksl-qubit" => Some(gksl_qubit()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    #[test]
    fn every_demo_resolves() {
        for name in DEMO_NAMES {
            let file = demo(name).unwrap();
            assert_eq!(file.name, name);
            Scenario::resolve(file).unwrap();
        }
        assert!(demo("nope").is_none());
    }
}
