//! Scenario documents: JSON schema, loading and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rndunit::ensemble::{center, gauss_hermite_ensemble, monte_carlo_gaussian_ensemble, DisorderEnsemble};
use rndunit::linops::{herm_eig, ComplexMatrix, DensityMatrix, HermitianOperator, C64};
use rndunit::mastereq::{time_grid, GeneratorKind};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_BREAKDOWN_THRESHOLD: f64 = 1e-2;

/// A complex entry, written as `[re, im]`; a bare number is read as real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexLiteral(pub C64);

impl Serialize for ComplexLiteral {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexLiteral {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl<'de> de::Visitor<'de> for Visitor {
            type Value = ComplexLiteral;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an [re, im] pair")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                Ok(ComplexLiteral(C64::new(v, 0.0)))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(ComplexLiteral(C64::new(re, im)))
            }
        }
        d.deserialize_any(Visitor)
    }
}

/// Row-major nested array of complex entries.
pub type MatrixLiteral = Vec<Vec<ComplexLiteral>>;

pub fn matrix_literal(m: &ComplexMatrix) -> MatrixLiteral {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&z| ComplexLiteral(z)).collect())
        .collect()
}

fn real_matrix_literal<const N: usize>(rows: [[f64; N]; N]) -> MatrixLiteral {
    matrix_literal(&ComplexMatrix::from_real_rows(rows))
}

pub(crate) fn sigma_x() -> MatrixLiteral {
    real_matrix_literal([[0.0, 1.0], [1.0, 0.0]])
}

pub(crate) fn sigma_z(scale: f64) -> MatrixLiteral {
    real_matrix_literal([[scale, 0.0], [0.0, -scale]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationSpec {
    pub hamiltonian: MatrixLiteral,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSpec {
    Explicit {
        realizations: Vec<RealizationSpec>,
    },
    /// `λ ~ N(0, σ²)`, `H_λ = λ·base`, on a Gauss–Hermite rule. With
    /// `monte_carlo_samples`, a seeded sampled ensemble is also run as a
    /// cross-check and reported in the run record.
    Gaussian {
        base: MatrixLiteral,
        sigma: f64,
        n_nodes: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        monte_carlo_samples: Option<usize>,
    },
    TwoPoint {
        base: MatrixLiteral,
        g: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatePreset {
    Plus,
    /// Ground state of the system Hamiltonian after the ensemble mean has
    /// been folded into it.
    Ground,
    MaximallyMixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(StatePreset),
    Matrix(MatrixLiteral),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Redfield,
    Dephasing,
    Gksl {
        #[serde(default)]
        epsilon: f64,
    },
}

impl GeneratorSpec {
    pub fn kind(&self) -> GeneratorKind {
        match *self {
            GeneratorSpec::Redfield => GeneratorKind::Redfield,
            GeneratorSpec::Dephasing => GeneratorKind::Dephasing,
            GeneratorSpec::Gksl { epsilon } => GeneratorKind::Gksl { epsilon },
        }
    }

    /// Column order in the output table.
    fn rank(&self) -> u8 {
        match self {
            GeneratorSpec::Redfield => 0,
            GeneratorSpec::Dephasing => 1,
            GeneratorSpec::Gksl { .. } => 2,
        }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_BREAKDOWN_THRESHOLD
}

/// The scenario document exactly as written (plus command-line overrides).
/// Serializing it back gives the configuration echo of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub dim: usize,
    pub hs: MatrixLiteral,
    pub ensemble: EnsembleSpec,
    pub rho0: StateSpec,
    pub t_final: f64,
    pub dt: f64,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub seed: u64,
    pub output_path: String,
    #[serde(default = "default_threshold")]
    pub breakdown_threshold: f64,
}

impl ScenarioFile {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse {
                path: path.to_path_buf(),
                line: inner.line(),
                column: inner.column(),
                field,
                message: inner.to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string(self)
    }
}

/// Command-line overrides applied on top of a scenario document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, file: &mut ScenarioFile) {
        if let Some(out) = &self.output {
            file.output_path = out.to_string_lossy().into_owned();
        }
        if let Some(dt) = self.dt {
            file.dt = dt;
        }
        if let Some(t) = self.t_final {
            file.t_final = t;
        }
        if let Some(seed) = self.seed {
            file.seed = seed;
        }
    }
}

/// A validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// The document this scenario was resolved from.
    pub file: ScenarioFile,
    /// System Hamiltonian with the ensemble mean folded in.
    pub hs: HermitianOperator,
    /// Zero-mean disorder ensemble.
    pub ensemble: DisorderEnsemble,
    pub rho0: DensityMatrix,
    /// Requested generators in output order.
    pub generators: Vec<GeneratorSpec>,
    pub times: Vec<f64>,
    /// Seeded sampled ensemble for the Gaussian cross-check, centered.
    pub monte_carlo: Option<DisorderEnsemble>,
}

fn matrix(field: &str, lit: &MatrixLiteral, dim: usize) -> Result<ComplexMatrix, CliError> {
    if lit.len() != dim {
        return Err(CliError::validation(
            field,
            rndunit::Error::DimensionMismatch {
                expected: dim,
                found: lit.len(),
            },
        ));
    }
    if let Some(row) = lit.iter().find(|r| r.len() != dim) {
        return Err(CliError::validation(
            field,
            rndunit::Error::NotSquare {
                rows: dim,
                cols: row.len(),
            },
        ));
    }
    let data = lit.iter().flatten().map(|z| z.0).collect();
    ComplexMatrix::from_row_major(dim, dim, data).map_err(|e| CliError::validation(field, e))
}

fn hermitian(field: &str, lit: &MatrixLiteral, dim: usize) -> Result<HermitianOperator, CliError> {
    HermitianOperator::new(matrix(field, lit, dim)?).map_err(|e| CliError::validation(field, e))
}

fn raw_ensemble(spec: &EnsembleSpec, dim: usize) -> Result<DisorderEnsemble, CliError> {
    match spec {
        EnsembleSpec::Explicit { realizations } => {
            let mut list = Vec::with_capacity(realizations.len());
            for (k, r) in realizations.iter().enumerate() {
                let field = format!("ensemble.explicit.realizations[{k}].hamiltonian");
                list.push((hermitian(&field, &r.hamiltonian, dim)?, r.weight));
            }
            DisorderEnsemble::new(list).map_err(|e| CliError::validation("ensemble.explicit.realizations", e))
        }
        EnsembleSpec::Gaussian {
            base, sigma, n_nodes, ..
        } => {
            let base = hermitian("ensemble.gaussian.base", base, dim)?;
            gauss_hermite_ensemble(&base, *sigma, *n_nodes).map_err(|e| CliError::validation("ensemble.gaussian", e))
        }
        EnsembleSpec::TwoPoint { base, g } => {
            let base = hermitian("ensemble.two_point.base", base, dim)?;
            DisorderEnsemble::two_point(&base, *g).map_err(|e| CliError::validation("ensemble.two_point", e))
        }
    }
}

fn initial_state(spec: &StateSpec, hs: &HermitianOperator, dim: usize) -> Result<DensityMatrix, CliError> {
    match spec {
        StateSpec::Preset(StatePreset::Plus) => Ok(DensityMatrix::plus(dim)),
        StateSpec::Preset(StatePreset::MaximallyMixed) => Ok(DensityMatrix::maximally_mixed(dim)),
        StateSpec::Preset(StatePreset::Ground) => {
            let eig = herm_eig(hs);
            let v = eig.basis().as_matrix();
            let psi: Vec<C64> = (0..dim).map(|i| v[(i, 0)]).collect();
            DensityMatrix::pure(&psi).map_err(|e| CliError::validation("rho0", e))
        }
        StateSpec::Matrix(lit) => DensityMatrix::new(matrix("rho0", lit, dim)?).map_err(|e| CliError::validation("rho0", e)),
    }
}

fn sorted_generators(list: &[GeneratorSpec]) -> Result<Vec<GeneratorSpec>, CliError> {
    let mut sorted = list.to_vec();
    sorted.sort_by_key(GeneratorSpec::rank);
    if let Some(w) = sorted.windows(2).find(|w| w[0].rank() == w[1].rank()) {
        return Err(CliError::Config(format!(
            "generators: `{}` is listed more than once",
            w[0].kind().name()
        )));
    }
    Ok(sorted)
}

impl Scenario {
    /// Validates a document, centers the ensemble and folds its mean into
    /// the system Hamiltonian.
    pub fn resolve(file: ScenarioFile) -> Result<Self, CliError> {
        let dim = file.dim;
        if dim == 0 {
            return Err(CliError::Config("dim: must be at least 1".into()));
        }
        let times = time_grid(file.t_final, file.dt).map_err(|e| CliError::validation("t_final/dt", e))?;
        if !(file.breakdown_threshold.is_finite() && file.breakdown_threshold >= 0.0) {
            return Err(CliError::Config(format!(
                "breakdown_threshold: must be finite and non-negative, got {}",
                file.breakdown_threshold
            )));
        }
        let hs_raw = hermitian("hs", &file.hs, dim)?;
        let raw = raw_ensemble(&file.ensemble, dim)?;
        let centered = center(&raw);
        let hs = centered.fold_into(&hs_raw);
        log::info!(
            "centered the ensemble: folded its mean (max entry {:.3e}) into hs",
            centered.mean.max_abs()
        );
        let rho0 = initial_state(&file.rho0, &hs, dim)?;
        let generators = sorted_generators(&file.generators)?;

        let monte_carlo = match &file.ensemble {
            EnsembleSpec::Gaussian {
                base,
                sigma,
                monte_carlo_samples: Some(samples),
                ..
            } => {
                let base = hermitian("ensemble.gaussian.base", base, dim)?;
                let mut rng = ChaCha8Rng::seed_from_u64(file.seed);
                let sampled = monte_carlo_gaussian_ensemble(&base, *sigma, *samples, &mut rng)
                    .map_err(|e| CliError::validation("ensemble.gaussian.monte_carlo_samples", e))?;
                Some(center(&sampled).ensemble)
            }
            _ => None,
        };

        Ok(Self {
            hs,
            ensemble: centered.ensemble,
            rho0,
            generators,
            times,
            monte_carlo,
            file,
        })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn output_path(&self) -> PathBuf {
        PathBuf::from(&self.file.output_path)
    }
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: &Path, overrides: &Overrides) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut file = ScenarioFile::from_json(&text, path)?;
    overrides.apply(&mut file);
    Scenario::resolve(file)
}
