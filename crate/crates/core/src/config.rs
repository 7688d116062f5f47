//! JSON simulation configuration shared by the command-line tool and
//! the browser demo.

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::deformation::DeformationSpec;
use crate::environment::{EnvironmentCoefficients, Temperature};
use crate::error::{Error, Result};
use crate::evolve::EvolveOptions;
use crate::state::DensityMatrix;

/// Top-level configuration file.
///
/// The environment block takes exactly one of three forms: thermal
/// (`omega`, `lambda`, `temperature`), explicit diffusion coefficients
/// (`omega`, `lambda`, `D_qq`, `D_pp`, `D_pq`), or microscopic couplings
/// (`omega`, `couplings`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub deformation: DeformationConfig,
    pub fock_dim: usize,
    pub initial_state: InitialStateConfig,
    #[serde(default)]
    pub t_final: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default = "default_positivity_tol")]
    pub positivity_tol: f64,
    #[serde(default = "default_leakage_tol")]
    pub leakage_tol: f64,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

fn default_sample_every() -> usize {
    1
}

fn default_positivity_tol() -> f64 {
    1e-8
}

fn default_leakage_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentConfig {
    Thermal {
        omega: f64,
        lambda: f64,
        temperature: TemperatureConfig,
    },
    Diffusion {
        omega: f64,
        lambda: f64,
        #[serde(rename = "D_qq")]
        d_qq: f64,
        #[serde(rename = "D_pp")]
        d_pp: f64,
        #[serde(rename = "D_pq")]
        d_pq: f64,
    },
    Couplings {
        omega: f64,
        /// [Re a_j, Im a_j, Re b_j, Im b_j] per pair
        couplings: Vec<[f64; 4]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TemperatureConfig {
    Keyword(String),
    Theta { theta: f64 },
    Coth { coth: f64 },
}

impl TemperatureConfig {
    pub fn build(&self) -> Result<Temperature> {
        match self {
            TemperatureConfig::Keyword(s) if s == "zero" => Ok(Temperature::Zero),
            TemperatureConfig::Keyword(s) => Err(Error::InvalidParameter(format!(
                "unknown temperature keyword {s:?}; expected \"zero\""
            ))),
            TemperatureConfig::Theta { theta } => Ok(Temperature::Theta(*theta)),
            TemperatureConfig::Coth { coth } => Ok(Temperature::CothFactor(*coth)),
        }
    }
}

impl EnvironmentConfig {
    pub fn build(&self) -> Result<EnvironmentCoefficients> {
        match self {
            EnvironmentConfig::Thermal {
                omega,
                lambda,
                temperature,
            } => EnvironmentCoefficients::thermal(*omega, *lambda, temperature.build()?),
            EnvironmentConfig::Diffusion {
                omega,
                lambda,
                d_qq,
                d_pp,
                d_pq,
            } => EnvironmentCoefficients::from_diffusion(*omega, *lambda, *d_qq, *d_pp, *d_pq),
            EnvironmentConfig::Couplings { omega, couplings } => {
                let pairs: Vec<(C64, C64)> = couplings
                    .iter()
                    .map(|c| (C64::new(c[0], c[1]), C64::new(c[2], c[3])))
                    .collect();
                EnvironmentCoefficients::from_environment_couplings(*omega, &pairs)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationConfig {
    pub kind: String,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub table: Option<Vec<f64>>,
}

impl Default for DeformationConfig {
    fn default() -> Self {
        Self {
            kind: "none".into(),
            tau: None,
            table: None,
        }
    }
}

impl DeformationConfig {
    pub fn build(&self) -> Result<DeformationSpec> {
        let need_tau = || {
            self.tau.ok_or_else(|| {
                Error::InvalidParameter(format!("deformation kind {:?} requires tau", self.kind))
            })
        };
        match self.kind.as_str() {
            "none" => Ok(DeformationSpec::identity()),
            "q-real" => DeformationSpec::q_real(need_tau()?),
            "q-phase" => DeformationSpec::q_phase(need_tau()?),
            "q-taylor" => DeformationSpec::q_taylor(need_tau()?),
            "table" => {
                let table = self.table.clone().ok_or_else(|| {
                    Error::InvalidParameter("deformation kind \"table\" requires a table".into())
                })?;
                DeformationSpec::table(table)
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown deformation kind {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InitialStateConfig {
    Fock { fock: usize },
    Thermal { thermal: f64 },
    Populations { populations: Vec<f64> },
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

impl InitialStateConfig {
    pub fn build(&self, dim: usize) -> Result<DensityMatrix> {
        match self {
            InitialStateConfig::Fock { fock } => DensityMatrix::fock(dim, *fock),
            InitialStateConfig::Thermal { thermal } => {
                if !(*thermal > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "thermal initial state needs theta > 0, got {thermal}"
                    )));
                }
                DensityMatrix::thermal_gibbs(dim, 1.0 / thermal.tanh())
            }
            InitialStateConfig::Populations { populations } => {
                if populations.len() > dim {
                    return Err(Error::InvalidState(format!(
                        "{} populations exceed fock_dim {dim}",
                        populations.len()
                    )));
                }
                let mut padded = populations.clone();
                padded.resize(dim, 0.0);
                DensityMatrix::from_populations(&padded)
            }
            InitialStateConfig::Matrix { matrix } => {
                let n = matrix.len();
                if n != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: n,
                    });
                }
                let mut m = ndarray::Array2::zeros((n, n));
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::InvalidState(format!(
                            "matrix row {i} has {} entries, expected {n}",
                            row.len()
                        )));
                    }
                    for (j, pair) in row.iter().enumerate() {
                        m[[i, j]] = C64::new(pair[0], pair[1]);
                    }
                }
                DensityMatrix::from_matrix(m)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: String,
    pub format: OutputFormat,
}

impl SimConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        let config: SimConfig = serde_json::from_str(text)?;
        Ok(config)
    }

    /// Structural validation beyond what serde enforces.
    pub fn validate_shape(&self) -> Result<()> {
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "fock_dim must be at least 2, got {}",
                self.fock_dim
            )));
        }
        if self.t_final < 0.0 || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_final must be finite and nonnegative, got {}",
                self.t_final
            )));
        }
        Ok(())
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            t_final: self.t_final,
            dt: self.dt,
            sample_every: self.sample_every,
            leakage_tol: self.leakage_tol,
            positivity_tol: self.positivity_tol,
            ..Default::default()
        }
    }
}
