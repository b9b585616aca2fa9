//! Experiment configuration: a TOML file with one optional section per
//! command. Unknown keys are rejected; command-line flags override file
//! values, which override defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use holonoise_core::drive::{DriveConfig, Envelope, GateKind};
use holonoise_core::montecarlo::{McConfig, McMode};
use holonoise_core::noise::{NoiseProcess, NoiseSpec, NoiseTarget};
use holonoise_core::{InputState, TwoQubitInput};
use serde::{Deserialize, Serialize};

use crate::sweep::{AxisName, AxisSpec, Formula, Preset};

pub const DEFAULT_SEED: u64 = 20240601;
pub const DEFAULT_TRAJECTORIES: usize = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

pub fn field_error(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputSection,
    pub gate: Option<GateSection>,
    pub fidelity: Option<FidelitySection>,
    pub sweep: Option<SweepSection>,
    pub validate: Option<ValidateSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    /// Recorded verbatim in output metadata. Never generated, so output stays
    /// reproducible.
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateName {
    Hadamard,
    PauliX,
    PauliZ,
    PhaseShift,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    pub kind: GateName,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    #[serde(default)]
    pub two_qubit: bool,
}

impl GateSection {
    pub fn resolve(&self, prefix: &str) -> Result<GateKind<f64>, ConfigError> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(field_error(format!("{prefix}.{name}"), "must be finite"))
            }
        };
        let forbid = |name: &str, v: Option<f64>| match v {
            Some(_) => Err(field_error(
                format!("{prefix}.{name}"),
                format!("not allowed for kind = {:?}", self.kind).to_lowercase(),
            )),
            None => Ok(()),
        };
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| field_error(format!("{prefix}.{name}"), "required for this gate kind"))
                .and_then(|v| finite(name, v))
        };
        match self.kind {
            GateName::Hadamard | GateName::PauliX | GateName::PauliZ => {
                forbid("theta", self.theta)?;
                forbid("phi", self.phi)?;
                Ok(match self.kind {
                    GateName::Hadamard => GateKind::Hadamard,
                    GateName::PauliX => GateKind::PauliX,
                    _ => GateKind::PauliZ,
                })
            }
            GateName::PhaseShift => {
                forbid("theta", self.theta)?;
                Ok(GateKind::PhaseShift {
                    phi: need("phi", self.phi)?,
                })
            }
            GateName::Custom => Ok(GateKind::Custom {
                theta: need("theta", self.theta)?,
                phi: need("phi", self.phi)?,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeSection {
    Constant { duration: f64 },
    SineSquared { duration: f64 },
    Sampled { duration: f64, samples: Vec<f64> },
}

impl Default for EnvelopeSection {
    fn default() -> Self {
        Self::Constant { duration: 1.0 }
    }
}

impl EnvelopeSection {
    /// Envelope rescaled to unit pulse area π.
    pub fn resolve(&self) -> Result<Envelope<f64>, ConfigError> {
        let env = match self.clone() {
            Self::Constant { duration } => Envelope::Constant {
                duration,
                amplitude: 1.0,
            },
            Self::SineSquared { duration } => Envelope::SineSquared {
                duration,
                amplitude: 1.0,
            },
            Self::Sampled { duration, samples } => Envelope::Sampled { duration, samples },
        };
        env.normalize_to_pi()
            .map_err(|e| field_error("fidelity.envelope", e.to_string()))
    }
}

/// Single-qubit input, either by amplitudes (α, β) or by the angle φ₁ with
/// α = cos(φ₁/2), β = sin(φ₁/2). The relative phase η defaults to 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub phi1: Option<f64>,
    pub eta: Option<f64>,
}

impl InputSection {
    pub fn resolve(&self) -> Result<InputState<f64>, ConfigError> {
        let eta = self.eta.unwrap_or(0.0);
        let r = match (self.alpha, self.beta, self.phi1) {
            (Some(a), Some(b), None) => InputState::new(a, b, eta),
            (None, None, Some(p)) => InputState::from_angles(p, eta),
            _ => {
                return Err(field_error(
                    "fidelity.input",
                    "give either alpha and beta, or phi1",
                ))
            }
        };
        r.map_err(|e| field_error("fidelity.input", e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub trajectories: Option<usize>,
    #[serde(default)]
    pub mode: McMode,
    pub dt: Option<f64>,
    /// Set false to report the closed form only.
    pub enabled: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelitySection {
    pub gate: GateSection,
    #[serde(default)]
    pub envelope: EnvelopeSection,
    pub input: Option<InputSection>,
    /// Real amplitudes (c00, c01, c10, c11).
    pub two_qubit_input: Option<[f64; 4]>,
    pub noise: NoiseSpec<f64>,
    #[serde(default)]
    pub mc: McSection,
}

/// A fidelity run with every default and override applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityPlan {
    pub gate: GateKind<f64>,
    pub drive: DriveConfig<f64>,
    pub input: PlanInput,
    pub noise: NoiseSpec<f64>,
    pub mc: Option<McConfig<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanInput {
    Single(InputState<f64>),
    TwoQubit(TwoQubitInput<f64>),
}

impl FidelitySection {
    pub fn resolve(&self, seed: u64, trajectories: Option<usize>) -> Result<FidelityPlan, ConfigError> {
        let gate = self.gate.resolve("fidelity.gate")?;
        let (theta, phi) = gate.angles();
        let envelope = self.envelope.resolve()?;
        let drive = DriveConfig::new(theta, phi, envelope)
            .map_err(|e| field_error("fidelity.gate", e.to_string()))?;
        self.noise
            .process
            .validate()
            .map_err(|e| field_error("fidelity.noise.process", e.to_string()))?;
        let input = if self.gate.two_qubit {
            if self.input.is_some() {
                return Err(field_error("fidelity.input", "use two_qubit_input for a two-qubit gate"));
            }
            if self.noise.target != NoiseTarget::Phi {
                return Err(field_error("fidelity.noise.target", "two-qubit runs support phi noise only"));
            }
            let c = self
                .two_qubit_input
                .ok_or_else(|| field_error("fidelity.two_qubit_input", "required for a two-qubit gate"))?;
            PlanInput::TwoQubit(
                TwoQubitInput::new(c[0], c[1], c[2], c[3])
                    .map_err(|e| field_error("fidelity.two_qubit_input", e.to_string()))?,
            )
        } else {
            if self.two_qubit_input.is_some() {
                return Err(field_error("fidelity.two_qubit_input", "only valid with gate.two_qubit = true"));
            }
            let section = self
                .input
                .as_ref()
                .ok_or_else(|| field_error("fidelity.input", "required"))?;
            PlanInput::Single(section.resolve()?)
        };
        let mc = if self.mc.enabled.unwrap_or(true) {
            let n = trajectories.or(self.mc.trajectories).unwrap_or(DEFAULT_TRAJECTORIES);
            let cfg = McConfig {
                n_traj: n,
                seed,
                dt: self.mc.dt,
                mode: self.mc.mode,
            };
            cfg.validate().map_err(|e| field_error("fidelity.mc", e.to_string()))?;
            Some(cfg)
        } else {
            None
        };
        Ok(FidelityPlan {
            gate,
            drive,
            input,
            noise: self.noise,
            mc,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub preset: Option<Preset>,
    pub formula: Option<Formula>,
    pub axes: Option<Vec<AxisSpec>>,
    #[serde(default)]
    pub fixed: BTreeMap<AxisName, f64>,
    /// Noise process used when an axis is the pulse length `t`.
    pub process: Option<NoiseProcess<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub trajectories: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse("seeed = 3").is_err());
        assert!(ExperimentConfig::parse("[gate]\nkind = \"pauli_x\"\nangle = 1.0").is_err());
    }

    #[test]
    fn gate_kinds() {
        let c = ExperimentConfig::parse("[gate]\nkind = \"custom\"\ntheta = 0.0\nphi = 0.0").unwrap();
        assert_eq!(
            c.gate.unwrap().resolve("gate").unwrap(),
            GateKind::Custom { theta: 0.0, phi: 0.0 }
        );
        let c = ExperimentConfig::parse("[gate]\nkind = \"custom\"\ntheta = 1.0").unwrap();
        let err = c.gate.unwrap().resolve("gate").unwrap_err().to_string();
        assert!(err.starts_with("gate.phi"), "{err}");
        assert!(ExperimentConfig::parse("[gate]\nkind = \"custom\"\ntheta = \"pi\"\nphi = 0.0").is_err());
        let c = ExperimentConfig::parse("[gate]\nkind = \"hadamard\"\ntheta = 1.0").unwrap();
        assert!(c.gate.unwrap().resolve("gate").is_err());
    }

    #[test]
    fn fidelity_section_resolves() {
        let text = r#"
            [fidelity]
            gate = { kind = "hadamard" }
            input = { alpha = 1.0, beta = 0.0 }
            noise = { target = "omega", process = { kind = "ou", intensity = 1.0, memory = 1.0 } }
            mc = { trajectories = 1000 }
        "#;
        let c = ExperimentConfig::parse(text).unwrap();
        let plan = c.fidelity.unwrap().resolve(5, Some(10)).unwrap();
        assert_eq!(plan.mc.unwrap().n_traj, 10);
        assert!(plan.drive.envelope.is_pi_pulse());
    }

    #[test]
    fn two_qubit_requires_phi_noise() {
        let text = r#"
            [fidelity]
            gate = { kind = "custom", theta = 0.7, phi = 0.0, two_qubit = true }
            two_qubit_input = [0.6, 0.0, 0.0, 0.8]
            noise = { target = "theta", process = { kind = "white", intensity = 1.0 } }
        "#;
        let c = ExperimentConfig::parse(text).unwrap();
        let err = c.fidelity.unwrap().resolve(1, None).unwrap_err().to_string();
        assert!(err.starts_with("fidelity.noise.target"), "{err}");
    }
}
