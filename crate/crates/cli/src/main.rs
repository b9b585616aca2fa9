use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use holonoise_cli::commands;
use holonoise_cli::config::{self, ConfigError, ExperimentConfig, Format, GateName, GateSection};
use holonoise_cli::output::{self, config_hash, Envelope, TOOL, VERSION};
use holonoise_cli::sweep::{Metadata, Preset, SweepPlan};
use holonoise_cli::validate::{self, ValidateOptions};

#[derive(Parser, Debug)]
#[command(name = "holonoise", version, about = "Holonomic gate fidelity under classical control noise")]
struct Cli {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Monte Carlo trajectories per estimate.
    #[arg(long, global = true)]
    trajectories: Option<usize>,
    /// Emit the machine-readable JSON summary of every check.
    #[arg(long, global = true)]
    report: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a holonomic gate, its unitarity defect and catalog name.
    Gate {
        #[arg(long, value_parser = parse_gate_name)]
        kind: Option<GateName>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[arg(long)]
        two_qubit: bool,
    },
    /// Closed-form fidelity with an optional Monte Carlo comparison.
    Fidelity,
    /// Two-axis fidelity landscape.
    Sweep {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Run every oracle check.
    Validate,
}

fn parse_gate_name(s: &str) -> Result<GateName, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
        format!("unknown gate kind {s:?}; expected hadamard, pauli_x, pauli_z, phase_shift or custom")
    })
}

enum Failure {
    Config(String),
    Validation,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<holonoise_core::Error> for Failure {
    fn from(e: holonoise_core::Error) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Config(format!("output: {e}"))
    }
}

#[derive(Serialize)]
struct Hashed<'a, S> {
    command: &'a str,
    seed: u64,
    section: S,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(config::DEFAULT_SEED);
    let out = cli.out.clone().or(file.output.path.clone());
    let format = cli.format.or(file.output.format);
    let timestamp = file.output.timestamp.clone();

    match cli.command {
        Command::Gate {
            kind,
            theta,
            phi,
            two_qubit,
        } => {
            if format == Some(Format::Csv) {
                return Err(ConfigError::Field {
                    field: "output.format".into(),
                    message: "gate output is JSON only".into(),
                }
                .into());
            }
            let mut section = file.gate.clone().unwrap_or(GateSection {
                kind: GateName::Custom,
                theta: None,
                phi: None,
                two_qubit: false,
            });
            if file.gate.is_none() && kind.is_none() {
                return Err(config::field_error("gate.kind", "required (use --kind or a [gate] section)").into());
            }
            if let Some(k) = kind {
                section.kind = k;
            }
            section.theta = theta.or(section.theta);
            section.phi = phi.or(section.phi);
            section.two_qubit |= two_qubit;
            let result = commands::run_gate(&section)?;
            let hash = config_hash(&Hashed {
                command: "gate",
                seed,
                section: &section,
            });
            let doc = Envelope::new("gate", seed, hash, timestamp.clone(), &result);
            let table = commands::format_matrix(&result.matrix);
            match &out {
                Some(p) => {
                    print!("{table}");
                    output::emit(Some(p), &output::to_json(&doc))?;
                }
                None => output::emit(None, &format!("{table}{}", output::to_json(&doc)))?,
            }
        }
        Command::Fidelity => {
            if format == Some(Format::Csv) {
                return Err(config::field_error("output.format", "fidelity output is JSON only").into());
            }
            let section = file
                .fidelity
                .as_ref()
                .ok_or_else(|| config::field_error("fidelity", "section required"))?;
            let plan = section.resolve(seed, cli.trajectories)?;
            let result = commands::run_fidelity(&plan)?;
            let hash = config_hash(&Hashed {
                command: "fidelity",
                seed,
                section: &plan,
            });
            let doc = Envelope::new("fidelity", seed, hash, timestamp.clone(), &result);
            output::emit(out.as_deref(), &output::to_json(&doc))?;
        }
        Command::Sweep { preset } => {
            let mut section = file.sweep.clone().unwrap_or_default();
            if let Some(p) = preset {
                section = holonoise_cli::sweep::preset(p);
            }
            let plan = SweepPlan::from_section(&section)?;
            let hash = config_hash(&Hashed {
                command: "sweep",
                seed,
                section: &section,
            });
            let result = plan.run(Metadata {
                tool: TOOL.into(),
                version: VERSION.into(),
                seed,
                config_hash: hash,
                timestamp,
            });
            let text = match format.unwrap_or(Format::Csv) {
                Format::Csv => result.to_csv(),
                Format::Json => output::to_json(&result),
            };
            output::emit(out.as_deref(), &text)?;
        }
        Command::Validate => {
            let trajectories = cli
                .trajectories
                .or(file.validate.as_ref().and_then(|v| v.trajectories))
                .unwrap_or(validate::DEFAULT_TRAJECTORIES);
            if trajectories < 2 {
                return Err(config::field_error("validate.trajectories", "need at least 2").into());
            }
            let opts = ValidateOptions {
                seed,
                trajectories,
                mutation: 0.0,
            };
            let report = validate::run(opts)?;
            let json = cli.report || format == Some(Format::Json);
            let text = if json {
                let hash = config_hash(&Hashed {
                    command: "validate",
                    seed,
                    section: &opts,
                });
                output::to_json(&Envelope::new("validate", seed, hash, timestamp.clone(), &report))
            } else {
                report.to_text()
            };
            output::emit(out.as_deref(), &text)?;
            if json && out.is_some() {
                print!("{}", report.to_text());
            }
            if report.exit_code() != 0 {
                return Err(Failure::Validation);
            }
        }
    }
    Ok(())
}
