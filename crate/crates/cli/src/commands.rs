//! `gate` and `fidelity` commands.

use holonoise_core::drive::{self, GateKind};
use holonoise_core::montecarlo::{self, FidelityReport};
use holonoise_core::noise::{self, NoiseTarget};
use holonoise_core::{analytic, Matrix, Real};
use num_complex::Complex;
use serde::Serialize;

use crate::config::{FidelityPlan, GateSection, PlanInput};

/// Threshold, in standard errors, for a formula check.
pub const PASS_SIGMA: f64 = 3.0;
/// Threshold for comparisons against formulas with known inconsistencies.
pub const FLAG_SIGMA: f64 = 5.0;

#[derive(Debug, Clone, Serialize)]
pub struct GateOutput {
    pub gate: GateKind<f64>,
    pub theta: f64,
    pub phi: f64,
    pub dimension: usize,
    /// Rows of [re, im] pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub unitarity_defect: f64,
    pub identified: Option<&'static str>,
}

fn rows<const N: usize>(m: &Matrix<f64, N>) -> Vec<Vec<[f64; 2]>> {
    m.rows().iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn run_gate(section: &GateSection) -> Result<GateOutput, crate::config::ConfigError> {
    let kind = section.resolve("gate")?;
    let (theta, phi) = kind.angles();
    Ok(if section.two_qubit {
        let m = drive::two_qubit_gate(theta, phi);
        GateOutput {
            gate: kind,
            theta,
            phi,
            dimension: 4,
            matrix: rows(&m),
            unitarity_defect: m.unitarity_defect(),
            identified: None,
        }
    } else {
        let m = kind.gate();
        GateOutput {
            gate: kind,
            theta,
            phi,
            dimension: 2,
            matrix: rows(&m),
            unitarity_defect: m.unitarity_defect(),
            identified: drive::identify_gate(&m, 1e-12),
        }
    })
}

/// Fixed-width table of a gate; entries below 1e-14 print as zero.
pub fn format_matrix(matrix: &[Vec<[f64; 2]>]) -> String {
    let clean = |v: f64| if v.abs() < 1e-14 { 0.0 } else { v };
    let mut out = String::new();
    for row in matrix {
        let cells: Vec<String> = row
            .iter()
            .map(|&[re, im]| {
                let z = Complex::new(clean(re), clean(im));
                format!("{:>9.6}{:+.6}i", z.re, z.im)
            })
            .collect();
        out.push_str("[ ");
        out.push_str(&cells.join("  "));
        out.push_str(" ]\n");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Disagrees with a formula that has a known inconsistency; the exact
    /// model value agrees.
    Flag,
    Fail,
    /// No Monte Carlo run was requested.
    AnalyticOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityOutput {
    pub target: NoiseTarget,
    pub two_qubit: bool,
    pub duration: f64,
    pub decay_x: f64,
    pub analytic: f64,
    pub model_exact: Option<f64>,
    pub mc: Option<FidelityReport<f64>>,
    pub z_score: Option<f64>,
    pub status: Status,
}

pub fn classify<T: Real>(r: &FidelityReport<T>) -> Status {
    if r.within(T::lit(PASS_SIGMA)) {
        Status::Pass
    } else if r.model_exact.is_some() && r.model_within(T::lit(PASS_SIGMA)) {
        Status::Flag
    } else {
        Status::Fail
    }
}

pub fn run_fidelity(plan: &FidelityPlan) -> holonoise_core::Result<FidelityOutput> {
    let drive_cfg = &plan.drive;
    let duration = drive_cfg.envelope.duration();
    let process = plan.noise.process;
    let x = noise::decay_x(&process, duration)?;
    let x4 = noise::decay_x4(&process, duration)?;
    let (theta, phi) = (drive_cfg.theta, drive_cfg.phi);
    let target = plan.noise.target;

    let (analytic, model_exact) = match (&plan.input, target) {
        (PlanInput::Single(i), NoiseTarget::Omega) => (analytic::fidelity_omega(theta, phi, i, x)?.value(), None),
        (PlanInput::Single(i), NoiseTarget::Theta) => {
            let pe = phi + i.eta();
            (
                analytic::fidelity_theta(pe, i.alpha(), i.beta(), x4)?.value(),
                Some(analytic::fidelity_theta_model(pe, i.alpha(), i.beta(), x4)?.value()),
            )
        }
        (PlanInput::Single(i), NoiseTarget::Phi) => (analytic::fidelity_phi(theta, phi, i, x)?.value(), None),
        (PlanInput::TwoQubit(i), _) => (
            analytic::fidelity_phi_twoqubit(theta, i, x)?.value(),
            Some(analytic::fidelity_phi_twoqubit_model(theta, phi, i, x)?.value()),
        ),
    };

    let mc = match &plan.mc {
        None => None,
        Some(mc) => Some(match (&plan.input, target) {
            (PlanInput::Single(i), NoiseTarget::Omega) => montecarlo::mc_fidelity_omega(drive_cfg, i, &plan.noise, mc)?,
            (PlanInput::Single(i), NoiseTarget::Theta) => montecarlo::mc_fidelity_theta(drive_cfg, i, &plan.noise, mc)?,
            (PlanInput::Single(i), NoiseTarget::Phi) => montecarlo::mc_fidelity_phi(drive_cfg, i, &plan.noise, mc)?,
            (PlanInput::TwoQubit(i), _) => {
                montecarlo::mc_fidelity_phi_twoqubit(theta, phi, i, &plan.noise, duration, mc)?
            }
        }),
    };
    let status = mc.as_ref().map(classify).unwrap_or(Status::AnalyticOnly);
    Ok(FidelityOutput {
        target,
        two_qubit: matches!(plan.input, PlanInput::TwoQubit(_)),
        duration,
        decay_x: x,
        analytic,
        model_exact,
        z_score: mc.as_ref().map(|r| r.z_score()),
        mc,
        status,
    })
}
