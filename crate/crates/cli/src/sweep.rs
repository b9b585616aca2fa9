//! Two-axis landscapes of the closed-form fidelities, with CSV/JSON output
//! and a CSV reader for round trips.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use holonoise_core::bounds;
use holonoise_core::noise::{self, NoiseProcess};
use holonoise_core::analytic;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{field_error, ConfigError, SweepSection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    /// Decay value x = e^{−C̄}.
    X,
    /// Dark-state population of the input.
    F,
    /// ΓT, pulse length in units of 1/Γ.
    GammaT,
    /// γ/Γ.
    MemoryRatio,
    Sin2Theta,
    /// Pulse length, with the configured noise process.
    T,
}

impl AxisName {
    pub const ALL: [AxisName; 6] = [
        Self::X,
        Self::F,
        Self::GammaT,
        Self::MemoryRatio,
        Self::Sin2Theta,
        Self::T,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::X => "x",
            Self::F => "f",
            Self::GammaT => "gamma_t",
            Self::MemoryRatio => "memory_ratio",
            Self::Sin2Theta => "sin2_theta",
            Self::T => "t",
        }
    }

    fn check(self, v: f64) -> Result<(), String> {
        let ok = v.is_finite()
            && match self {
                Self::X => v > 0.0 && v <= 1.0,
                Self::F | Self::Sin2Theta => (0.0..=1.0).contains(&v),
                Self::GammaT | Self::T => v >= 0.0,
                Self::MemoryRatio => v > 0.0,
            };
        if ok {
            Ok(())
        } else {
            let range = match self {
                Self::X => "(0, 1]",
                Self::F | Self::Sin2Theta => "[0, 1]",
                Self::GammaT | Self::T => "[0, ∞)",
                Self::MemoryRatio => "(0, ∞)",
            };
            Err(format!("value {v} outside {range}"))
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown axis {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// Ω-noise fidelity for a given f.
    FidelityOmega,
    /// Reference Ω-noise input average.
    AvgFidelityOmega,
    /// Exact Ω-noise input average at sin²θ.
    AvgFidelityOmegaExact,
    AvgFidelityTheta,
    AvgFidelityPhi,
    AvgFidelityPhiTwoqubit,
}

impl Formula {
    pub const ALL: [Formula; 6] = [
        Self::FidelityOmega,
        Self::AvgFidelityOmega,
        Self::AvgFidelityOmegaExact,
        Self::AvgFidelityTheta,
        Self::AvgFidelityPhi,
        Self::AvgFidelityPhiTwoqubit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::FidelityOmega => "fidelity_omega",
            Self::AvgFidelityOmega => "avg_fidelity_omega",
            Self::AvgFidelityOmegaExact => "avg_fidelity_omega_exact",
            Self::AvgFidelityTheta => "avg_fidelity_theta",
            Self::AvgFidelityPhi => "avg_fidelity_phi",
            Self::AvgFidelityPhiTwoqubit => "avg_fidelity_phi_twoqubit",
        }
    }

    /// Variables needed besides the decay value.
    fn extra(self) -> &'static [AxisName] {
        match self {
            Self::FidelityOmega => &[AxisName::F],
            Self::AvgFidelityOmegaExact | Self::AvgFidelityPhi => &[AxisName::Sin2Theta],
            _ => &[],
        }
    }

    fn eval(self, x: f64, vars: &Vars) -> f64 {
        let value = match self {
            Self::FidelityOmega => analytic::fidelity_omega_from_f(vars.get(AxisName::F), x),
            Self::AvgFidelityOmega => analytic::avg_fidelity_omega(x),
            Self::AvgFidelityOmegaExact => {
                let theta = vars.get(AxisName::Sin2Theta).sqrt().asin();
                analytic::avg_fidelity_omega_exact(theta, x)
            }
            Self::AvgFidelityTheta => analytic::avg_fidelity_theta(x.powi(4)),
            Self::AvgFidelityPhi => {
                return bounds::avg_phi_poly(vars.get(AxisName::Sin2Theta), x).clamp(0.0, 1.0)
            }
            Self::AvgFidelityPhiTwoqubit => analytic::avg_fidelity_phi_twoqubit(x),
        };
        value.expect("decay validated").value()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formula {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown formula {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(name: AxisName, min: f64, max: f64, steps: usize) -> Self {
        Self { name, min, max, steps }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if self.steps == 0 {
            return Err(field_error(field, "steps must be at least 1"));
        }
        if !(self.min <= self.max) || (self.steps == 1 && self.min != self.max) {
            return Err(field_error(field, "need min ≤ max, and min = max for a single step"));
        }
        self.name.check(self.min).map_err(|m| field_error(field, m))?;
        self.name.check(self.max).map_err(|m| field_error(field, m))
    }

    /// Evenly spaced values; the last one is exactly `max`.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = self.steps - 1;
        let h = (self.max - self.min) / last as f64;
        (0..self.steps)
            .map(|k| if k == last { self.max } else { self.min + h * k as f64 })
            .collect()
    }
}

/// How the decay value of a cell is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
enum DecaySource {
    Direct,
    /// OU with Γ = 1: pulse length ΓT and memory rate γ/Γ.
    Dimensionless,
    Process(NoiseProcess<f64>),
}

struct Vars {
    values: BTreeMap<AxisName, f64>,
}

impl Vars {
    fn get(&self, name: AxisName) -> f64 {
        self.values[&name]
    }
}

/// A validated sweep: formula, two axes and fixed values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub formula: Formula,
    pub axes: [AxisSpec; 2],
    pub fixed: BTreeMap<AxisName, f64>,
    decay: DecaySource,
}

pub fn preset(p: Preset) -> SweepSection {
    let (formula, axes) = match p {
        Preset::Fig1 => (
            Formula::FidelityOmega,
            vec![AxisSpec::new(AxisName::X, 1e-4, 1.0, 101), AxisSpec::new(AxisName::F, 0.0, 1.0, 101)],
        ),
        Preset::Fig2 => (
            Formula::AvgFidelityOmega,
            vec![
                AxisSpec::new(AxisName::GammaT, 0.1, 10.0, 100),
                AxisSpec::new(AxisName::MemoryRatio, 0.1, 4.0, 40),
            ],
        ),
        Preset::Fig3 => (
            Formula::AvgFidelityPhi,
            vec![
                AxisSpec::new(AxisName::X, 1e-4, 1.0, 101),
                AxisSpec::new(AxisName::Sin2Theta, 0.0, 1.0, 101),
            ],
        ),
    };
    SweepSection {
        preset: Some(p),
        formula: Some(formula),
        axes: Some(axes),
        fixed: BTreeMap::new(),
        process: None,
    }
}

impl SweepPlan {
    /// Validates axis/formula compatibility. A preset supplies defaults that
    /// explicit `formula`/`axes` entries replace.
    pub fn from_section(section: &SweepSection) -> Result<Self, ConfigError> {
        let base = section.preset.map(preset).unwrap_or_default();
        let formula = section
            .formula
            .or(base.formula)
            .ok_or_else(|| field_error("sweep.formula", "required without a preset"))?;
        let axes = section
            .axes
            .clone()
            .or(base.axes)
            .ok_or_else(|| field_error("sweep.axes", "required without a preset"))?;
        let axes: [AxisSpec; 2] = axes
            .try_into()
            .map_err(|v: Vec<AxisSpec>| field_error("sweep.axes", format!("need exactly 2 axes, got {}", v.len())))?;
        for (k, a) in axes.iter().enumerate() {
            a.validate(&format!("sweep.axes[{k}]"))?;
        }
        if axes[0].name == axes[1].name {
            return Err(field_error("sweep.axes", format!("axis {} given twice", axes[0].name)));
        }
        for (name, v) in &section.fixed {
            if axes.iter().any(|a| a.name == *name) {
                return Err(field_error(format!("sweep.fixed.{name}"), "is also an axis"));
            }
            name.check(*v).map_err(|m| field_error(format!("sweep.fixed.{name}"), m))?;
        }

        let has = |n: AxisName| axes.iter().any(|a| a.name == n) || section.fixed.contains_key(&n);
        let decay = if has(AxisName::X) {
            for other in [AxisName::GammaT, AxisName::MemoryRatio, AxisName::T] {
                if has(other) {
                    return Err(field_error("sweep.axes", format!("{other} conflicts with x")));
                }
            }
            DecaySource::Direct
        } else if has(AxisName::GammaT) || has(AxisName::MemoryRatio) {
            if !(has(AxisName::GammaT) && has(AxisName::MemoryRatio)) {
                return Err(field_error("sweep.axes", "gamma_t and memory_ratio must be given together"));
            }
            if has(AxisName::T) {
                return Err(field_error("sweep.axes", "t conflicts with gamma_t"));
            }
            DecaySource::Dimensionless
        } else if has(AxisName::T) {
            let p = section
                .process
                .ok_or_else(|| field_error("sweep.process", "required when sweeping t"))?;
            p.validate().map_err(|e| field_error("sweep.process", e.to_string()))?;
            DecaySource::Process(p)
        } else {
            return Err(field_error(
                "sweep.axes",
                format!("{formula} needs a decay: x, gamma_t with memory_ratio, or t"),
            ));
        };
        if section.process.is_some() && !matches!(decay, DecaySource::Process(_)) {
            return Err(field_error("sweep.process", "only used with a t axis"));
        }

        for need in formula.extra() {
            if !has(*need) {
                return Err(field_error("sweep.axes", format!("{formula} needs {need}")));
            }
        }
        for name in [AxisName::F, AxisName::Sin2Theta] {
            if has(name) && !formula.extra().contains(&name) {
                return Err(field_error("sweep.axes", format!("{name} is not an input of {formula}")));
            }
        }
        Ok(Self {
            formula,
            axes,
            fixed: section.fixed.clone(),
            decay,
        })
    }

    fn decay(&self, vars: &Vars) -> f64 {
        match self.decay {
            DecaySource::Direct => vars.get(AxisName::X),
            DecaySource::Dimensionless => {
                let p = NoiseProcess::ou(1.0, vars.get(AxisName::MemoryRatio)).expect("validated ratio");
                noise::decay_x(&p, vars.get(AxisName::GammaT)).expect("validated length")
            }
            DecaySource::Process(p) => noise::decay_x(&p, vars.get(AxisName::T)).expect("validated length"),
        }
    }

    /// Row-major over (axis 0, axis 1), evaluated in parallel.
    pub fn run(&self, metadata: Metadata) -> SweepResult {
        let a0 = self.axes[0].values();
        let a1 = self.axes[1].values();
        let cells: Vec<(f64, f64)> = a0.iter().flat_map(|&u| a1.iter().map(move |&v| (u, v))).collect();
        let values = cells
            .par_iter()
            .map(|&(u, v)| {
                let mut values = self.fixed.clone();
                values.insert(self.axes[0].name, u);
                values.insert(self.axes[1].name, v);
                let vars = Vars { values };
                let x = self.decay(&vars).max(f64::MIN_POSITIVE);
                self.formula.eval(x, &vars)
            })
            .collect();
        SweepResult {
            formula: self.formula,
            axes: self.axes.to_vec(),
            values,
            metadata,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub formula: Formula,
    pub axes: Vec<AxisSpec>,
    /// Row-major: index = i0·steps₁ + i1.
    pub values: Vec<f64>,
    pub metadata: Metadata,
}

impl SweepResult {
    pub fn get(&self, i0: usize, i1: usize) -> f64 {
        self.values[i0 * self.axes[1].steps + i1]
    }

    /// (i0, i1, value) of the smallest cell; first in row-major order on ties.
    pub fn argmin(&self) -> (usize, usize, f64) {
        let (k, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (k, &v)| if v < best.1 { (k, v) } else { best });
        (k / self.axes[1].steps, k % self.axes[1].steps, v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let m = &self.metadata;
        out.push_str(&format!("# tool={}\n# version={}\n# seed={}\n# config_hash={}\n", m.tool, m.version, m.seed, m.config_hash));
        if let Some(ts) = &m.timestamp {
            out.push_str(&format!("# timestamp={ts}\n"));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record([self.axes[0].name.as_str(), self.axes[1].name.as_str(), self.formula.as_str()])
            .expect("in-memory write");
        let a0 = self.axes[0].values();
        let a1 = self.axes[1].values();
        for (i, u) in a0.iter().enumerate() {
            for (j, v) in a1.iter().enumerate() {
                w.write_record([fmt_float(*u), fmt_float(*v), fmt_float(self.get(i, j))])
                    .expect("in-memory write");
            }
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("ascii output"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut meta = BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let (k, v) = line[1..].trim().split_once('=').ok_or_else(|| format!("bad metadata line {line:?}"))?;
            meta.insert(k.to_string(), v.to_string());
        }
        let take = |k: &str| meta.get(k).cloned().ok_or_else(|| format!("missing metadata {k}"));
        let metadata = Metadata {
            tool: take("tool")?,
            version: take("version")?,
            seed: take("seed")?.parse().map_err(|e| format!("seed: {e}"))?,
            config_hash: take("config_hash")?,
            timestamp: meta.get("timestamp").cloned(),
        };

        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| e.to_string())?.clone();
        if header.len() != 3 {
            return Err(format!("expected 3 columns, got {}", header.len()));
        }
        let n0: AxisName = header[0].parse()?;
        let n1: AxisName = header[1].parse()?;
        let formula: Formula = header[2].parse()?;
        let mut c0 = Vec::new();
        let mut c1 = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let p = |k: usize| rec[k].parse::<f64>().map_err(|e| format!("{e}: {:?}", &rec[k]));
            c0.push(p(0)?);
            c1.push(p(1)?);
            values.push(p(2)?);
        }
        let Some(&first) = c0.first() else {
            return Err("no data rows".into());
        };
        let a1: Vec<f64> = c0
            .iter()
            .zip(&c1)
            .take_while(|(u, _)| **u == first)
            .map(|(_, v)| *v)
            .collect();
        if values.len() % a1.len() != 0 {
            return Err("grid is not rectangular".into());
        }
        let n1_steps = a1.len();
        let a0: Vec<f64> = c0.iter().step_by(n1_steps).copied().collect();
        let axis = |name, vals: &[f64]| AxisSpec::new(name, vals[0], *vals.last().expect("non-empty"), vals.len());
        Ok(Self {
            formula,
            axes: vec![axis(n0, &a0), axis(n1, &a1)],
            values,
            metadata,
        })
    }
}

/// 17 significant digits; parses back to the same `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata {
            tool: "holonoise".into(),
            version: "0".into(),
            seed: 1,
            config_hash: "abc".into(),
            timestamp: None,
        }
    }

    fn run(p: Preset) -> SweepResult {
        SweepPlan::from_section(&preset(p)).unwrap().run(meta())
    }

    #[test]
    fn fig1_edges_are_one() {
        let r = run(Preset::Fig1);
        assert_eq!(r.values.len(), 101 * 101);
        for i in 0..101 {
            assert_eq!(r.get(i, 100), 1.0);
            assert_eq!(r.get(100, i), 1.0);
        }
    }

    #[test]
    fn fig3_minimum() {
        let r = run(Preset::Fig3);
        let (i, j, v) = r.argmin();
        assert_eq!(i, 0);
        assert!((r.axes[1].values()[j] - 0.6).abs() <= 0.01);
        assert!((v - 0.55).abs() < 1e-3);
    }

    #[test]
    fn fig2_values_in_range() {
        let r = run(Preset::Fig2);
        assert_eq!(r.values.len(), 4000);
        assert!(r.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        for p in [Preset::Fig1, Preset::Fig2, Preset::Fig3] {
            let r = run(p);
            let text = r.to_csv();
            assert!(!text.contains('\r'));
            let back = SweepResult::from_csv(&text).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn incompatible_axes_rejected() {
        let mut s = preset(Preset::Fig3);
        s.formula = Some(Formula::AvgFidelityTheta);
        let err = SweepPlan::from_section(&s).unwrap_err().to_string();
        assert!(err.contains("sin2_theta is not an input"), "{err}");

        let mut s = preset(Preset::Fig1);
        s.axes = Some(vec![AxisSpec::new(AxisName::X, 0.1, 1.0, 3), AxisSpec::new(AxisName::GammaT, 0.1, 1.0, 3)]);
        s.formula = Some(Formula::AvgFidelityOmega);
        assert!(SweepPlan::from_section(&s).is_err());

        let s = SweepSection {
            formula: Some(Formula::AvgFidelityTheta),
            axes: Some(vec![AxisSpec::new(AxisName::T, 0.0, 1.0, 3), AxisSpec::new(AxisName::X, 0.1, 1.0, 3)]),
            ..Default::default()
        };
        assert!(SweepPlan::from_section(&s).is_err());

        let s = SweepSection {
            formula: Some(Formula::AvgFidelityOmega),
            axes: Some(vec![AxisSpec::new(AxisName::X, 0.0, 1.0, 3), AxisSpec::new(AxisName::F, 0.0, 1.0, 3)]),
            ..Default::default()
        };
        assert!(SweepPlan::from_section(&s).is_err());
    }

    #[test]
    fn t_axis_uses_process() {
        let s = SweepSection {
            formula: Some(Formula::AvgFidelityPhi),
            axes: Some(vec![AxisSpec::new(AxisName::T, 0.0, 2.0, 5), AxisSpec::new(AxisName::Sin2Theta, 0.0, 1.0, 3)]),
            process: Some(NoiseProcess::white(1.0).unwrap()),
            ..Default::default()
        };
        let r = SweepPlan::from_section(&s).unwrap().run(meta());
        assert_eq!(r.get(0, 2), 1.0);
        let x = (-1.0f64).exp();
        let want = analytic::avg_fidelity_phi(std::f64::consts::FRAC_PI_2, x).unwrap().value();
        assert!((r.get(4, 2) - want).abs() < 1e-12);
    }
}
