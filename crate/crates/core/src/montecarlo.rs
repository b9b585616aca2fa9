//! Trajectory-ensemble oracle for the closed-form fidelities.
//!
//! Each trajectory draws one noise realization, builds the perturbed
//! transformation and records its squared overlap with the ideal output.
//! Trajectory `i` always uses substream `i` of the configured seed and the
//! per-trajectory values are reduced in index order, so results are
//! bit-identical for any thread count.
//!
//! θ and φ noise use the endpoint-substitution model: the accumulated
//! integral Δ(T) shifts the angle inside the final gate and the state never
//! leaves the qubit subspace. Ω noise shifts the pulse area and does leak
//! into |e⟩.

use num_complex::Complex;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, InputState, TwoQubitInput};
use crate::drive::{self, DriveConfig, Envelope, EXCITED};
use crate::error::{Error, Result};
use crate::noise::{self, NoiseProcess, NoiseSpec, NoiseTarget, Trajectory};
use crate::qcore::{overlap_probability, Matrix, PureState};
use crate::real::Real;
use crate::rng::StreamRng;
use crate::stats::{summarize, Summary};

/// Steps per pulse when a path-mode run does not set `dt`.
pub const DEFAULT_STEPS: usize = 2000;

/// Absolute slack added to k·stderr, so zero-variance ensembles compare
/// against exact values without tripping on rounding.
pub const ROUNDING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McMode {
    /// Δ(T) drawn from N(0, 2C̄(T)).
    #[default]
    DirectGaussian,
    /// Δ(T) accumulated along a sampled noise path.
    PathIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig<T> {
    pub n_traj: usize,
    pub seed: u64,
    /// Path step; `None` means duration / 2000.
    #[serde(default)]
    pub dt: Option<T>,
    #[serde(default)]
    pub mode: McMode,
}

impl<T: Real> McConfig<T> {
    pub fn direct(n_traj: usize, seed: u64) -> Self {
        Self {
            n_traj,
            seed,
            dt: None,
            mode: McMode::DirectGaussian,
        }
    }

    pub fn path(n_traj: usize, seed: u64, dt: Option<T>) -> Self {
        Self {
            n_traj,
            seed,
            dt,
            mode: McMode::PathIntegral,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::NoTrajectories);
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > T::zero()) {
                return Err(Error::InvalidStep {
                    dt: dt.to_f64().unwrap_or(f64::NAN),
                    duration: f64::NAN,
                });
            }
        }
        Ok(())
    }

    fn step_for(&self, duration: T) -> T {
        self.dt
            .unwrap_or_else(|| duration / T::from_usize_lossy(DEFAULT_STEPS))
            .min(duration)
    }
}

/// Ensemble estimate next to the closed-form prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport<T> {
    pub target: NoiseTarget,
    pub mode: McMode,
    /// Closed-form value under test.
    pub analytic: T,
    /// Exact value of the simulated model, when it differs in form from
    /// `analytic`.
    pub model_exact: Option<T>,
    pub mc_mean: T,
    pub mc_stderr: T,
    pub n_traj: usize,
    pub seed: u64,
}

impl<T: Real> FidelityReport<T> {
    pub fn deviation(&self) -> T {
        (self.mc_mean - self.analytic).abs()
    }

    /// Deviation in units of the standard error (infinite for a nonzero
    /// deviation from a zero-variance ensemble beyond rounding).
    pub fn z_score(&self) -> T {
        let d = self.deviation();
        if d <= T::lit(ROUNDING_FLOOR) {
            T::zero()
        } else if self.mc_stderr == T::zero() {
            T::infinity()
        } else {
            d / self.mc_stderr
        }
    }

    /// |mc_mean − analytic| ≤ k·stderr.
    pub fn within(&self, k: T) -> bool {
        self.deviation() <= k * self.mc_stderr + T::lit(ROUNDING_FLOOR)
    }

    /// Same test against `model_exact`, falling back to `analytic`.
    pub fn model_within(&self, k: T) -> bool {
        let reference = self.model_exact.unwrap_or(self.analytic);
        (self.mc_mean - reference).abs() <= k * self.mc_stderr + T::lit(ROUNDING_FLOOR)
    }
}

/// Evaluates `trial` once per trajectory, in parallel, and summarizes in
/// index order.
pub fn run_ensemble<T, F>(n_traj: usize, seed: u64, trial: F) -> Result<Summary<T>>
where
    T: Real,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    if n_traj == 0 {
        return Err(Error::NoTrajectories);
    }
    let stream = StreamRng::new(seed);
    let values = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| trial(&mut stream.substream(i)))
        .collect::<Result<Vec<T>>>()?;
    Ok(summarize(&values))
}

/// Δ(T) for one trajectory in the configured mode.
pub fn draw_delta<T: Real>(
    process: &NoiseProcess<T>,
    duration: T,
    mc: &McConfig<T>,
    rng: &mut ChaCha8Rng,
) -> Result<T> {
    match mc.mode {
        McMode::DirectGaussian => noise::sample_integral(process, duration, rng),
        McMode::PathIntegral if duration == T::zero() => Ok(T::zero()),
        McMode::PathIntegral => noise::path_integral(process, duration, mc.step_for(duration), rng),
    }
}

fn report<T: Real>(
    target: NoiseTarget,
    mc: &McConfig<T>,
    analytic: T,
    model_exact: Option<T>,
    s: Summary<T>,
) -> FidelityReport<T> {
    FidelityReport {
        target,
        mode: mc.mode,
        analytic,
        model_exact,
        mc_mean: s.mean,
        mc_stderr: s.stderr,
        n_traj: s.n,
        seed: mc.seed,
    }
}

fn setup<T: Real>(spec: &NoiseSpec<T>, target: NoiseTarget, mc: &McConfig<T>) -> Result<()> {
    spec.expect_target(target)?;
    spec.process.validate()?;
    mc.validate()
}

/// Output of the Ω-perturbed cyclic evolution, in the three-level space.
pub fn perturbed_omega_state<T: Real>(theta: T, phi: T, input: &InputState<T>, area: T) -> PureState<T, 3> {
    drive::propagator_for_area(theta, phi, area).apply(&input.to_state().embed::<3>())
}

/// |⟨e|ψ⟩|² predicted for pulse area `area`:
/// sin²(area)·|β cos(θ/2) + α sin(θ/2)e^{i(φ+η)}|².
pub fn leakage_prediction<T: Real>(theta: T, phi: T, input: &InputState<T>, area: T) -> T {
    let (sh, ch) = (theta / T::lit(2.0)).sin_cos();
    let amp = Complex::new(input.beta() * ch, T::zero())
        + Complex::from_polar(input.alpha() * sh, phi + input.eta());
    let s = area.sin();
    s * s * amp.norm_sqr()
}

pub fn mc_fidelity_omega<T: Real>(
    cfg: &DriveConfig<T>,
    input: &InputState<T>,
    spec: &NoiseSpec<T>,
    mc: &McConfig<T>,
) -> Result<FidelityReport<T>> {
    setup(spec, NoiseTarget::Omega, mc)?;
    cfg.envelope.validate()?;
    let area = cfg.envelope.area()?;
    if !cfg.envelope.is_pi_pulse() {
        return Err(Error::EnvelopeNotNormalized(area.to_f64().unwrap_or(f64::NAN)));
    }
    let duration = cfg.envelope.duration();
    let (theta, phi) = (cfg.theta, cfg.phi);
    let ideal = drive::ideal_output(theta, phi, input).embed::<3>();
    let process = spec.process;

    let s = match mc.mode {
        McMode::DirectGaussian => run_ensemble(mc.n_traj, mc.seed, |rng| {
            let delta = noise::sample_integral(&process, duration, rng)?;
            let out = perturbed_omega_state(theta, phi, input, T::PI() + delta);
            Ok(overlap_probability(&ideal, &out))
        })?,
        McMode::PathIntegral => {
            let dt = mc.step_for(duration);
            let psi0 = input.to_state().embed::<3>();
            run_ensemble(mc.n_traj, mc.seed, |rng| {
                let path = noisy_envelope(&cfg.envelope, &process, duration, dt, rng)?;
                let out = piecewise_propagator(cfg, &path)?.apply(&psi0);
                Ok(overlap_probability(&ideal, &out))
            })?
        }
    };
    let x = noise::decay_x(&process, duration)?;
    let analytic = analytic::fidelity_omega(theta, phi, input, x)?.value();
    Ok(report(NoiseTarget::Omega, mc, analytic, None, s))
}

/// Ω(t) + δ(t) on the noise grid.
fn noisy_envelope<T: Real>(
    env: &Envelope<T>,
    process: &NoiseProcess<T>,
    duration: T,
    dt: T,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory<T>> {
    let mut path = noise::sample_path(process, duration, dt, rng)?;
    let n = path.values.len();
    for (k, v) in path.values.iter_mut().enumerate() {
        let t = if k + 1 == n { duration } else { path.dt * T::from_usize_lossy(k) };
        *v = *v + env.omega(t)?;
    }
    Ok(path)
}

pub fn mc_fidelity_theta<T: Real>(
    cfg: &DriveConfig<T>,
    input: &InputState<T>,
    spec: &NoiseSpec<T>,
    mc: &McConfig<T>,
) -> Result<FidelityReport<T>> {
    setup(spec, NoiseTarget::Theta, mc)?;
    let duration = cfg.envelope.duration();
    let (theta, phi) = (cfg.theta, cfg.phi);
    let ideal = drive::ideal_output(theta, phi, input);
    let process = spec.process;
    let s = run_ensemble(mc.n_traj, mc.seed, |rng| {
        let delta = draw_delta(&process, duration, mc, rng)?;
        Ok(overlap_probability(&ideal, &drive::ideal_output(theta + delta, phi, input)))
    })?;
    let x4 = noise::decay_x4(&process, duration)?;
    let pe = phi + input.eta();
    let analytic = analytic::fidelity_theta(pe, input.alpha(), input.beta(), x4)?.value();
    let model = analytic::fidelity_theta_model(pe, input.alpha(), input.beta(), x4)?.value();
    Ok(report(NoiseTarget::Theta, mc, analytic, Some(model), s))
}

pub fn mc_fidelity_phi<T: Real>(
    cfg: &DriveConfig<T>,
    input: &InputState<T>,
    spec: &NoiseSpec<T>,
    mc: &McConfig<T>,
) -> Result<FidelityReport<T>> {
    setup(spec, NoiseTarget::Phi, mc)?;
    let duration = cfg.envelope.duration();
    let (theta, phi) = (cfg.theta, cfg.phi);
    let ideal = drive::ideal_output(theta, phi, input);
    let process = spec.process;
    let s = run_ensemble(mc.n_traj, mc.seed, |rng| {
        let delta = draw_delta(&process, duration, mc, rng)?;
        Ok(overlap_probability(&ideal, &drive::ideal_output(theta, phi + delta, input)))
    })?;
    let x = noise::decay_x(&process, duration)?;
    let analytic = analytic::fidelity_phi(theta, phi, input, x)?.value();
    Ok(report(NoiseTarget::Phi, mc, analytic, None, s))
}

/// Two-qubit gate with φ noise over a pulse of length `duration`.
pub fn mc_fidelity_phi_twoqubit<T: Real>(
    theta: T,
    phi: T,
    input: &TwoQubitInput<T>,
    spec: &NoiseSpec<T>,
    duration: T,
    mc: &McConfig<T>,
) -> Result<FidelityReport<T>> {
    setup(spec, NoiseTarget::Phi, mc)?;
    if !(duration >= T::zero()) {
        return Err(Error::NegativeDuration(duration.to_f64().unwrap_or(f64::NAN)));
    }
    let psi = input.to_state();
    let ideal = drive::two_qubit_gate(theta, phi).apply(&psi);
    let process = spec.process;
    let s = run_ensemble(mc.n_traj, mc.seed, |rng| {
        let delta = draw_delta(&process, duration, mc, rng)?;
        let out = drive::two_qubit_gate(theta, phi + delta).apply(&psi);
        Ok(overlap_probability(&ideal, &out))
    })?;
    let x = noise::decay_x(&process, duration)?;
    let analytic = analytic::fidelity_phi_twoqubit(theta, input, x)?.value();
    let model = analytic::fidelity_phi_twoqubit_model(theta, phi, input, x)?.value();
    Ok(report(NoiseTarget::Phi, mc, analytic, Some(model), s))
}

/// Ω(t) sampled at `n_steps + 1` uniform points.
pub fn sample_envelope<T: Real>(env: &Envelope<T>, n_steps: usize) -> Result<Trajectory<T>> {
    if n_steps == 0 {
        return Err(Error::EmptyGrid);
    }
    let grid = drive::uniform_grid(env.duration(), n_steps + 1);
    let values = grid.iter().map(|&t| env.omega(t)).collect::<Result<Vec<T>>>()?;
    Ok(Trajectory {
        dt: env.duration() / T::from_usize_lossy(n_steps),
        values,
    })
}

/// Ordered product of exact per-step exponentials for the sampled Rabi
/// frequency `omega`.
///
/// H₁ = Ω·M with M having eigenvalues {0, ±1}, so each step is
/// P_d + cos(A)(P₊ + P₋) + i·sin(A)(P₊ − P₋) with A the trapezoid area of the
/// step and P₊ − P₋ = M. The sign matches [`drive::propagator`].
pub fn piecewise_propagator<T: Real>(cfg: &DriveConfig<T>, omega: &Trajectory<T>) -> Result<Matrix<T, 3>> {
    if omega.values.len() < 2 {
        return Err(Error::EmptyGrid);
    }
    let (a, b) = (cfg.a(), cfg.b());
    let z = Complex::new(T::zero(), T::zero());
    let d = [b, -a, z];
    let p_d = Matrix::outer(&d, &d);
    let bright = Matrix::identity() - p_d;
    let m = Matrix::from_rows([[z, z, a.conj()], [z, z, b.conj()], [a, b, z]])?;
    let i = Complex::<T>::i();
    let half = T::lit(0.5);
    let mut u = Matrix::identity();
    for w in omega.values.windows(2) {
        let area = half * (w[0] + w[1]) * omega.dt;
        let (s, c) = area.sin_cos();
        let step = p_d + bright.scale(Complex::new(c, T::zero())) + m.scale(i.scale(s));
        u = step.matmul(&u);
    }
    Ok(u)
}

/// Input average estimated by sampling inputs from the uniform measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputAverageReport<T> {
    pub target: NoiseTarget,
    /// Closed-form average under test.
    pub analytic: T,
    /// Exact average of the per-input formula under the same measure, when
    /// known and different in form.
    pub exact: Option<T>,
    pub mc_mean: T,
    pub mc_stderr: T,
    pub n_inputs: usize,
    pub seed: u64,
}

impl<T: Real> InputAverageReport<T> {
    pub fn deviation(&self) -> T {
        (self.mc_mean - self.analytic).abs()
    }

    pub fn within(&self, k: T) -> bool {
        self.deviation() <= k * self.mc_stderr + T::lit(ROUNDING_FLOOR)
    }

    pub fn exact_within(&self, k: T) -> bool {
        let reference = self.exact.unwrap_or(self.analytic);
        (self.mc_mean - reference).abs() <= k * self.mc_stderr + T::lit(ROUNDING_FLOOR)
    }
}

/// Single-qubit input drawn from φ₁ ~ U[0, π], η ~ U[0, 2π).
pub fn random_input<T: Real>(rng: &mut ChaCha8Rng) -> InputState<T> {
    let phi1 = T::PI() * T::unit_uniform(rng);
    let eta = T::TAU() * T::unit_uniform(rng);
    InputState::from_angles(phi1, eta).expect("unit vector")
}

/// Outer Monte Carlo over inputs with the closed-form per-input fidelity
/// inside, for gate (θ, φ) and a pulse of length `duration`.
///
/// θ-noise uses the substitution-model fidelity per input. For φ noise on
/// two qubits θ is drawn uniformly on [0, π] alongside φ₁ (with
/// c00 = cos(φ₁/2), c11 = sin(φ₁/2)), and the given θ is ignored.
pub fn mc_input_average<T: Real>(
    theta: T,
    phi: T,
    spec: &NoiseSpec<T>,
    duration: T,
    n_inputs: usize,
    seed: u64,
    two_qubit: bool,
) -> Result<InputAverageReport<T>> {
    spec.process.validate()?;
    let x = noise::decay_x(&spec.process, duration)?;
    let x4 = noise::decay_x4(&spec.process, duration)?;
    let (analytic, exact) = match (spec.target, two_qubit) {
        (NoiseTarget::Omega, false) => (
            analytic::avg_fidelity_omega(x)?.value(),
            Some(analytic::avg_fidelity_omega_exact(theta, x)?.value()),
        ),
        (NoiseTarget::Theta, false) => (analytic::avg_fidelity_theta(x4)?.value(), None),
        (NoiseTarget::Phi, false) => (analytic::avg_fidelity_phi(theta, x)?.value(), None),
        (NoiseTarget::Phi, true) => (
            analytic::avg_fidelity_phi_twoqubit(x)?.value(),
            Some(analytic::avg_fidelity_phi_twoqubit_assumed(x)?.value()),
        ),
        (other, true) => {
            return Err(Error::TargetMismatch {
                expected: NoiseTarget::Phi.name(),
                found: other.name(),
            })
        }
    };
    let target = spec.target;
    let s = run_ensemble(n_inputs, seed, |rng| {
        if two_qubit {
            let th = T::PI() * T::unit_uniform(rng);
            let half = T::FRAC_PI_2() * T::unit_uniform(rng);
            let input = TwoQubitInput::new(half.cos(), T::zero(), T::zero(), half.sin())?;
            return Ok(analytic::fidelity_phi_twoqubit(th, &input, x)?.value());
        }
        let input = random_input(rng);
        let v = match target {
            NoiseTarget::Omega => analytic::fidelity_omega(theta, phi, &input, x)?,
            NoiseTarget::Theta => {
                analytic::fidelity_theta_model(phi + input.eta(), input.alpha(), input.beta(), x4)?
            }
            NoiseTarget::Phi => analytic::fidelity_phi(theta, phi, &input, x)?,
        };
        Ok(v.value())
    })?;
    Ok(InputAverageReport {
        target,
        analytic,
        exact,
        mc_mean: s.mean,
        mc_stderr: s.stderr,
        n_inputs: s.n,
        seed,
    })
}

/// Leakage population of an Ω-noise output state.
pub fn leakage<T: Real>(state: &PureState<T, 3>) -> T {
    state.amplitude(EXCITED).norm_sqr()
}
