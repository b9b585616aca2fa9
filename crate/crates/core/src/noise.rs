//! Classical Gaussian noise on a single drive parameter.
//!
//! Two processes are supported: stationary Ornstein–Uhlenbeck with
//! correlation Γγ/2·e^{−γ|t−s|}, and its γ → ∞ white limit Γδ(t−s). Every
//! fidelity depends on the process only through the ordered double integral
//! C̄(T) = ∫₀ᵀdt₁∫₀^{t₁}dt₂ C(t₁, t₂), so the integral Δ(T) = ∫₀ᵀδ is
//! Gaussian with variance 2C̄(T). White noise is handled through integral
//! statistics only; it has no pointwise samples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::StreamRng;
use crate::stats::{summarize, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseProcess<T> {
    /// Ornstein–Uhlenbeck with intensity Γ and memory rate γ.
    Ou { intensity: T, memory: T },
    /// White noise of intensity Γ.
    White { intensity: T },
}

/// Which drive parameter fluctuates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTarget {
    Omega,
    Theta,
    Phi,
}

impl NoiseTarget {
    pub fn name(self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::Theta => "theta",
            Self::Phi => "phi",
        }
    }
}

/// One fluctuating parameter and its process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec<T> {
    pub target: NoiseTarget,
    pub process: NoiseProcess<T>,
}

impl<T: Real> NoiseSpec<T> {
    pub fn new(target: NoiseTarget, process: NoiseProcess<T>) -> Result<Self> {
        process.validate()?;
        Ok(Self { target, process })
    }

    pub fn expect_target(&self, expected: NoiseTarget) -> Result<()> {
        if self.target == expected {
            Ok(())
        } else {
            Err(Error::TargetMismatch {
                expected: expected.name(),
                found: self.target.name(),
            })
        }
    }
}

/// Samples on a uniform grid of step `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub dt: T,
    pub values: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn duration(&self) -> T {
        self.dt * T::from_usize_lossy(self.values.len().saturating_sub(1))
    }

    /// Trapezoid integral over the whole grid.
    pub fn trapezoid(&self) -> T {
        let half = T::lit(0.5);
        self.values
            .windows(2)
            .fold(T::zero(), |acc, w| acc + half * (w[0] + w[1]) * self.dt)
    }
}

impl<T: Real> NoiseProcess<T> {
    pub fn ou(intensity: T, memory: T) -> Result<Self> {
        let p = Self::Ou { intensity, memory };
        p.validate()?;
        Ok(p)
    }

    pub fn white(intensity: T) -> Result<Self> {
        let p = Self::White { intensity };
        p.validate()?;
        Ok(p)
    }

    /// Γ must be positive; zero intensity is accepted as the noiseless limit.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProcess(msg));
        match *self {
            Self::Ou { intensity, memory } => {
                if !(intensity.is_finite() && intensity >= T::zero()) {
                    return bad(format!("intensity {intensity} must be finite and non-negative"));
                }
                if !(memory.is_finite() && memory > T::zero()) {
                    return bad(format!("memory rate {memory} must be positive"));
                }
            }
            Self::White { intensity } => {
                if !(intensity.is_finite() && intensity >= T::zero()) {
                    return bad(format!("intensity {intensity} must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    pub fn intensity(&self) -> T {
        match *self {
            Self::Ou { intensity, .. } | Self::White { intensity } => intensity,
        }
    }

    /// Stationary variance Γγ/2 of an OU process.
    fn stationary_variance(&self) -> Result<T> {
        match *self {
            Self::Ou { intensity, memory } => Ok(intensity * memory / T::lit(2.0)),
            Self::White { .. } => Err(Error::WhiteNoisePointwise("variance")),
        }
    }
}

fn check_nonneg<T: Real>(t: T) -> Result<()> {
    if t >= T::zero() {
        Ok(())
    } else {
        Err(Error::NegativeDuration(t.to_f64().unwrap_or(f64::NAN)))
    }
}

/// C(t, s) = ⟨δ(t)δ(s)⟩; only defined pointwise for OU.
pub fn corr<T: Real>(process: &NoiseProcess<T>, t: T, s: T) -> Result<T> {
    check_nonneg(t)?;
    check_nonneg(s)?;
    match *process {
        NoiseProcess::Ou { memory, .. } => {
            Ok(process.stationary_variance()? * (-memory * (t - s).abs()).exp())
        }
        NoiseProcess::White { .. } => Err(Error::WhiteNoisePointwise("correlation")),
    }
}

/// e^{−z} + z − 1 without cancellation at small z.
fn ou_shape<T: Real>(z: T) -> T {
    if z < T::lit(1e-2) {
        // z²/2 − z³/6 + z⁴/24 − z⁵/120 + z⁶/720
        let mut term = z * z / T::lit(2.0);
        let mut acc = term;
        for k in 3..=6 {
            term = -term * z / T::from_usize_lossy(k);
            acc = acc + term;
        }
        acc
    } else {
        (-z).exp_m1() + z
    }
}

/// C̄(T) = ∫₀ᵀdt₁∫₀^{t₁}dt₂ C(t₁, t₂).
///
/// OU: Γ(e^{−γT} + γT − 1)/(2γ). White: ΓT/2, taking half of the δ mass at
/// the t₂ = t₁ endpoint.
pub fn cbar<T: Real>(process: &NoiseProcess<T>, duration: T) -> Result<T> {
    check_nonneg(duration)?;
    Ok(match *process {
        NoiseProcess::Ou { intensity, memory } => {
            intensity * ou_shape(memory * duration) / (T::lit(2.0) * memory)
        }
        NoiseProcess::White { intensity } => intensity * duration / T::lit(2.0),
    })
}

/// x(T) = e^{−C̄(T)} ∈ (0, 1].
pub fn decay_x<T: Real>(process: &NoiseProcess<T>, duration: T) -> Result<T> {
    Ok((-cbar(process, duration)?).exp())
}

/// e^{−4C̄(T)}, the decay of the doubled phase.
pub fn decay_x4<T: Real>(process: &NoiseProcess<T>, duration: T) -> Result<T> {
    Ok((-T::lit(4.0) * cbar(process, duration)?).exp())
}

fn grid_steps<T: Real>(duration: T, dt: T) -> Result<(usize, T)> {
    if !(dt > T::zero() && dt <= duration) {
        return Err(Error::InvalidStep {
            dt: dt.to_f64().unwrap_or(f64::NAN),
            duration: duration.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = (duration / dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
    Ok((n, duration / T::from_usize_lossy(n)))
}

/// Stationary OU path on `[0, duration]`.
///
/// The requested `dt` is shrunk so the grid lands exactly on `duration`.
/// Updates use the exact transition δ' = δe^{−γdt} + √(Γγ/2·(1−e^{−2γdt}))·ξ.
pub fn sample_path<T: Real, R: Rng + ?Sized>(
    process: &NoiseProcess<T>,
    duration: T,
    dt: T,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    let var = process.stationary_variance().map_err(|_| Error::WhiteNoisePointwise("samples"))?;
    let NoiseProcess::Ou { memory, .. } = *process else {
        unreachable!("white noise rejected above")
    };
    let (n, dt) = grid_steps(duration, dt)?;
    let decay = (-memory * dt).exp();
    let kick = (var * -(T::lit(-2.0) * memory * dt).exp_m1()).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut d = var.sqrt() * T::standard_normal(rng);
    values.push(d);
    for _ in 0..n {
        d = d * decay + kick * T::standard_normal(rng);
        values.push(d);
    }
    Ok(Trajectory { dt, values })
}

/// Per-step increments of Δ(t) = ∫₀ᵗδ on a grid of step ≈ `dt`.
///
/// OU increments are trapezoid integrals of a sampled path; white-noise
/// increments are independent N(0, Γ·dt) so that Var Δ(T) = ΓT = 2C̄(T).
pub fn sample_increments<T: Real, R: Rng + ?Sized>(
    process: &NoiseProcess<T>,
    duration: T,
    dt: T,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    match *process {
        NoiseProcess::Ou { .. } => {
            let path = sample_path(process, duration, dt, rng)?;
            let half = T::lit(0.5);
            let values = path
                .values
                .windows(2)
                .map(|w| half * (w[0] + w[1]) * path.dt)
                .collect();
            Ok(Trajectory { dt: path.dt, values })
        }
        NoiseProcess::White { intensity } => {
            let (n, dt) = grid_steps(duration, dt)?;
            let sd = (intensity * dt).sqrt();
            let values = (0..n).map(|_| sd * T::standard_normal(rng)).collect();
            Ok(Trajectory { dt, values })
        }
    }
}

/// Δ(T) accumulated from a sampled path.
pub fn path_integral<T: Real, R: Rng + ?Sized>(
    process: &NoiseProcess<T>,
    duration: T,
    dt: T,
    rng: &mut R,
) -> Result<T> {
    let inc = sample_increments(process, duration, dt, rng)?;
    Ok(inc.values.iter().fold(T::zero(), |acc, v| acc + *v))
}

/// Δ(T) drawn directly from N(0, 2C̄(T)).
pub fn sample_integral<T: Real, R: Rng + ?Sized>(
    process: &NoiseProcess<T>,
    duration: T,
    rng: &mut R,
) -> Result<T> {
    let sd = (T::lit(2.0) * cbar(process, duration)?).sqrt();
    if sd == T::zero() {
        return Ok(T::zero());
    }
    Ok(sd * T::standard_normal(rng))
}

/// Analytic and empirical sides of a Gaussian characteristic-functional
/// identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalAverage<T> {
    pub analytic: T,
    /// Ensemble mean of the real part.
    pub empirical: T,
    pub stderr: T,
    /// Ensemble mean of the imaginary part; zero in expectation.
    pub empirical_imag: T,
    pub imag_stderr: T,
    pub n: usize,
}

impl<T: Real> FunctionalAverage<T> {
    /// |empirical − analytic| within `k` standard errors (with a 1e-12 floor
    /// for degenerate ensembles).
    pub fn agrees_within(&self, k: T) -> bool {
        let floor = T::lit(1e-12);
        (self.empirical - self.analytic).abs() <= k * self.stderr + floor
            && self.empirical_imag.abs() <= k * self.imag_stderr + floor
    }
}

fn functional_average<T: Real>(analytic: T, phases: &[T]) -> FunctionalAverage<T> {
    let re: Vec<T> = phases.iter().map(|p| p.cos()).collect();
    let im: Vec<T> = phases.iter().map(|p| p.sin()).collect();
    let Summary { mean, stderr, n } = summarize(&re);
    let imag = summarize(&im);
    FunctionalAverage {
        analytic,
        empirical: mean,
        stderr,
        empirical_imag: imag.mean,
        imag_stderr: imag.stderr,
        n,
    }
}

/// M[e^{imΔ(T)}] against e^{−m²C̄(T)}.
pub fn functional_average_oracle<T: Real>(
    process: &NoiseProcess<T>,
    duration: T,
    m: T,
    samples: usize,
    stream: &StreamRng,
) -> Result<FunctionalAverage<T>> {
    if samples == 0 {
        return Err(Error::NoTrajectories);
    }
    let analytic = (-m * m * cbar(process, duration)?).exp();
    let phases = (0..samples as u64)
        .map(|i| sample_integral(process, duration, &mut stream.substream(i)).map(|d| m * d))
        .collect::<Result<Vec<T>>>()?;
    Ok(functional_average(analytic, &phases))
}

/// M[e^{imδ(t)}] against e^{−m²C(t,t)/2}; OU only.
pub fn pointwise_average_oracle<T: Real>(
    process: &NoiseProcess<T>,
    m: T,
    samples: usize,
    stream: &StreamRng,
) -> Result<FunctionalAverage<T>> {
    if samples == 0 {
        return Err(Error::NoTrajectories);
    }
    let var = process.stationary_variance()?;
    let analytic = (-m * m * var / T::lit(2.0)).exp();
    let sd = var.sqrt();
    let phases: Vec<T> = (0..samples as u64)
        .map(|i| m * sd * T::standard_normal(&mut stream.substream(i)))
        .collect();
    Ok(functional_average(analytic, &phases))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou(g: f64, m: f64) -> NoiseProcess<f64> {
        NoiseProcess::ou(g, m).unwrap()
    }

    #[test]
    fn corr_examples() {
        assert!((corr(&ou(1.0, 2.0), 0.7, 0.7).unwrap() - 1.0).abs() < 1e-15);
        assert!(corr(&ou(1.0, 2.0), 0.0, 500.0).unwrap() < 1e-300);
        assert!((corr(&ou(2.0, 1.0), 2f64.ln(), 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            corr(&NoiseProcess::white(1.0).unwrap(), 0.0, 0.0),
            Err(Error::WhiteNoisePointwise("correlation"))
        );
        assert!(corr(&ou(1.0, 1.0), -1.0, 0.0).is_err());
    }

    #[test]
    fn cbar_examples() {
        assert_eq!(cbar(&ou(1.0, 1.0), 0.0).unwrap(), 0.0);
        let e = (-1.0f64).exp() / 2.0;
        assert!((cbar(&ou(1.0, 1.0), 1.0).unwrap() - e).abs() < 1e-15);
        assert!((cbar(&ou(1.0, 1.0), 1.0).unwrap() - 0.18394).abs() < 1e-5);
        assert!((cbar(&NoiseProcess::<f64>::white(1.0).unwrap(), 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(cbar(&ou(1.0, 1.0), -0.1).is_err());
    }

    #[test]
    fn cbar_small_argument_branch_is_continuous() {
        for z in [0.0099f64, 0.01, 0.0101] {
            let direct = (-z).exp_m1() + z;
            assert!(((ou_shape(z) - direct) / direct).abs() < 1e-9, "{z}");
        }
        // z²/2 leading behaviour
        let p = ou(1.0, 1.0);
        let t = 1e-6;
        assert!((cbar(&p, t).unwrap() / (t * t / 4.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn decay_examples() {
        assert_eq!(decay_x(&ou(1.0, 1.0), 0.0).unwrap(), 1.0);
        let x = decay_x(&ou(1.0, 1.0), 1.0).unwrap();
        assert!((x - 0.8320).abs() < 1e-4);
        let white = NoiseProcess::white(0.7).unwrap();
        assert!((decay_x(&white, 3.0).unwrap() - (-0.7f64 * 3.0 / 2.0).exp()).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..200 {
            let v = decay_x(&ou(0.8, 0.3), k as f64 * 0.1).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn ou_tends_to_white_as_memory_grows() {
        let white = decay_x(&NoiseProcess::white(1.3).unwrap(), 2.0).unwrap();
        let ou_fast = decay_x(&ou(1.3, 1e7), 2.0).unwrap();
        assert!((white - ou_fast).abs() < 1e-6);
        let ou_slow = decay_x(&ou(1.3, 1e-9), 2.0).unwrap();
        assert!((ou_slow - 1.0).abs() < 1e-8);
    }

    #[test]
    fn invalid_processes() {
        assert!(NoiseProcess::ou(1.0, 0.0).is_err());
        assert!(NoiseProcess::ou(-1.0, 1.0).is_err());
        assert!(NoiseProcess::white(f64::NAN).is_err());
    }

    #[test]
    fn white_has_no_pointwise_path() {
        let w = NoiseProcess::white(1.0).unwrap();
        let mut rng = StreamRng::new(1).substream(0);
        assert!(sample_path(&w, 1.0, 0.01, &mut rng).is_err());
        assert!(sample_increments(&w, 1.0, 0.01, &mut rng).is_ok());
    }

    #[test]
    fn grid_lands_on_duration() {
        let mut rng = StreamRng::new(3).substream(0);
        let path = sample_path(&ou(1.0, 1.0), 1.0, 0.3, &mut rng).unwrap();
        assert_eq!(path.values.len(), 5);
        assert!((path.duration() - 1.0).abs() < 1e-15);
        assert!(sample_path(&ou(1.0, 1.0), 1.0, 0.0, &mut rng).is_err());
        assert!(sample_path(&ou(1.0, 1.0), 1.0, 2.0, &mut rng).is_err());
    }

    #[test]
    fn sample_integral_zero_duration() {
        let mut rng = StreamRng::new(5).substream(0);
        for _ in 0..10 {
            assert_eq!(sample_integral(&ou(3.0, 2.0), 0.0, &mut rng).unwrap(), 0.0);
        }
    }

    #[test]
    fn functional_oracle_examples() {
        let s = StreamRng::new(11);
        let r = functional_average_oracle(&ou(1.0, 1.0), 1.0, 0.0, 100, &s).unwrap();
        assert_eq!(r.analytic, 1.0);
        assert_eq!(r.empirical, 1.0);
        let r = functional_average_oracle(&ou(1.0, 1.0), 1.0, 2.0, 10, &s).unwrap();
        assert!((r.analytic - 0.4790).abs() < 2e-4);
        let r = functional_average_oracle(&NoiseProcess::white(1.0).unwrap(), 2.0, 1.0, 10, &s).unwrap();
        assert!((r.analytic - (-1.0f64).exp()).abs() < 1e-15);
    }
}
