//! Λ-system drive: pulse envelopes, the resonant rotating-frame Hamiltonian,
//! its closed-form propagator and the holonomic gates obtained from a cyclic
//! (π-area) pulse.
//!
//! Basis ordering is `(|0⟩, |1⟩, |e⟩)` for the three-level system and
//! `(|00⟩, |01⟩, |10⟩, |11⟩)` for two qubits.
//!
//! # Frame convention
//!
//! The lab-frame Hamiltonian `ω_e|e⟩⟨e| + ω₁|1⟩⟨1| + Ω(t)[a₀|e⟩⟨0| + b₀|e⟩⟨1| + h.c.]`
//! becomes time independent in the frame `U₀ = exp[i(ω_e|e⟩⟨e| + ω₁|1⟩⟨1|)t]`
//! once `a₀ ∝ e^{−iω_e t}` and `b₀ ∝ e^{−i(ω_e−ω₁)t}`. Everything below works
//! in that frame; [`lab_hamiltonian`] and [`frame_rotation`] exist so the
//! reduction can be checked.
//!
//! The closed-form [`propagator`] uses the `+i sin Ω̄` sign on the
//! qubit–|e⟩ entries. That equals `exp(+i∫H₁)`, or equivalently
//! `exp(−i∫H₁)` after the gauge change `|e⟩ → −|e⟩`. Populations, the
//! projected gate and every fidelity are unaffected by the choice.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analytic::InputState;
use crate::error::{Error, Result};
use crate::qcore::{Matrix, PureState};
use crate::real::Real;

/// Index of the auxiliary excited level.
pub const EXCITED: usize = 2;

/// Rabi-frequency envelope Ω(t) on `[0, duration]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope<T> {
    /// Ω(t) = amplitude.
    Constant { duration: T, amplitude: T },
    /// Ω(t) = amplitude · sin²(πt / duration).
    SineSquared { duration: T, amplitude: T },
    /// Piecewise-linear interpolation of samples on a uniform grid that
    /// includes both endpoints.
    Sampled { duration: T, samples: Vec<T> },
}

impl<T: Real> Envelope<T> {
    /// Constant envelope already normalized to a π pulse.
    pub fn constant_pi(duration: T) -> Result<Self> {
        Self::Constant {
            duration,
            amplitude: T::one(),
        }
        .normalize_to_pi()
    }

    pub fn sine_squared_pi(duration: T) -> Result<Self> {
        Self::SineSquared {
            duration,
            amplitude: T::one(),
        }
        .normalize_to_pi()
    }

    pub fn duration(&self) -> T {
        match self {
            Self::Constant { duration, .. }
            | Self::SineSquared { duration, .. }
            | Self::Sampled { duration, .. } => *duration,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.duration();
        if !d.is_finite() || d <= T::zero() {
            return Err(Error::InvalidEnvelope(format!("duration {d} must be positive")));
        }
        match self {
            Self::Constant { amplitude, .. } | Self::SineSquared { amplitude, .. } => {
                if !amplitude.is_finite() || *amplitude < T::zero() {
                    return Err(Error::InvalidEnvelope(format!(
                        "amplitude {amplitude} must be finite and non-negative"
                    )));
                }
            }
            Self::Sampled { samples, .. } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidEnvelope("need at least two samples".into()));
                }
                if samples.iter().any(|s| !s.is_finite() || *s < T::zero()) {
                    return Err(Error::InvalidEnvelope(
                        "samples must be finite and non-negative".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_time(&self, t: T) -> Result<()> {
        let d = self.duration();
        if !(t >= T::zero() && t <= d) {
            return Err(Error::TimeOutOfRange {
                t: t.to_f64().unwrap_or(f64::NAN),
                duration: d.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    fn sample_step(duration: T, samples: &[T]) -> T {
        duration / T::from_usize_lossy(samples.len() - 1)
    }

    /// Ω(t).
    pub fn omega(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok(match self {
            Self::Constant { amplitude, .. } => *amplitude,
            Self::SineSquared {
                duration,
                amplitude,
            } => {
                let s = (T::PI() * t / *duration).sin();
                *amplitude * s * s
            }
            Self::Sampled { duration, samples } => {
                let dt = Self::sample_step(*duration, samples);
                let pos = t / dt;
                let i = pos.floor().to_usize().unwrap_or(0).min(samples.len() - 2);
                let frac = pos - T::from_usize_lossy(i);
                samples[i] + (samples[i + 1] - samples[i]) * frac
            }
        })
    }

    /// Ω̄(t) = ∫₀ᵗ Ω(s) ds; closed form for the analytic shapes, the
    /// integral of the linear interpolant (trapezoid) for samples.
    pub fn omega_bar(&self, t: T) -> Result<T> {
        self.check_time(t)?;
        Ok(match self {
            Self::Constant { amplitude, .. } => *amplitude * t,
            Self::SineSquared {
                duration,
                amplitude,
            } => {
                let two_pi = T::lit(2.0) * T::PI();
                *amplitude
                    * (t / T::lit(2.0) - *duration * (two_pi * t / *duration).sin() / (T::lit(2.0) * two_pi))
            }
            Self::Sampled { duration, samples } => {
                let dt = Self::sample_step(*duration, samples);
                let pos = t / dt;
                let full = pos.floor().to_usize().unwrap_or(0).min(samples.len() - 1);
                let half = T::lit(0.5);
                let mut acc = T::zero();
                for k in 0..full {
                    acc = acc + half * (samples[k] + samples[k + 1]) * dt;
                }
                if full < samples.len() - 1 {
                    let tau = t - T::from_usize_lossy(full) * dt;
                    if tau > T::zero() {
                        let slope = (samples[full + 1] - samples[full]) / dt;
                        acc = acc + samples[full] * tau + half * slope * tau * tau;
                    }
                }
                acc
            }
        })
    }

    /// Pulse area ∫₀ᵀ Ω.
    pub fn area(&self) -> Result<T> {
        self.omega_bar(self.duration())
    }

    /// Rescales the amplitude so the total area is π.
    pub fn normalize_to_pi(&self) -> Result<Self> {
        self.validate()?;
        let area = self.area()?;
        if area <= T::zero() {
            return Err(Error::InvalidEnvelope("zero-area envelope cannot be normalized".into()));
        }
        let k = T::PI() / area;
        Ok(match self {
            Self::Constant {
                duration,
                amplitude,
            } => Self::Constant {
                duration: *duration,
                amplitude: *amplitude * k,
            },
            Self::SineSquared {
                duration,
                amplitude,
            } => Self::SineSquared {
                duration: *duration,
                amplitude: *amplitude * k,
            },
            Self::Sampled { duration, samples } => Self::Sampled {
                duration: *duration,
                samples: samples.iter().map(|s| *s * k).collect(),
            },
        })
    }

    pub fn is_pi_pulse(&self) -> bool {
        self.area()
            .map(|a| (a - T::PI()).abs() <= T::UNITARY_TOL)
            .unwrap_or(false)
    }
}

/// Control phases plus envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig<T> {
    pub theta: T,
    pub phi: T,
    pub envelope: Envelope<T>,
}

impl<T: Real> DriveConfig<T> {
    pub fn new(theta: T, phi: T, envelope: Envelope<T>) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite("control phases"));
        }
        envelope.validate()?;
        Ok(Self {
            theta,
            phi,
            envelope,
        })
    }

    /// a = sin(θ/2) e^{iφ}
    pub fn a(&self) -> Complex<T> {
        Complex::from_polar((self.theta / T::lit(2.0)).sin(), self.phi)
    }

    /// b = cos(θ/2)
    pub fn b(&self) -> Complex<T> {
        Complex::new((self.theta / T::lit(2.0)).cos(), T::zero())
    }
}

/// Catalog of named gates reachable with the projected holonomic gate.
///
/// Entries agree with the textbook gates only up to a global phase: the
/// projected gate always has determinant −1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateKind<T> {
    /// θ = 3π/4, φ = 0: equals −H.
    Hadamard,
    /// θ = π/2, φ = π.
    PauliX,
    /// θ = 0, φ arbitrary (taken as 0).
    PauliZ,
    /// θ = 3π/2 with free φ: [[0, e^{−iφ}], [e^{iφ}, 0]].
    PhaseShift { phi: T },
    Custom { theta: T, phi: T },
}

impl<T: Real> GateKind<T> {
    /// (θ, φ)
    pub fn angles(&self) -> (T, T) {
        let pi = T::PI();
        match *self {
            Self::Hadamard => (T::lit(3.0) * pi / T::lit(4.0), T::zero()),
            Self::PauliX => (pi / T::lit(2.0), pi),
            Self::PauliZ => (T::zero(), T::zero()),
            Self::PhaseShift { phi } => (T::lit(3.0) * pi / T::lit(2.0), phi),
            Self::Custom { theta, phi } => (theta, phi),
        }
    }

    pub fn gate(&self) -> Matrix<T, 2> {
        let (theta, phi) = self.angles();
        holonomic_gate(theta, phi)
    }
}

/// Textbook single-qubit gates used to name a matrix up to global phase.
pub fn textbook_gates<T: Real>() -> Vec<(&'static str, Matrix<T, 2>)> {
    let z = Complex::<T>::zero();
    let o = Complex::<T>::one();
    let i = Complex::<T>::i();
    let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let t_phase = Complex::from_polar(T::one(), T::FRAC_PI_4());
    let m = |rows| Matrix::from_rows(rows).expect("finite literal gate");
    vec![
        ("identity", m([[o, z], [z, o]])),
        ("hadamard", m([[h, h], [h, -h]])),
        ("pauli_x", m([[z, o], [o, z]])),
        ("pauli_y", m([[z, -i], [i, z]])),
        ("pauli_z", m([[o, z], [z, -o]])),
        ("s", m([[o, z], [z, i]])),
        ("t", m([[o, z], [z, t_phase]])),
    ]
}

/// Name of the textbook gate equal to `u` up to global phase, if any.
pub fn identify_gate<T: Real>(u: &Matrix<T, 2>, tol: T) -> Option<&'static str> {
    textbook_gates::<T>()
        .into_iter()
        .find(|(_, g)| u.phase_insensitive_diff(g) <= tol)
        .map(|(name, _)| name)
}

/// Ω̄(t) for the configured envelope.
pub fn omega_bar<T: Real>(env: &Envelope<T>, t: T) -> Result<T> {
    env.omega_bar(t)
}

/// H₁(t) = Ω(t)[a|e⟩⟨0| + b|e⟩⟨1| + h.c.]; Hermitian, not unitary.
pub fn hamiltonian_h1<T: Real>(cfg: &DriveConfig<T>, t: T) -> Result<Matrix<T, 3>> {
    let omega = cfg.envelope.omega(t)?;
    Ok(coupling_matrix(cfg.a(), cfg.b(), omega))
}

fn coupling_matrix<T: Real>(a: Complex<T>, b: Complex<T>, omega: T) -> Matrix<T, 3> {
    let z = Complex::zero();
    let (ea, eb) = (a.scale(omega), b.scale(omega));
    Matrix::from_rows([
        [z, z, ea.conj()],
        [z, z, eb.conj()],
        [ea, eb, z],
    ])
    .expect("finite coupling")
}

/// Closed-form propagator for accumulated pulse area `area`.
pub fn propagator_for_area<T: Real>(theta: T, phi: T, area: T) -> Matrix<T, 3> {
    let half = theta / T::lit(2.0);
    let (sh, ch) = (half.sin(), half.cos());
    let (c, s) = (area.cos(), area.sin());
    let st2 = theta.sin() / T::lit(2.0);
    let e_m = Complex::from_polar(T::one(), -phi);
    let e_p = Complex::from_polar(T::one(), phi);
    let i = Complex::<T>::i();
    let re = |v: T| Complex::new(v, T::zero());
    Matrix::from_rows([
        [
            re(sh * sh * c + ch * ch),
            e_m.scale(st2 * (c - T::one())),
            i * e_m.scale(sh * s),
        ],
        [
            e_p.scale(st2 * (c - T::one())),
            re(ch * ch * c + sh * sh),
            i.scale(ch * s),
        ],
        [i * e_p.scale(sh * s), i.scale(ch * s), re(c)],
    ])
    .expect("finite propagator")
}

/// U(t) with Ω̄ = omega_bar(t).
pub fn propagator<T: Real>(cfg: &DriveConfig<T>, t: T) -> Result<Matrix<T, 3>> {
    let area = cfg.envelope.omega_bar(t)?;
    Ok(propagator_for_area(cfg.theta, cfg.phi, area))
}

/// Projected holonomic gate `[[cosθ, −sinθ e^{−iφ}], [−sinθ e^{iφ}, −cosθ]]`.
pub fn holonomic_gate<T: Real>(theta: T, phi: T) -> Matrix<T, 2> {
    let (s, c) = theta.sin_cos();
    Matrix::from_rows([
        [Complex::new(c, T::zero()), -Complex::from_polar(s, -phi)],
        [-Complex::from_polar(s, phi), Complex::new(-c, T::zero())],
    ])
    .expect("finite gate")
}

/// Noise-free output of the holonomic gate, written out component-wise.
pub fn ideal_output<T: Real>(theta: T, phi: T, input: &InputState<T>) -> PureState<T, 2> {
    let (s, c) = theta.sin_cos();
    let (alpha, beta, eta) = (input.alpha(), input.beta(), input.eta());
    let c0 = Complex::from_polar(alpha * c, eta) - Complex::from_polar(beta * s, -phi);
    let c1 = -(Complex::from_polar(alpha * s, eta + phi) + Complex::new(beta * c, T::zero()));
    PureState::new([c0, c1]).expect("gate output of a normalized input")
}

/// Two-qubit holonomic gate on `(|00⟩, |01⟩, |10⟩, |11⟩)`.
pub fn two_qubit_gate<T: Real>(theta: T, phi: T) -> Matrix<T, 4> {
    let (s, c) = theta.sin_cos();
    let z = Complex::zero();
    let o = Complex::one();
    let re = |v: T| Complex::new(v, T::zero());
    Matrix::from_rows([
        [re(c), z, z, Complex::from_polar(s, -phi)],
        [z, z, o, z],
        [z, o, z, z],
        [Complex::from_polar(s, phi), z, z, re(-c)],
    ])
    .expect("finite gate")
}

/// max over grid points and k, l ∈ {0, 1} of |⟨k|U†(s)H₁(s)U(s)|l⟩|.
///
/// Zero means the evolution carries no dynamical phase inside the qubit
/// subspace.
pub fn geometric_defect<T: Real>(cfg: &DriveConfig<T>, grid: &[T]) -> Result<T> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut worst = T::zero();
    for &s in grid {
        let u = propagator(cfg, s).map_err(|_| Error::GridOutOfRange(s.to_f64().unwrap_or(f64::NAN)))?;
        let h = hamiltonian_h1(cfg, s)?;
        let m = u.adjoint().matmul(&h).matmul(&u);
        for k in 0..2 {
            for l in 0..2 {
                worst = worst.max(m.get(k, l).norm());
            }
        }
    }
    Ok(worst)
}

/// `n` uniformly spaced points covering `[0, duration]` inclusive.
pub fn uniform_grid<T: Real>(duration: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![T::zero()],
        _ => {
            let step = duration / T::from_usize_lossy(n - 1);
            (0..n)
                .map(|k| if k == n - 1 { duration } else { step * T::from_usize_lossy(k) })
                .collect()
        }
    }
}

/// Lab-frame Hamiltonian with bare energies `omega_e`, `omega_1` and drive
/// coefficients chosen so the rotating-frame coefficients are `cfg.a()`,
/// `cfg.b()`.
pub fn lab_hamiltonian<T: Real>(cfg: &DriveConfig<T>, omega_e: T, omega_1: T, t: T) -> Result<Matrix<T, 3>> {
    let omega = cfg.envelope.omega(t)?;
    let a0 = cfg.a() * Complex::from_polar(T::one(), -omega_e * t);
    let b0 = cfg.b() * Complex::from_polar(T::one(), -(omega_e - omega_1) * t);
    let mut h = coupling_matrix(a0, b0, omega);
    h = h + diag3(T::zero(), omega_1, omega_e);
    Ok(h)
}

/// U₀(t) = exp[i(ω_e|e⟩⟨e| + ω₁|1⟩⟨1|)t].
pub fn frame_rotation<T: Real>(omega_e: T, omega_1: T, t: T) -> Matrix<T, 3> {
    let mut m = Matrix::zeros();
    let rows = [
        Complex::one(),
        Complex::from_polar(T::one(), omega_1 * t),
        Complex::from_polar(T::one(), omega_e * t),
    ];
    for (k, v) in rows.into_iter().enumerate() {
        m = m + Matrix::outer(&basis3(k), &basis3(k)).scale(v);
    }
    m
}

fn basis3<T: Real>(k: usize) -> [Complex<T>; 3] {
    *PureState::<T, 3>::basis(k).amplitudes()
}

fn diag3<T: Real>(d0: T, d1: T, d2: T) -> Matrix<T, 3> {
    let z = Complex::zero();
    let re = |v: T| Complex::new(v, T::zero());
    Matrix::from_rows([[re(d0), z, z], [z, re(d1), z], [z, z, re(d2)]]).expect("finite diagonal")
}

/// U₀H₀U₀† + i(dU₀/dt)U₀†; the generator seen in the rotating frame.
pub fn rotate_into_frame<T: Real>(lab: &Matrix<T, 3>, omega_e: T, omega_1: T, t: T) -> Matrix<T, 3> {
    let u0 = frame_rotation(omega_e, omega_1, t);
    u0.matmul(lab).matmul(&u0.adjoint()) - diag3(T::zero(), omega_1, omega_e)
}
