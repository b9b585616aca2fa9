//! Closed-form transformation fidelities under Gaussian control noise.
//!
//! Every formula takes the decay value `x = e^{−C̄}` (or `x4 = e^{−4C̄}`)
//! instead of a noise process; [`crate::noise::decay_x`] supplies it.
//!
//! Two reference per-input formulas disagree with the gate model they are
//! meant to describe, and both versions are exposed:
//!
//! * [`fidelity_theta`] is the reference θ-noise expression. The gate
//!   model gives ⟨Ψ|ψ_θ⟩ = cos Δ + 2iαβ sin(φ+η) sin Δ, so its exact
//!   average ([`fidelity_theta_model`]) has sin²(φ+η) where the reference
//!   one has cos². The input averages coincide.
//! * [`fidelity_phi_twoqubit`] is the reference two-qubit φ-noise
//!   expression. It drops the |00⟩/|11⟩ coherence term of the overlap and
//!   is exact only when `c00·c11·sin 2θ = 0`; [`fidelity_phi_twoqubit_model`]
//!   keeps it.
//!
//! The exact versions are built on [`gaussian_phase_average`], which
//! averages |K + P e^{iΔ} + Q e^{−iΔ}|² over Δ ~ N(0, 2C̄).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::qcore::PureState;
use crate::real::Real;

/// Single-qubit input α e^{iη}|0⟩ + β|1⟩ with real α, β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInput<T>", into = "RawInput<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct InputState<T> {
    alpha: T,
    beta: T,
    eta: T,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput<T> {
    alpha: T,
    beta: T,
    eta: T,
}

impl<T: Real> TryFrom<RawInput<T>> for InputState<T> {
    type Error = Error;
    fn try_from(r: RawInput<T>) -> Result<Self> {
        Self::new(r.alpha, r.beta, r.eta)
    }
}

impl<T: Real> From<InputState<T>> for RawInput<T> {
    fn from(s: InputState<T>) -> Self {
        Self {
            alpha: s.alpha,
            beta: s.beta,
            eta: s.eta,
        }
    }
}

impl<T: Real> InputState<T> {
    pub fn new(alpha: T, beta: T, eta: T) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && eta.is_finite()) {
            return Err(Error::NonFinite("input state"));
        }
        let n = alpha * alpha + beta * beta;
        if (n - T::one()).abs() > T::NORM_TOL {
            return Err(Error::Unnormalized(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { alpha, beta, eta })
    }

    /// α = cos(φ₁/2), β = sin(φ₁/2).
    pub fn from_angles(phi1: T, eta: T) -> Result<Self> {
        let half = phi1 / T::lit(2.0);
        Self::new(half.cos(), half.sin(), eta)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn to_state(&self) -> PureState<T, 2> {
        PureState::new([
            Complex::from_polar(self.alpha, self.eta),
            Complex::new(self.beta, T::zero()),
        ])
        .expect("validated input")
    }
}

/// Real two-qubit input c00|00⟩ + c01|01⟩ + c10|10⟩ + c11|11⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[T; 4]", into = "[T; 4]")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct TwoQubitInput<T> {
    c: [T; 4],
}

impl<T: Real> TryFrom<[T; 4]> for TwoQubitInput<T> {
    type Error = Error;
    fn try_from(c: [T; 4]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl<T: Real> From<TwoQubitInput<T>> for [T; 4] {
    fn from(s: TwoQubitInput<T>) -> Self {
        s.c
    }
}

impl<T: Real> TwoQubitInput<T> {
    pub fn new(c00: T, c01: T, c10: T, c11: T) -> Result<Self> {
        let c = [c00, c01, c10, c11];
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("two-qubit input"));
        }
        let n = c.iter().fold(T::zero(), |acc, v| acc + *v * *v);
        if (n - T::one()).abs() > T::NORM_TOL {
            return Err(Error::Unnormalized(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { c })
    }

    pub fn c00(&self) -> T {
        self.c[0]
    }
    pub fn c01(&self) -> T {
        self.c[1]
    }
    pub fn c10(&self) -> T {
        self.c[2]
    }
    pub fn c11(&self) -> T {
        self.c[3]
    }

    pub fn to_state(&self) -> PureState<T, 4> {
        PureState::new(self.c.map(|v| Complex::new(v, T::zero()))).expect("validated input")
    }
}

/// A fidelity in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FidelityValue<T>(T);

impl<T: Real> FidelityValue<T> {
    /// Clamps rounding excursions of up to `T::NORM_TOL` outside [0, 1].
    pub fn new(v: T) -> Self {
        debug_assert!(
            v >= -T::NORM_TOL && v <= T::one() + T::NORM_TOL,
            "fidelity {v} outside [0, 1]"
        );
        Self(v.max(T::zero()).min(T::one()))
    }

    pub fn value(self) -> T {
        self.0
    }
}

fn check_decay<T: Real>(x: T) -> Result<()> {
    if x > T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::DecayOutOfRange(x.to_f64().unwrap_or(f64::NAN)))
    }
}

fn pow4<T: Real>(x: T) -> T {
    let x2 = x * x;
    x2 * x2
}

/// f(θ, φ) = α²cos²(θ/2) + β²sin²(θ/2) − αβ sinθ cos(φ+η): the population of
/// the input on the dark state (b, −a).
pub fn f_functional<T: Real>(theta: T, phi: T, input: &InputState<T>) -> T {
    let (sh, ch) = (theta / T::lit(2.0)).sin_cos();
    let (a, b) = (input.alpha, input.beta);
    let f = a * a * ch * ch + b * b * sh * sh - a * b * theta.sin() * (phi + input.eta).cos();
    f.max(T::zero()).min(T::one())
}

/// Ω-noise fidelity in terms of the dark-state population `f`.
pub fn fidelity_omega_from_f<T: Real>(f: T, x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    Ok(FidelityValue::new(bounds::omega_poly(f, x)))
}

pub fn fidelity_omega<T: Real>(theta: T, phi: T, input: &InputState<T>, x: T) -> Result<FidelityValue<T>> {
    fidelity_omega_from_f(f_functional(theta, phi, input), x)
}

/// Reference input average (3 + 4x + x⁴)/8.
pub fn avg_fidelity_omega<T: Real>(x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    Ok(FidelityValue::new(bounds::avg_omega_poly(x)))
}

/// Exact input average of the Ω-noise fidelity for gate angle θ.
///
/// Uses E[f] = 1/2 and E[f²] = 3/8 − sin²θ/16 under the uniform (φ₁, η)
/// measure. The reference average corresponds to E[f²] = 1/4 and is
/// θ independent.
pub fn avg_fidelity_omega_exact<T: Real>(theta: T, x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    let s = theta.sin();
    let ef2 = T::lit(0.375) - s * s / T::lit(16.0);
    let curvature = (T::lit(3.0) - T::lit(4.0) * x + pow4(x)) / T::lit(2.0);
    Ok(FidelityValue::new(x + curvature * ef2))
}

/// Root of x⁴ − 2x + 1 in [0.1, 0.9] (the x < 1 one), by bisection to 1e-12.
pub fn critical_decay<T: Real>() -> T {
    let p = |x: T| pow4(x) - T::lit(2.0) * x + T::one();
    let (mut lo, mut hi) = (T::lit(0.1), T::lit(0.9));
    let tol = T::lit(1e-12).max(T::epsilon());
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if p(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    (lo + hi) / T::lit(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinFidelity<T> {
    /// Dark-state population at which the minimum is attained.
    pub f_star: T,
    pub value: FidelityValue<T>,
}

/// Minimum of the Ω-noise fidelity over inputs and gates at decay `x`.
pub fn min_fidelity_omega<T: Real>(x: T) -> Result<MinFidelity<T>> {
    check_decay(x)?;
    let x4 = pow4(x);
    let f_star = if x <= critical_decay() {
        (x4 - T::lit(2.0) * x + T::one()) / (T::lit(3.0) - T::lit(4.0) * x + x4)
    } else {
        T::zero()
    };
    let value = fidelity_omega_from_f(f_star, x)?;
    Ok(MinFidelity { f_star, value })
}

/// Input with f = 1 for gate (θ, φ): α = cos(θ/2), β = −sin(θ/2), η = −φ.
pub fn omega_sweet_spot_input<T: Real>(theta: T, phi: T) -> InputState<T> {
    let (sh, ch) = (theta / T::lit(2.0)).sin_cos();
    InputState::new(ch, -sh, -phi).expect("unit vector")
}

/// Input with f = 0 for gate (θ, φ): α = sin(θ/2), β = cos(θ/2), η = −φ,
/// i.e. α/β = tan(θ/2) with φ + η = 0 written without the pole at β = 0.
pub fn omega_worst_input<T: Real>(theta: T, phi: T) -> InputState<T> {
    let (sh, ch) = (theta / T::lit(2.0)).sin_cos();
    InputState::new(sh, ch, -phi).expect("unit vector")
}

/// Whether (gate, input) is immune to envelope noise, f = 1 within 1e-9.
pub fn sweet_spot_omega<T: Real>(theta: T, phi: T, input: &InputState<T>) -> bool {
    (f_functional(theta, phi, input) - T::one()).abs() <= T::lit(1e-9)
}

fn check_pair<T: Real>(alpha: T, beta: T) -> Result<()> {
    let n = alpha * alpha + beta * beta;
    if (n - T::one()).abs() > T::NORM_TOL {
        return Err(Error::Unnormalized(n.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Reference θ-noise fidelity
/// (1 + x4)/2 + 4α²β²cos²(φ+η)(1 − x4)/2.
pub fn fidelity_theta<T: Real>(phi_plus_eta: T, alpha: T, beta: T, x4: T) -> Result<FidelityValue<T>> {
    check_pair(alpha, beta)?;
    check_decay(x4)?;
    let c = phi_plus_eta.cos();
    let k = T::lit(4.0) * alpha * alpha * beta * beta * c * c;
    Ok(FidelityValue::new(
        (T::one() + x4) / T::lit(2.0) + k * (T::one() - x4) / T::lit(2.0),
    ))
}

/// Exact θ-noise fidelity of the substitution model θ → θ + Δ:
/// (1 + x4)/2 + 4α²β²sin²(φ+η)(1 − x4)/2.
pub fn fidelity_theta_model<T: Real>(phi_plus_eta: T, alpha: T, beta: T, x4: T) -> Result<FidelityValue<T>> {
    check_pair(alpha, beta)?;
    check_decay(x4)?;
    let s = phi_plus_eta.sin();
    let k = T::lit(4.0) * alpha * alpha * beta * beta * s * s;
    Ok(FidelityValue::new(
        (T::one() + x4) / T::lit(2.0) + k * (T::one() - x4) / T::lit(2.0),
    ))
}

/// (5 + 3·x4)/8; exact for both θ-noise expressions.
pub fn avg_fidelity_theta<T: Real>(x4: T) -> Result<FidelityValue<T>> {
    check_decay(x4)?;
    Ok(FidelityValue::new(bounds::avg_theta_poly(x4)))
}

/// φ-noise fidelity for a single qubit, with φ̃ = φ + η.
pub fn fidelity_phi<T: Real>(theta: T, phi: T, input: &InputState<T>, x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    let (a, b) = (input.alpha, input.beta);
    let pt = phi + input.eta;
    let x4 = pow4(x);
    let one = T::one();
    let two = T::lit(2.0);
    let (st, ct) = theta.sin_cos();
    let s2t = (two * theta).sin();
    let ab2 = a * a * b * b;
    let sp = pt.sin();

    let v = pow4(ct)
        + pow4(st) * (one - two * ab2 * (one - x4))
        + s2t * s2t / two * x
        + ab2 * s2t * s2t * (sp * sp * (one - two * x) + (one - (two * pt).cos() * x4) / two)
        + a * b * (a * a - b * b) * st * st * s2t * pt.cos() * (one - x4);
    Ok(FidelityValue::new(v))
}

/// 1 − 3sin²(2θ)/8·(1 − x) − sin⁴θ/4·(1 − x⁴).
pub fn avg_fidelity_phi<T: Real>(theta: T, x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    let s = theta.sin();
    Ok(FidelityValue::new(bounds::avg_phi_poly(s * s, x)))
}

/// x → 0 floor of [`avg_fidelity_phi`] for a given θ.
pub fn avg_fidelity_phi_floor<T: Real>(theta: T) -> T {
    let s = theta.sin();
    let s2 = (T::lit(2.0) * theta).sin();
    T::one() - T::lit(3.0) * s2 * s2 / T::lit(8.0) - pow4(s) / T::lit(4.0)
}

/// Reference two-qubit φ-noise fidelity with α ≡ c00, β ≡ c11.
pub fn fidelity_phi_twoqubit<T: Real>(theta: T, input: &TwoQubitInput<T>, x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    let (a2, b2) = (input.c00() * input.c00(), input.c11() * input.c11());
    let s2 = theta.sin() * theta.sin();
    let one = T::one();
    let two = T::lit(2.0);
    let v = one - two * s2 * (a2 + b2) * (one - x)
        + two * s2 * s2 * ((a2 * a2 + b2 * b2) * (one - x) + a2 * b2 * (one + pow4(x) - two * x));
    Ok(FidelityValue::new(v))
}

/// Exact two-qubit φ-noise fidelity of the perturbed gate, including the
/// |00⟩/|11⟩ coherence term the reference expression omits.
pub fn fidelity_phi_twoqubit_model<T: Real>(
    theta: T,
    phi: T,
    input: &TwoQubitInput<T>,
    x: T,
) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    let (a, b) = (input.c00(), input.c11());
    let (st, ct) = theta.sin_cos();
    let u = a * a * st * st;
    let v = b * b * st * st;
    let w = a * b * st * ct;
    let e = Complex::from_polar(T::one(), phi);
    let k = Complex::new(T::one() - u - v, T::lit(2.0) * w * phi.sin());
    let p = Complex::new(u, T::zero()) - e.scale(w);
    let q = Complex::new(v, T::zero()) + e.conj().scale(w);
    Ok(FidelityValue::new(gaussian_phase_average(k, p, q, x)))
}

/// E|K + P e^{iΔ} + Q e^{−iΔ}|² for Δ ~ N(0, 2C̄) and x = e^{−C̄}.
///
/// Uses E[e^{imΔ}] = e^{−m²C̄}, so only x and x⁴ appear.
pub fn gaussian_phase_average<T: Real>(k: Complex<T>, p: Complex<T>, q: Complex<T>, x: T) -> T {
    let two = T::lit(2.0);
    k.norm_sqr()
        + p.norm_sqr()
        + q.norm_sqr()
        + two * x * (k.conj() * p + k.conj() * q).re
        + two * pow4(x) * (p.conj() * q).re
}

/// Reference two-qubit input average.
pub fn avg_fidelity_phi_twoqubit<T: Real>(x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    Ok(FidelityValue::new(bounds::avg_phi_twoqubit_poly(x)))
}

/// Average of the reference two-qubit formula under the assumed measure
/// (θ uniform, c00 = cos(φ₁/2), c11 = sin(φ₁/2), φ₁ uniform on [0, π]):
/// 1 − (7/16)(1 − x) + (3/32)(1 + x⁴ − 2x).
pub fn avg_fidelity_phi_twoqubit_assumed<T: Real>(x: T) -> Result<FidelityValue<T>> {
    check_decay(x)?;
    let one = T::one();
    Ok(FidelityValue::new(
        one - T::lit(7.0 / 16.0) * (one - x) + T::lit(3.0 / 32.0) * (one + pow4(x) - T::lit(2.0) * x),
    ))
}

/// The three noise-dominated floors (Ω, φ, θ) and whether they are strictly
/// increasing.
pub fn min_ordering_check() -> (f64, f64, f64) {
    let chain = bounds::MinimumChain::<f64>::evaluate();
    assert!(chain.is_strictly_ordered(), "floors out of order: {chain:?}");
    (chain.omega, chain.phi, chain.theta)
}
