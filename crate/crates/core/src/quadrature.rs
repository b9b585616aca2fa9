//! Deterministic quadrature oracles, independent of the closed forms they
//! check.
//!
//! Input averages use Gauss–Legendre in φ₁ (and θ for two qubits) and the
//! periodic trapezoid rule in η, which is exact for the low-order
//! trigonometric polynomials involved. The correlation double integral uses
//! composite Gauss–Legendre with panels no wider than the memory time.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::analytic::{InputState, TwoQubitInput};
use crate::error::{Error, Result};
use crate::noise::{self, NoiseProcess};

const PHI1_ORDER: usize = 64;
const ETA_POINTS: usize = 64;
const PANEL_ORDER: usize = 20;

fn rule(order: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(order).expect("positive order"))
}

/// Mean of `f` over α = cos(φ₁/2), β = sin(φ₁/2) with φ₁ ~ U[0, π] and
/// η ~ U[0, 2π).
pub fn input_average<F>(f: F) -> f64
where
    F: Fn(&InputState<f64>) -> f64,
{
    let gl = rule(PHI1_ORDER);
    let tau = std::f64::consts::TAU;
    let inner = |phi1: f64| {
        let sum: f64 = (0..ETA_POINTS)
            .map(|k| {
                let eta = tau * k as f64 / ETA_POINTS as f64;
                f(&InputState::from_angles(phi1, eta).expect("unit vector"))
            })
            .sum();
        sum / ETA_POINTS as f64
    };
    gl.integrate(0.0, std::f64::consts::PI, inner) / std::f64::consts::PI
}

/// Mean of `f(θ, input)` over θ ~ U[0, π] and c00 = cos(φ₁/2),
/// c11 = sin(φ₁/2) with φ₁ ~ U[0, π].
pub fn twoqubit_input_average<F>(f: F) -> f64
where
    F: Fn(f64, &TwoQubitInput<f64>) -> f64,
{
    let gl = rule(PHI1_ORDER);
    let pi = std::f64::consts::PI;
    let outer = |theta: f64| {
        gl.integrate(0.0, pi, |phi1: f64| {
            let (s, c) = (phi1 / 2.0).sin_cos();
            f(theta, &TwoQubitInput::new(c, 0.0, 0.0, s).expect("unit vector"))
        }) / pi
    };
    gl.integrate(0.0, pi, outer) / pi
}

fn composite<F: FnMut(f64) -> f64>(gl: &GaussLegendre, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == panels { b } else { lo + h };
            gl.integrate(lo, hi, &mut f)
        })
        .sum()
}

fn panels_for(span: f64, memory: f64) -> usize {
    (span * memory).ceil().max(1.0) as usize
}

/// ∫₀ᵀdt₁∫₀^{t₁}dt₂ C(t₁, t₂) by nested quadrature of the pointwise
/// correlation. White noise has no pointwise correlation and is rejected.
pub fn cbar_quadrature(process: &NoiseProcess<f64>, duration: f64) -> Result<f64> {
    let NoiseProcess::Ou { memory, .. } = *process else {
        return Err(Error::WhiteNoisePointwise("correlation"));
    };
    if duration < 0.0 {
        return Err(Error::NegativeDuration(duration));
    }
    if duration == 0.0 {
        return Ok(0.0);
    }
    let gl = rule(PANEL_ORDER);
    let outer = |t1: f64| {
        composite(&gl, 0.0, t1, panels_for(t1, memory), |t2| {
            noise::corr(process, t1, t2).expect("non-negative times")
        })
    };
    Ok(composite(&gl, 0.0, duration, panels_for(duration, memory), outer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use crate::noise::cbar;

    #[test]
    fn cbar_quadrature_matches_closed_form() {
        for g in [0.1, 1.0, 10.0] {
            for m in [0.1, 1.0, 10.0] {
                for t in [0.1, 1.0, 10.0] {
                    let p = NoiseProcess::ou(g, m).unwrap();
                    let q = cbar_quadrature(&p, t).unwrap();
                    let c = cbar(&p, t).unwrap();
                    assert!(((q - c) / c).abs() < 1e-8, "Γ={g} γ={m} T={t}: {q} vs {c}");
                }
            }
        }
    }

    #[test]
    fn uniform_measure_moments() {
        assert!((input_average(|_| 1.0) - 1.0).abs() < 1e-14);
        let a2 = input_average(|i| i.alpha() * i.alpha());
        assert!((a2 - 0.5).abs() < 1e-14);
        let a2b2 = input_average(|i| (i.alpha() * i.beta()).powi(2));
        assert!((a2b2 - 0.125).abs() < 1e-14);
    }

    #[test]
    fn theta_average_is_exact() {
        for x4 in [0.01, 0.3, 0.9, 1.0] {
            let want = analytic::avg_fidelity_theta(x4).unwrap().value();
            let model = input_average(|i| {
                analytic::fidelity_theta_model(0.3 + i.eta(), i.alpha(), i.beta(), x4).unwrap().value()
            });
            let reference = input_average(|i| {
                analytic::fidelity_theta(0.3 + i.eta(), i.alpha(), i.beta(), x4).unwrap().value()
            });
            assert!((model - want).abs() < 1e-10);
            assert!((reference - want).abs() < 1e-10);
        }
    }

    #[test]
    fn phi_average_is_exact() {
        for theta in [0.0, 0.4, 1.2, 2.5] {
            for x in [0.05, 0.5, 1.0] {
                let want = analytic::avg_fidelity_phi(theta, x).unwrap().value();
                let got = input_average(|i| analytic::fidelity_phi(theta, 0.7, i, x).unwrap().value());
                assert!((got - want).abs() < 1e-10, "θ={theta} x={x}");
            }
        }
    }

    #[test]
    fn omega_average_matches_exact_form() {
        for theta in [0.0, 0.9, std::f64::consts::FRAC_PI_2] {
            for x in [0.1, 0.6, 1.0] {
                let want = analytic::avg_fidelity_omega_exact(theta, x).unwrap().value();
                let got = input_average(|i| analytic::fidelity_omega(theta, 0.2, i, x).unwrap().value());
                assert!((got - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn twoqubit_assumed_measure_average() {
        for x in [0.1, 0.5, 1.0] {
            let want = analytic::avg_fidelity_phi_twoqubit_assumed(x).unwrap().value();
            let got = twoqubit_input_average(|th, i| analytic::fidelity_phi_twoqubit(th, i, x).unwrap().value());
            assert!((got - want).abs() < 1e-10);
        }
    }
}
