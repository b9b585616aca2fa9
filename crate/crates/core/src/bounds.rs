//! Input-averaged fidelities as polynomials in the decay value.
//!
//! The averaged formulas are polynomials with rational coefficients, so they
//! are written once over [`Field`] and evaluated either in floating point or
//! exactly in `Ratio<i64>`. The x → 0 limits (the noise-dominated floors)
//! come out as exact fractions.

use std::ops::{Add, Div, Mul, Sub};

use num_rational::Ratio;

use crate::real::Real;

/// Arithmetic needed to evaluate the averaged-fidelity polynomials.
pub trait Field:
    Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn int(n: i64) -> Self;
}

impl<T: Real> Field for T {
    fn int(n: i64) -> Self {
        T::lit(n as f64)
    }
}

impl Field for Ratio<i64> {
    fn int(n: i64) -> Self {
        Ratio::from_integer(n)
    }
}

fn frac<F: Field>(n: i64, d: i64) -> F {
    F::int(n) / F::int(d)
}

fn pow4<F: Field>(x: F) -> F {
    let x2 = x * x;
    x2 * x2
}

/// Ω-noise fidelity as a function of the overlap functional `f` and decay `x`,
/// in the factored form 1 − (1 − f)(A·f + B) with A = (3 − 4x + x⁴)/2 and
/// B = (1 − x⁴)/2. The f = 1 and x = 1 cases evaluate to exactly 1.
pub fn omega_poly<F: Field>(f: F, x: F) -> F {
    let one = F::int(1);
    let two = F::int(2);
    let x4 = pow4(x);
    let a = (F::int(3) - F::int(4) * x + x4) / two;
    let b = (one - x4) / two;
    one - (one - f) * (a * f + b)
}

/// Reference input average of the Ω-noise fidelity, (3 + 4x + x⁴)/8.
pub fn avg_omega_poly<F: Field>(x: F) -> F {
    (F::int(3) + F::int(4) * x + pow4(x)) / F::int(8)
}

/// (5 + 3·x4)/8 with x4 = e^{−4C̄}.
pub fn avg_theta_poly<F: Field>(x4: F) -> F {
    (F::int(5) + F::int(3) * x4) / F::int(8)
}

/// φ-noise input average in terms of s = sin²θ:
/// 1 − (3/2)s(1 − s)(1 − x) − s²(1 − x⁴)/4.
pub fn avg_phi_poly<F: Field>(s: F, x: F) -> F {
    let one = F::int(1);
    one - frac::<F>(3, 2) * s * (one - s) * (one - x) - s * s * (one - pow4(x)) / F::int(4)
}

/// Reference two-qubit input average, 1 − 93/256(1 − x) + 3/64(1 + x⁴ − 2x).
pub fn avg_phi_twoqubit_poly<F: Field>(x: F) -> F {
    let one = F::int(1);
    one - frac::<F>(93, 256) * (one - x) + frac::<F>(3, 64) * (one + pow4(x) - F::int(2) * x)
}

/// Vertex (argmin, min) of the quadratic through (0, q0), (1, q1), (2, q2).
fn quadratic_vertex<F: Field>(q0: F, q1: F, q2: F) -> (F, F) {
    let two = F::int(2);
    let a = (q2 - two * q1 + q0) / two;
    let b = q1 - q0 - a;
    let s = F::int(0) - b / (two * a);
    (s, a * s * s + b * s + q0)
}

/// Noise-dominated floors of the three single-qubit averaged fidelities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumChain<F> {
    pub omega: F,
    pub phi: F,
    /// sin²θ at which the φ-noise floor is reached.
    pub phi_argmin_sin2: F,
    pub theta: F,
}

impl<F: Field> MinimumChain<F> {
    /// Evaluates every floor at x = 0; the φ floor is minimized over sin²θ
    /// through the vertex of its quadratic.
    pub fn evaluate() -> Self {
        let zero = F::int(0);
        let (s, phi) = quadratic_vertex(
            avg_phi_poly(F::int(0), zero),
            avg_phi_poly(F::int(1), zero),
            avg_phi_poly(F::int(2), zero),
        );
        Self {
            omega: avg_omega_poly(zero),
            phi,
            phi_argmin_sin2: s,
            theta: avg_theta_poly(zero),
        }
    }

    pub fn is_strictly_ordered(&self) -> bool {
        self.omega < self.phi && self.phi < self.theta
    }
}

/// Exact floors as fractions.
pub fn exact_minimum_chain() -> MinimumChain<Ratio<i64>> {
    MinimumChain::evaluate()
}

/// Exact x → 0 limit of the reference two-qubit average.
pub fn exact_twoqubit_floor() -> Ratio<i64> {
    avg_phi_twoqubit_poly(Ratio::from_integer(0))
}
