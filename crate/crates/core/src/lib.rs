//! Nonadiabatic holonomic gates on a three-level Λ system under classical
//! Gaussian noise in the drive amplitude Ω or the control angles θ, φ.
//!
//! The numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`. The noise-dominated fidelity floors are also
//! available as exact fractions through [`bounds`].

pub mod analytic;
pub mod bounds;
pub mod drive;
pub mod error;
pub mod montecarlo;
pub mod noise;
pub mod qcore;
pub mod quadrature;
pub mod real;
pub mod rng;
pub mod stats;

pub use analytic::{FidelityValue, InputState, TwoQubitInput};
pub use drive::{DriveConfig, Envelope, GateKind};
pub use error::{Error, Result};
pub use montecarlo::{FidelityReport, InputAverageReport, McConfig, McMode};
pub use noise::{NoiseProcess, NoiseSpec, NoiseTarget, Trajectory};
pub use qcore::{Matrix, PureState};
pub use real::Real;
pub use rng::StreamRng;

pub type C64 = num_complex::Complex<f64>;
pub type Qubit = PureState<f64, 2>;
pub type Qutrit = PureState<f64, 3>;
pub type TwoQubits = PureState<f64, 4>;
pub type Gate = Matrix<f64, 2>;
pub type Propagator = Matrix<f64, 3>;
pub type TwoQubitGate = Matrix<f64, 4>;
pub type Input = InputState<f64>;
pub type Drive = DriveConfig<f64>;
pub type Process = NoiseProcess<f64>;
pub type Spec = NoiseSpec<f64>;
pub type Report = FidelityReport<f64>;
