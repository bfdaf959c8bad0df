//! Periodic pseudospectral solver for
//! `i u_t + (-Δ)^{m/2} u = ±(K * |u|^β) u` on `[-L/2, L/2)^d`, `d ∈ {1, 2}`.
//!
//! The linear flow is the exact multiplier `e^{it|ξ|^m}`; the Hartree term is
//! a pointwise phase rotation by the real potential `K * |u|^β`, so every
//! Strang step is an ℓ² isometry.

mod fft;
mod field;
mod grid;
pub mod io;
mod linear;
mod solver;

pub use fft::SpectralOps;
pub use field::Field;
pub use grid::Grid;
pub use linear::LinearFlow;
pub use solver::{riesz_constant, scaling_check, sign_label, Dealias, ScalingReport, Solver, SolverConfig, Trajectory};

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value after step {step}")]
    NonFinite { step: usize },
    #[error("t_final = {t_final} is not an integer multiple of dt = {dt}")]
    StepMismatch { t_final: f64, dt: f64 },
    #[error("grid does not resolve the data: {0}")]
    Resolution(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
