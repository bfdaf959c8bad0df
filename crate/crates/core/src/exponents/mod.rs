//! Exact exponent calculus: derived scalars, the `I_{η,σ}` interval,
//! the regions `Ω_γ` and `Ω_{γ,σ}`, step exponents and thresholds.

mod derived;
mod flat;
mod params;
mod region;
pub mod sampling;
mod step;
mod thresholds;

use thiserror::Error;

use crate::rational::Rational;

pub use derived::{
    derive, interval_from_definition, interval_from_lwp_system, interval_i, ClosedInterval, DerivedExponents,
    IntervalI, TableBranch,
};
pub use flat::{FlatRecord, ToFlat};
pub use params::{ProblemParams, Sign};
pub use region::{
    alpha_tilde_sup, alpha_tilde_sup_closed_form, in_omega_gamma, in_omega_gamma_sigma, in_omega_gamma_sigma_raw,
    omega_gamma_sigma_halfplanes, region_vertices, HalfPlane, LebesguePair,
};
pub use step::{lwp_threshold, satisfies_lwp_hypotheses, step_exponents, StepExponents};
pub use thresholds::{
    identity_suite, lambda_and_steps, p_m_hartree, p_max_nlsh, theta_max, PmBranch, PmaxBranch, StepPlan, ThetaMax,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExponentError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("point ({x}, {y}) is not in the region")]
    NotInRegion { x: Rational, y: Rational },
    #[error("D, E, F must be positive at ({x}, {y}); got D = {}, E = {}, F = {}", .def[0], .def[1], .def[2])]
    PositivityViolation {
        x: Rational,
        y: Rational,
        /// `[D, E, F]`, boxed to keep the error small.
        def: Box<[Rational; 3]>,
    },
    #[error("region has empty interior")]
    EmptyRegion,
    #[error("identity failed: {0}")]
    IdentityFailure(String),
    #[error("vertex supremum {vertex} differs from closed form {closed}")]
    SupMismatch { vertex: Rational, closed: Rational },
    #[error("beta_tilde = {beta_tilde} falls in no row of the interval table")]
    NoTableBranch { beta_tilde: Rational },
}
