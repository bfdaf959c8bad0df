//! Exponent calculus, Strichartz admissibility and a periodic spectral
//! laboratory for the fractional Hartree equation
//!
//! ```text
//! i u_t + (-Δ)^{m/2} u = ±(|x|^{-γ} * |u|^β) u,   x ∈ R^d.
//! ```
//!
//! [`exponents`] and [`strichartz`] are exact over [`rational::Rational`].
//! [`spectral`], [`splitting`] and [`norms`] work in `f64` on a torus.

pub mod exponents;
pub mod norms;
pub mod rational;
pub mod spectral;
pub mod splitting;
pub mod strichartz;
