use serde::{Deserialize, Serialize};

use super::ExponentError;
use crate::rational::{int, Rational};

/// Sign of the Hartree term on the right-hand side of
/// `i u_t + (-Δ)^{m/2} u = ±(K*|u|^β) u`.
///
/// `Focusing` is the `+` sign, `Defocusing` the `-` sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    /// `+1.0` for focusing, `-1.0` for defocusing.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }
}

/// The quadruple `(d, m, γ, β)` plus the sign of the nonlinearity.
///
/// Serialised with the rationals as `"num/den"` strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemParams {
    pub d: u32,
    #[serde(with = "crate::rational::serde_str")]
    pub m: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub gamma: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub beta: Rational,
    pub sign: Sign,
}

impl ProblemParams {
    pub fn new(d: u32, m: Rational, gamma: Rational, beta: Rational, sign: Sign) -> Result<Self, ExponentError> {
        let params = ProblemParams { d, m, gamma, beta, sign };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ExponentError> {
        if self.d == 0 {
            return Err(ExponentError::Domain("dimension d must be positive".into()));
        }
        if self.m < int(2) {
            return Err(ExponentError::Domain(format!("dispersion order m = {} < 2", self.m)));
        }
        if self.gamma <= int(0) || self.gamma >= self.dim() {
            return Err(ExponentError::Domain(format!(
                "kernel exponent gamma = {} outside (0, d = {})",
                self.gamma, self.d
            )));
        }
        if self.beta <= int(0) {
            return Err(ExponentError::Domain(format!("nonlinearity power beta = {} <= 0", self.beta)));
        }
        Ok(())
    }

    pub fn dim(&self) -> Rational {
        int(i128::from(self.d))
    }

    /// Open mass-subcritical window `(2(1-γ/d), 2(1-γ/d) + 2m/d)` for β.
    pub fn subcritical_window(&self) -> (Rational, Rational) {
        let eta = self.gamma / self.dim();
        let lo = int(2) * (int(1) - eta);
        (lo, lo + int(2) * self.m / self.dim())
    }

    pub fn is_subcritical(&self) -> bool {
        let (lo, hi) = self.subcritical_window();
        lo < self.beta && self.beta < hi
    }

    pub fn assert_subcritical(&self) -> Result<(), ExponentError> {
        if self.is_subcritical() {
            Ok(())
        } else {
            let (lo, hi) = self.subcritical_window();
            Err(ExponentError::Domain(format!("beta = {} outside the subcritical window ({lo}, {hi})", self.beta)))
        }
    }
}
