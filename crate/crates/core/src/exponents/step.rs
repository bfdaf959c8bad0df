use serde::Serialize;

use super::{derive, in_omega_gamma_sigma, interval_i, ExponentError, LebesguePair, ProblemParams};
use crate::rational::{int, rat, Rational};

/// `α̃`, `1/γ_m(r)` and the three exponents `D`, `E`, `F` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepExponents {
    #[serde(with = "crate::rational::serde_str")]
    pub alpha_tilde: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub inv_gamma_m: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub d: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub e: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub f: Rational,
    /// `A`, carried along because every downstream formula divides by it.
    #[serde(with = "crate::rational::serde_str")]
    pub a: Rational,
}

impl StepExponents {
    /// Evaluates the formulas with no membership or sign checks.
    pub fn compute(point: &LebesguePair, params: &ProblemParams) -> Result<Self, ExponentError> {
        let dx = derive(params)?;
        let beta = params.beta;
        let s = dx.sigma;
        let a = dx.a_cap;
        let alpha_tilde = point.y() + s * point.x();
        let inv_gamma_m = s * (rat(1, 2) - point.x());
        let d = a + beta * s / int(2) - beta * alpha_tilde;
        let e = a + s / int(2) - alpha_tilde;
        let f = a + (beta + int(1)) * s / int(2) - (beta + int(1)) * alpha_tilde;
        Ok(StepExponents { alpha_tilde, inv_gamma_m, d, e, f, a })
    }

    pub fn all_positive(&self) -> bool {
        let zero = int(0);
        self.d > zero && self.e > zero && self.f > zero
    }
}

/// Checked evaluation: the point must lie in `Ω_{γ,σ}`, `D` must equal
/// `1 - βα̃ + (d-γ)/m`, and `D, E, F` must be positive.
pub fn step_exponents(point: &LebesguePair, params: &ProblemParams) -> Result<StepExponents, ExponentError> {
    if !in_omega_gamma_sigma(point, params)? {
        return Err(ExponentError::NotInRegion { x: point.x(), y: point.y() });
    }
    let st = StepExponents::compute(point, params)?;
    let direct = int(1) - params.beta * st.alpha_tilde + (params.dim() - params.gamma) / params.m;
    if st.d != direct {
        return Err(ExponentError::IdentityFailure(format!(
            "D = {} but 1 - beta*alpha_tilde + (d-gamma)/m = {}",
            st.d, direct
        )));
    }
    if !st.all_positive() {
        return Err(ExponentError::PositivityViolation {
            x: point.x(),
            y: point.y(),
            def: Box::new([st.d, st.e, st.f]),
        });
    }
    Ok(st)
}

/// `(1 + σ(3/2 - η))/(β + 1)`, the strict upper bound on `α̃` for local
/// well-posedness.
pub fn lwp_threshold(params: &ProblemParams) -> Result<Rational, ExponentError> {
    let dx = derive(params)?;
    Ok((int(1) + dx.sigma * (rat(3, 2) - dx.eta)) / (params.beta + int(1)))
}

/// `β < 2/σ + 2 - 2η`, `1/r ∈ I_{η,σ}` and `α̃ < (1 + σ(3/2 - η))/(β + 1)`.
pub fn satisfies_lwp_hypotheses(point: &LebesguePair, params: &ProblemParams) -> Result<bool, ExponentError> {
    let dx = derive(params)?;
    if params.beta >= int(2) / dx.sigma + int(2) - int(2) * dx.eta {
        return Ok(false);
    }
    let inside = match interval_i(params) {
        Ok(i) => i.interval.is_some_and(|iv| iv.contains(&point.x())),
        Err(ExponentError::NoTableBranch { .. }) => false,
        Err(e) => return Err(e),
    };
    if !inside {
        return Ok(false);
    }
    let alpha_tilde = point.y() + dx.sigma * point.x();
    Ok(alpha_tilde < lwp_threshold(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Sign;

    fn fixture() -> ProblemParams {
        ProblemParams::new(1, int(2), rat(1, 2), int(2), Sign::Defocusing).unwrap()
    }

    #[test]
    fn fixture_step_exponents() {
        let st = step_exponents(&LebesguePair::new(rat(2, 5), rat(1, 20)), &fixture()).unwrap();
        assert_eq!(st.alpha_tilde, rat(1, 4));
        assert_eq!(st.inv_gamma_m, rat(1, 20));
        assert_eq!((st.d, st.e, st.f), (rat(3, 4), rat(3, 4), rat(3, 4)));
        assert_eq!(int(1) - rat(1, 2) + rat(1, 4), st.d);
    }

    #[test]
    fn outside_point_rejected() {
        let r = step_exponents(&LebesguePair::new(rat(2, 5), rat(1, 10)), &fixture());
        assert!(matches!(r, Err(ExponentError::NotInRegion { .. })));
    }

    #[test]
    fn positivity_can_fail_inside_region() {
        // α̃ at the top vertex (3/13, 7/26) is 5/13, beyond the F > 0 threshold 3/11.
        let p = ProblemParams::new(1, int(2), rat(1, 2), rat(9, 2), Sign::Defocusing).unwrap();
        let near_top = LebesguePair::new(rat(3, 13) + rat(1, 200), rat(7, 26) - rat(1, 50));
        assert!(in_omega_gamma_sigma(&near_top, &p).unwrap());
        assert!(matches!(step_exponents(&near_top, &p), Err(ExponentError::PositivityViolation { .. })));
    }

    #[test]
    fn fixture_meets_lwp_hypotheses() {
        let p = fixture();
        assert_eq!(lwp_threshold(&p).unwrap(), rat(1, 2));
        assert!(satisfies_lwp_hypotheses(&LebesguePair::new(rat(2, 5), rat(1, 20)), &p).unwrap());
        assert!(!satisfies_lwp_hypotheses(&LebesguePair::new(rat(1, 4), rat(1, 20)), &p).unwrap());
    }
}
