use serde::Serialize;

use super::{derive, in_omega_gamma_sigma, ExponentError, LebesguePair, ProblemParams, StepExponents};
use crate::rational::{ceil_pow, checked_powi, int, rat, to_f64, Extended, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThetaMax {
    #[serde(with = "crate::rational::serde_str")]
    pub theta_max: Rational,
    pub alpha_max: Extended,
}

impl ThetaMax {
    /// Both branches evaluated from the step exponents, no membership check.
    pub fn compute(step: &StepExponents, params: &ProblemParams) -> Self {
        let beta = params.beta;
        let d_cap = step.d;
        let a = step.a;
        let sigma = params.dim() / params.m;
        let lhs = beta * (step.alpha_tilde + int(1));
        let rhs = int(1) + (params.dim() - params.gamma) / params.m;
        if lhs <= rhs {
            ThetaMax { theta_max: int(1), alpha_max: Extended::Infinity }
        } else {
            ThetaMax {
                theta_max: a / (beta * (step.alpha_tilde + int(1) - sigma / int(2))),
                alpha_max: Extended::Finite(a / (beta - d_cap)),
            }
        }
    }

    /// `θ_max = α_max/(1 + α_max)`, with `∞/(1 + ∞) = 1`.
    pub fn identity_holds(&self) -> bool {
        match self.alpha_max {
            Extended::Infinity => self.theta_max == int(1),
            Extended::Finite(a) => self.theta_max == a / (int(1) + a),
        }
    }
}

pub fn theta_max(point: &LebesguePair, params: &ProblemParams) -> Result<ThetaMax, ExponentError> {
    if !in_omega_gamma_sigma(point, params)? {
        return Err(ExponentError::NotInRegion { x: point.x(), y: point.y() });
    }
    let step = StepExponents::compute(point, params)?;
    let t = ThetaMax::compute(&step, params);
    if !t.identity_holds() {
        return Err(ExponentError::IdentityFailure(format!(
            "theta_max = {} but alpha_max = {}",
            t.theta_max, t.alpha_max
        )));
    }
    Ok(t)
}

/// Step schedule for the global iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepPlan {
    #[serde(with = "crate::rational::serde_str")]
    pub lambda: Rational,
    /// `αβ/A`, so that `T_step = c0·N^{-αβ/A}`.
    #[serde(with = "crate::rational::serde_str")]
    pub step_exponent: Rational,
    pub t_step: f64,
    /// Exact `T_step` when `αβ/A` is an integer.
    #[serde(with = "crate::rational::serde_str_opt")]
    pub t_step_exact: Option<Rational>,
    pub k_n: u64,
    pub diverges: bool,
}

impl StepPlan {
    /// Evaluates the schedule with no range checks on `α`.
    pub fn evaluate(
        step: &StepExponents,
        params: &ProblemParams,
        alpha: Rational,
        s: Rational,
        n: Rational,
        c0: Rational,
    ) -> Result<Self, ExponentError> {
        let a = step.a;
        if a <= int(0) {
            return Err(ExponentError::Domain(format!("A = {a} is not positive")));
        }
        let beta = params.beta;
        let lambda = (alpha * step.d / a - alpha * beta * s / a + int(1)) / (int(1) - s);
        let step_exponent = alpha * beta / a;
        let t_step_exact = if step_exponent.is_integer() {
            checked_powi(&n, -step_exponent.to_integer()).map(|p| c0 * p)
        } else {
            None
        };
        let t_step = match t_step_exact {
            Some(t) => to_f64(&t),
            None => to_f64(&c0) * to_f64(&n).powf(-to_f64(&step_exponent)),
        };
        let diverges = lambda > step_exponent;
        let via_d = alpha * (beta - step.d) < a;
        if diverges != via_d {
            return Err(ExponentError::IdentityFailure(format!(
                "lambda > alpha*beta/A is {diverges} but alpha(beta - D) < A is {via_d}"
            )));
        }
        Ok(StepPlan { lambda, step_exponent, t_step, t_step_exact, k_n: ceil_pow(&n, &lambda), diverges })
    }

    /// `K_N · T_step`.
    pub fn elapsed(&self) -> f64 {
        self.k_n as f64 * self.t_step
    }
}

/// Step schedule for `0 < α < α_max`, `s <= 0`, `N > 1`.
pub fn lambda_and_steps(
    params: &ProblemParams,
    point: &LebesguePair,
    alpha: Rational,
    s: Rational,
    n: Rational,
    c0: Rational,
) -> Result<StepPlan, ExponentError> {
    if !in_omega_gamma_sigma(point, params)? {
        return Err(ExponentError::NotInRegion { x: point.x(), y: point.y() });
    }
    if s > int(0) {
        return Err(ExponentError::Domain(format!("s = {s} must be <= 0")));
    }
    if n <= int(1) {
        return Err(ExponentError::Domain(format!("N = {n} must exceed 1")));
    }
    if c0 <= int(0) {
        return Err(ExponentError::Domain(format!("c0 = {c0} must be positive")));
    }
    let step = StepExponents::compute(point, params)?;
    let tm = ThetaMax::compute(&step, params);
    if alpha <= int(0) || Extended::Finite(alpha) >= tm.alpha_max {
        return Err(ExponentError::Domain(format!("alpha = {alpha} outside (0, alpha_max = {})", tm.alpha_max)));
    }
    StepPlan::evaluate(&step, params, alpha, s, n, c0)
}

/// Checks the exact identities tying `D`, `E`, `F`, `θ_max`, `λ` together at
/// one `(point, α, s)`. Uses unchecked evaluation, so it applies whatever the
/// signs of `D`, `E`, `F`.
pub fn identity_suite(
    params: &ProblemParams,
    point: &LebesguePair,
    alpha: Rational,
    s: Rational,
) -> Result<(), ExponentError> {
    let st = StepExponents::compute(point, params)?;
    let beta = params.beta;
    let a = st.a;
    let fail = |msg: String| Err(ExponentError::IdentityFailure(msg));
    let direct = int(1) - beta * st.alpha_tilde + (params.dim() - params.gamma) / params.m;
    if st.d != direct {
        return fail(format!("D = {} vs {}", st.d, direct));
    }
    let tm = ThetaMax::compute(&st, params);
    if !tm.identity_holds() {
        return fail(format!("theta_max = {} vs alpha_max = {}", tm.theta_max, tm.alpha_max));
    }
    let lhs = alpha * st.d / a;
    let via_e = alpha + alpha * beta * st.e / a - alpha * beta;
    let via_f = alpha / (beta + int(1)) + alpha * beta * st.f / (a * (beta + int(1)));
    if lhs != via_e || lhs != via_f {
        return fail(format!("alpha*D/A = {lhs}, via E = {via_e}, via F = {via_f}"));
    }
    StepPlan::evaluate(&st, params, alpha, s, int(2), int(1)).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PmBranch {
    /// `1 + (d-γ)/m >= β(1 + σ/2)`
    First,
    Second,
}

/// `1/p_m`, the upper endpoint for data in `M_{p,p'}` when `σ <= 1`.
pub fn p_m_hartree(params: &ProblemParams) -> Result<(PmBranch, Rational), ExponentError> {
    let dx = derive(params)?;
    if dx.sigma > int(1) {
        return Err(ExponentError::Hypothesis(format!("sigma = {} > 1", dx.sigma)));
    }
    let (d, m, g, b) = (params.dim(), params.m, params.gamma, params.beta);
    let lhs = int(1) + (d - g) / m;
    let rhs = b * (int(1) + dx.sigma / int(2));
    let (branch, inv) = if lhs >= rhs {
        (PmBranch::First, (rat(3, 2) - dx.eta) / (b + int(1)))
    } else {
        let num = b * b * d * (d + int(2) * m) + int(4) * (d - g) * (m - d * b) + int(4) * (d - g) * (d - g);
        (PmBranch::Second, num / (int(4) * m * d * b * (b + int(1))))
    };
    if dx.x0 > inv {
        return Err(ExponentError::IdentityFailure(format!("x0 = {} exceeds 1/p_m = {inv}", dx.x0)));
    }
    Ok((branch, inv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PmaxBranch {
    First,
    Second,
    Third,
}

/// `1/p_max` for the Schrödinger case `m = 2`.
pub fn p_max_nlsh(params: &ProblemParams) -> Result<(PmaxBranch, Rational), ExponentError> {
    if params.m != int(2) {
        return Err(ExponentError::Hypothesis(format!("m = {} but 2 is required", params.m)));
    }
    let dx = derive(params)?;
    let (d, g, b) = (params.dim(), params.gamma, params.beta);
    let sigma = dx.sigma;
    let bt = dx.beta_tilde;
    let floor = (int(2) - dx.eta) / sigma;
    if bt <= floor {
        return Err(ExponentError::Hypothesis(format!("beta_tilde = {bt} <= {floor}")));
    }
    let upper_row = g > d / int(2) && bt > (int(3) - int(2) * dx.eta) / sigma;
    let res = if upper_row && b <= (int(2) + d - g) / (sigma + int(2)) {
        (PmaxBranch::First, sigma / (int(2) * (int(1) + sigma)))
    } else if upper_row {
        let num = int(4) * (b - int(1)) + int(3) * b * d - int(2) * (d - g);
        (PmaxBranch::Second, num / (int(4) * b * (int(2) + d)))
    } else {
        let num = int(6) * b * (d - g) + (int(2) * (d - g) - d * b + int(2)) * (d * g - int(2) * (b - int(1)));
        let den = b * (int(2) * (int(2) + d) * (d - g) + (int(4) - d) * (d * b - int(2)));
        (PmaxBranch::Third, num / den)
    };
    Ok(res)
}
