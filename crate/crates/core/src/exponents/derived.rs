use num_traits::Zero;
use serde::Serialize;

use super::{ExponentError, ProblemParams};
use crate::rational::{int, max, min, rat, Rational};

/// The derived scalars of a parameter set.
///
/// Fields that involve a division which can vanish (`beta_0`, `x4`, `x5`)
/// are `None` when undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedExponents {
    pub sigma: Rational,
    pub eta: Rational,
    pub s_c: Rational,
    pub beta_tilde: Rational,
    /// `(3 - 2η)/(σ - 1)`, defined only for `σ > 1`.
    pub beta_0: Option<Rational>,
    pub a_endpoint: Rational,
    pub b_endpoint: Rational,
    pub x0: Rational,
    pub x1: Rational,
    pub x2: Rational,
    pub x3: Rational,
    pub x4: Option<Rational>,
    pub x5: Option<Rational>,
    pub y0: Rational,
    pub y1: Rational,
    /// `A = 1 - βσ/2 + (d-γ)/m`.
    pub a_cap: Rational,
}

pub fn derive(params: &ProblemParams) -> Result<DerivedExponents, ExponentError> {
    params.validate()?;
    let ProblemParams { m, gamma, beta, .. } = *params;
    let d = params.dim();
    let one = int(1);
    let two = int(2);

    let sigma = d / m;
    let eta = gamma / d;
    let s_c = d / two - (m + d - gamma) / beta;
    let beta_tilde = beta - two * (one - eta);
    let beta_0 = (sigma > one).then(|| (int(3) - two * eta) / (sigma - one));

    let x0 = (rat(3, 2) - eta) / (beta + one);
    let x1 = (two - eta) / (beta + two);
    let x2 = (one - eta) / beta;
    let x3 = (two - eta) / (beta + one);
    let x4_den = (beta + two) * (sigma - one) + one;
    let x4 = (!x4_den.is_zero()).then(|| (sigma - one) * (two - eta) / x4_den);
    let x5_den = (beta + two) * sigma - one;
    let x5 = (!x5_den.is_zero()).then(|| sigma * (two - eta) / x5_den);
    let y0 = (beta * d - two * (d - gamma)) / (two * m * (beta + one));
    let y1 = (d * (beta - two) + two * gamma) / (m * (beta + two));

    let a_endpoint = max((sigma - one) / (two * sigma), x0);
    let b_endpoint = min(rat(1, 2), (one / (two * sigma) + rat(3, 2) - eta) / (beta + one));
    let a_cap = one - beta * sigma / two + (d - gamma) / m;

    Ok(DerivedExponents {
        sigma,
        eta,
        s_c,
        beta_tilde,
        beta_0,
        a_endpoint,
        b_endpoint,
        x0,
        x1,
        x2,
        x3,
        x4,
        x5,
        y0,
        y1,
        a_cap,
    })
}

/// A closed rational interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedInterval {
    #[serde(with = "crate::rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub hi: Rational,
}

impl ClosedInterval {
    /// `None` when `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo <= hi).then_some(ClosedInterval { lo, hi })
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }
}

/// Which row of the seven-row case table for `I_{η,σ}` was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableBranch(pub u8);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalI {
    pub branch: TableBranch,
    /// `None` for an empty interval.
    pub interval: Option<ClosedInterval>,
}

/// `I_{η,σ}` read off the seven-row case table.
///
/// Errors with [`ExponentError::NoTableBranch`] when `β̃` lies outside every
/// row (e.g. `β̃ >= 2/σ`, outside the well-posedness range).
pub fn interval_i(params: &ProblemParams) -> Result<IntervalI, ExponentError> {
    let dx = derive(params)?;
    let one = int(1);
    let two = int(2);
    let DerivedExponents { sigma, eta, beta_tilde: bt, x0, x3, .. } = dx;
    let beta = params.beta;

    let left_x0 = x0;
    let right_sigma = (one / (two * sigma) + rat(3, 2) - eta) / (beta + one);
    let half = rat(1, 2);
    let lower = two * eta - two;
    let inv_sigma = one / sigma;
    let two_inv_sigma = two / sigma;
    let tilted = (two * eta - one) * sigma;

    let (branch, lo, hi) = if tilted <= two {
        if sigma >= one {
            if lower <= bt && bt <= inv_sigma {
                (1, left_x0, half)
            } else if inv_sigma < bt && bt < two_inv_sigma {
                (2, left_x0, right_sigma)
            } else {
                return Err(ExponentError::NoTableBranch { beta_tilde: bt });
            }
        } else if lower <= bt && bt <= one {
            (3, left_x0, half)
        } else if one < bt && bt <= two_inv_sigma {
            (4, left_x0, x3)
        } else {
            return Err(ExponentError::NoTableBranch { beta_tilde: bt });
        }
    } else {
        // (2η-1)σ > 2 forces σ > 2, so β₀ is defined.
        let beta_0 = dx.beta_0.expect("sigma > 1 in the tilted rows");
        if lower < bt && bt <= inv_sigma {
            (5, left_x0, half)
        } else if inv_sigma < bt && bt <= beta_0 {
            // β̃ = β₀ is in neither row 6 (<) nor row 7 (>); both rows give
            // the same left endpoint there.
            (6, left_x0, right_sigma)
        } else if beta_0 < bt && bt < two_inv_sigma {
            (7, (sigma - one) / (two * sigma), right_sigma)
        } else {
            return Err(ExponentError::NoTableBranch { beta_tilde: bt });
        }
    };
    Ok(IntervalI { branch: TableBranch(branch), interval: ClosedInterval::new(lo, hi) })
}

/// `[a(η,σ), b(η,σ)]` straight from the max/min definitions.
pub fn interval_from_definition(params: &ProblemParams) -> Result<Option<ClosedInterval>, ExponentError> {
    let dx = derive(params)?;
    Ok(ClosedInterval::new(dx.a_endpoint, dx.b_endpoint))
}

/// The set of `1/r` allowed by the local well-posedness exponent system
///
/// ```text
/// 1/p = (β+1)/r + γ/d - 1,   1/μ = 1 - σ(1/p - 1/2),
/// 1/2 <= 1/p <= 1,   1/2 <= 1/μ <= 1,   (σ-1)/(2σ) <= 1/r <= 1/2,
/// ```
///
/// solved as an intersection of half-lines in `x = 1/r`.
pub fn interval_from_lwp_system(params: &ProblemParams) -> Result<Option<ClosedInterval>, ExponentError> {
    let dx = derive(params)?;
    let one = int(1);
    let half = rat(1, 2);
    let slope = params.beta + one; // 1/p = slope·x + offset
    let offset = dx.eta - one;
    // each constraint is lo_p <= 1/p <= hi_p
    let mut lo = max(int(0), (dx.sigma - one) / (int(2) * dx.sigma));
    let mut hi = half;
    let mut clamp_p = |lo_p: Rational, hi_p: Rational| {
        lo = max(lo, (lo_p - offset) / slope);
        hi = min(hi, (hi_p - offset) / slope);
    };
    clamp_p(half, one);
    // 1/2 <= 1 - σ(1/p - 1/2) <= 1  <=>  1/2 <= 1/p <= 1/2 + 1/(2σ)
    clamp_p(half, half + one / (int(2) * dx.sigma));
    Ok(ClosedInterval::new(lo, hi))
}
