//! Strichartz admissibility predicates, the dual pair `(μ', p')`, Hölder
//! exponent chains, and a randomised oracle comparing `Ω_{γ,σ}` with the
//! inhomogeneous Strichartz conditions.
//!
//! Everything works on inverse exponents, so `q = ∞` is `inv_q = 0`.

use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exponents::{
    derive, in_omega_gamma_sigma, lwp_threshold, omega_gamma_sigma_halfplanes, region_vertices, ExponentError,
    LebesguePair, ProblemParams, StepExponents,
};
use crate::rational::{int, max, rat, Extended, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrichartzError {
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error("infeasible exponent chain: {0}")]
    InfeasibleChain(String),
    #[error("region and Strichartz conditions disagree at {} point(s)", .0.counterexamples.len())]
    EquivalenceFailure(Box<EquivalenceReport>),
}

fn inv(e: Extended) -> Rational {
    match e.recip() {
        Extended::Finite(q) => q,
        Extended::Infinity => unreachable!("reciprocal of a finite exponent >= 1"),
    }
}

/// `(q, r)` is a σ-pair.
pub fn is_sigma_pair(q: Extended, r: Extended, sigma: Rational) -> bool {
    if q == Extended::Finite(int(2)) && r == Extended::Infinity && sigma == int(1) {
        return false;
    }
    is_sigma_pair_inv(inv(q), inv(r), sigma)
}

pub fn is_sigma_pair_inv(inv_q: Rational, inv_r: Rational, sigma: Rational) -> bool {
    let zero = Rational::zero();
    let half = rat(1, 2);
    inv_q == sigma * (half - inv_r) && zero < inv_q && inv_q <= half && zero < inv_r && inv_r <= half
}

/// `(1/r, 1/q)` lies in `Ω¹`.
pub fn is_sigma_acceptable(q: Extended, r: Extended, sigma: Rational) -> bool {
    is_sigma_acceptable_inv(inv(q), inv(r), sigma)
}

pub fn is_sigma_acceptable_inv(inv_q: Rational, inv_r: Rational, sigma: Rational) -> bool {
    let (x, y) = (inv_r, inv_q);
    let zero = Rational::zero();
    let half = rat(1, 2);
    if x == half && y.is_zero() {
        return true;
    }
    zero <= x && x <= half && zero < y && y <= int(1) && y < int(2) * sigma * (half - x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inhomogeneous {
    NotSatisfied,
    NonSharp,
    Sharp,
}

/// Which set of inhomogeneous Strichartz conditions `(q, r)` and `(μ, p)`
/// satisfy.
pub fn inhomogeneous_ok(q: Extended, r: Extended, mu: Extended, p: Extended, sigma: Rational) -> Inhomogeneous {
    inhomogeneous_ok_inv(inv(q), inv(r), inv(mu), inv(p), sigma)
}

pub fn inhomogeneous_ok_inv(
    inv_q: Rational,
    inv_r: Rational,
    inv_mu: Rational,
    inv_p: Rational,
    sigma: Rational,
) -> Inhomogeneous {
    let one = int(1);
    let zero = Rational::zero();
    let inv_mu_d = one - inv_mu;
    let inv_p_d = one - inv_p;
    if !is_sigma_acceptable_inv(inv_q, inv_r, sigma) || !is_sigma_acceptable_inv(inv_mu_d, inv_p_d, sigma) {
        return Inhomogeneous::NotSatisfied;
    }
    if inv_q + sigma * inv_r + one != inv_mu + sigma * inv_p {
        return Inhomogeneous::NotSatisfied;
    }
    if sigma < one {
        return Inhomogeneous::NonSharp;
    }
    if sigma == one {
        return if inv_r > zero && inv_p_d > zero { Inhomogeneous::NonSharp } else { Inhomogeneous::NotSatisfied };
    }
    let s1 = sigma - one;
    let sum = inv_q + inv_mu_d;
    if sum < one && s1 * inv_r <= sigma * inv_p_d && s1 * inv_p_d <= sigma * inv_r {
        return Inhomogeneous::NonSharp;
    }
    if sum == one
        && s1 * inv_r < sigma * inv_p_d
        && s1 * inv_p_d < sigma * inv_r
        && inv_r <= inv_q
        && inv_p_d <= inv_mu_d
    {
        return Inhomogeneous::Sharp;
    }
    Inhomogeneous::NotSatisfied
}

/// Exponents of the forcing norm `L^μ_t L^p_x` paired with `(q, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DualPair {
    #[serde(with = "crate::rational::serde_str")]
    pub inv_p: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub inv_mu: Rational,
}

/// `1/p = (β+1)/r + γ/d - 1`, `1/μ = 1 + 1/q + σ(1 - γ/d - β/r)`.
pub fn dual_pair(point: &LebesguePair, params: &ProblemParams) -> Result<DualPair, ExponentError> {
    let dx = derive(params)?;
    let (x, y) = (point.x(), point.y());
    let one = int(1);
    Ok(DualPair {
        inv_p: (params.beta + one) * x + dx.eta - one,
        inv_mu: one + y + dx.sigma * (one - dx.eta - params.beta * x),
    })
}

/// Exponents of the Hölder / Hardy-Littlewood-Sobolev chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HolderChain {
    #[serde(with = "crate::rational::serde_str")]
    pub inv_p1: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub inv_p2: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub inv_mu1: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub inv_mu2: Rational,
    /// Time-Hölder gain of the local theory, `1/(βμ₁) - 1/(q ∧ γ_m(r))`
    /// with `μ` fixed by the σ-pair relation.
    #[serde(with = "crate::rational::serde_str")]
    pub eps: Rational,
}

/// Solves the exponent system at `point` and checks it is usable: `ε > 0` and
/// every exponent in `[0, 1]`.
pub fn holder_chain(point: &LebesguePair, params: &ProblemParams) -> Result<HolderChain, StrichartzError> {
    let dx = derive(params)?;
    let st = StepExponents::compute(point, params)?;
    let dual = dual_pair(point, params)?;
    let (x, y) = (point.x(), point.y());
    let (one, half) = (int(1), rat(1, 2));
    let beta = params.beta;
    let sigma = dx.sigma;

    let inv_gm = st.inv_gamma_m;
    let inv_p1 = dual.inv_p - x;
    let inv_p2 = inv_p1 + one - dx.eta;
    let inv_mu1 = st.a + (beta - one) * inv_gm + y;
    let inv_mu2 = st.d + beta * y;

    let inv_a = max(y, inv_gm);
    let inv_mu_pair = one - sigma * (dual.inv_p - half);
    let eps = (inv_mu_pair - (beta + one) * inv_a) / beta;

    let chain = HolderChain { inv_p1, inv_p2, inv_mu1, inv_mu2, eps };
    let mismatch =
        |what: &str| Err(StrichartzError::Exponent(ExponentError::IdentityFailure(format!("{what} at ({x}, {y})"))));
    if inv_p2 != beta * x {
        return mismatch("1/p2 != beta/r");
    }
    if inv_mu1 + inv_gm != dual.inv_mu || inv_mu2 + y != dual.inv_mu {
        return mismatch("1/mu1 + 1/gamma_m, 1/mu2 + 1/q and 1/mu disagree");
    }
    let threshold = lwp_threshold(params)?;
    let predicted = (beta + one) / beta * (threshold - max(st.alpha_tilde, sigma / int(2)));
    if eps != predicted {
        return mismatch("eps differs from (beta+1)/beta * (threshold - max(alpha_tilde, sigma/2))");
    }

    if eps <= Rational::zero() {
        return Err(StrichartzError::InfeasibleChain(format!("eps = {eps} <= 0")));
    }
    let unit = |q: Rational| Rational::zero() <= q && q <= one;
    for (name, val) in [
        ("1/p", dual.inv_p),
        ("1/mu", dual.inv_mu),
        ("1/p1", inv_p1),
        ("1/p2", inv_p2),
        ("1/mu1", inv_mu1),
        ("1/mu2", inv_mu2),
    ] {
        if !unit(val) {
            return Err(StrichartzError::InfeasibleChain(format!("{name} = {val} outside [0, 1]")));
        }
    }
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    #[serde(with = "crate::rational::serde_str")]
    pub x: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub y: Rational,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub params: ProblemParams,
    pub samples: usize,
    /// Samples inside `Ω_{γ,σ}`.
    pub members: usize,
    /// Non-members at distance at least [`CONVERSE_MARGIN`] from the closure.
    pub converse_probed: usize,
    /// Members certified by the sharp rather than the non-sharp conditions.
    pub sharp_inside: usize,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed: f64,
}

/// Distance outside the closed region beyond which the converse is asserted.
pub const CONVERSE_MARGIN: Rational = Rational::new_raw(1, 1000);

const CHUNK: usize = 1024;

type Membership<'a> = dyn Fn(&LebesguePair, &ProblemParams) -> bool + Sync + 'a;

/// Samples random points and checks `Ω_{γ,σ}` against the Strichartz
/// conditions for the dual pair, in both directions.
pub fn verify_region_equivalence(
    params: &ProblemParams,
    samples: usize,
    seed: u64,
) -> Result<EquivalenceReport, StrichartzError> {
    derive(params)?;
    let member = |p: &LebesguePair, pp: &ProblemParams| in_omega_gamma_sigma(p, pp).unwrap_or(false);
    verify_region_equivalence_with(params, samples, seed, &member)
}

/// [`verify_region_equivalence`] with a caller-supplied membership test.
pub fn verify_region_equivalence_with(
    params: &ProblemParams,
    samples: usize,
    seed: u64,
    member: &Membership<'_>,
) -> Result<EquivalenceReport, StrichartzError> {
    let start = Instant::now();
    let dx = derive(params)?;
    let planes = omega_gamma_sigma_halfplanes(params)?;
    let verts = region_vertices(params)?;
    let bbox = if verts.is_empty() {
        None
    } else {
        let xs = verts.iter().map(|v| v.x());
        let ys = verts.iter().map(|v| v.y());
        Some((xs.clone().min().unwrap(), xs.max().unwrap(), ys.clone().min().unwrap(), ys.max().unwrap()))
    };

    let n_chunks = samples.div_ceil(CHUNK);
    let run_chunk = |c: usize| -> ChunkResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let mut out = ChunkResult::default();
        let count = CHUNK.min(samples - c * CHUNK);
        for i in 0..count {
            let from_box = i % 2 == 1 && bbox.is_some();
            let point = if from_box {
                let (x0, x1, y0, y1) = bbox.unwrap();
                LebesguePair::new(random_in(&mut rng, x0, x1), random_in(&mut rng, y0, y1))
            } else {
                LebesguePair::new(random_in(&mut rng, int(0), rat(1, 2)), random_in(&mut rng, int(0), int(1)))
            };
            if !(point.x() > int(0) && point.x() < rat(1, 2) && point.y() > int(0) && point.y() < int(1)) {
                continue;
            }
            classify(params, &point, dx.sigma, &planes, member, &mut out);
        }
        out
    };

    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(n_chunks.max(1));
    let mut results: Vec<ChunkResult> = Vec::with_capacity(n_chunks);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let run_chunk = &run_chunk;
                s.spawn(move || (t..n_chunks).step_by(threads).map(|c| (c, run_chunk(c))).collect::<Vec<_>>())
            })
            .collect();
        let mut all: Vec<(usize, ChunkResult)> =
            handles.into_iter().flat_map(|h| h.join().expect("sampler thread panicked")).collect();
        all.sort_by_key(|(c, _)| *c);
        results.extend(all.into_iter().map(|(_, r)| r));
    });

    let mut report = EquivalenceReport {
        params: *params,
        samples,
        members: 0,
        converse_probed: 0,
        sharp_inside: 0,
        counterexamples: Vec::new(),
        elapsed: 0.0,
    };
    for r in results {
        report.members += r.members;
        report.converse_probed += r.converse_probed;
        report.sharp_inside += r.sharp_inside;
        report.counterexamples.extend(r.counterexamples);
    }
    report.elapsed = start.elapsed().as_secs_f64();
    if report.counterexamples.is_empty() {
        Ok(report)
    } else {
        Err(StrichartzError::EquivalenceFailure(Box::new(report)))
    }
}

#[derive(Default)]
struct ChunkResult {
    members: usize,
    converse_probed: usize,
    sharp_inside: usize,
    counterexamples: Vec<Counterexample>,
}

fn random_in<R: Rng>(rng: &mut R, lo: Rational, hi: Rational) -> Rational {
    let den: i128 = rng.gen_range(2..=1000);
    let k_lo = (lo * den).floor().to_integer();
    let k_hi = (hi * den).ceil().to_integer();
    rat(rng.gen_range(k_lo..=k_hi), den)
}

fn classify(
    params: &ProblemParams,
    point: &LebesguePair,
    sigma: Rational,
    planes: &[crate::exponents::HalfPlane],
    member: &Membership<'_>,
    out: &mut ChunkResult,
) {
    let (x, y) = (point.x(), point.y());
    let dual = match dual_pair(point, params) {
        Ok(d) => d,
        Err(_) => return,
    };
    let verdict = inhomogeneous_ok_inv(y, x, dual.inv_mu, dual.inv_p, sigma);
    if member(point, params) {
        out.members += 1;
        match verdict {
            Inhomogeneous::NotSatisfied => out.counterexamples.push(Counterexample {
                x,
                y,
                reason: format!(
                    "in region but Strichartz conditions fail (1/p = {}, 1/mu = {})",
                    dual.inv_p, dual.inv_mu
                ),
            }),
            Inhomogeneous::Sharp => out.sharp_inside += 1,
            Inhomogeneous::NonSharp => {}
        }
        return;
    }
    let distance = planes.iter().map(|h| h.violation(x, y)).max().unwrap_or_else(Rational::zero);
    if distance >= CONVERSE_MARGIN {
        out.converse_probed += 1;
        if verdict != Inhomogeneous::NotSatisfied {
            out.counterexamples.push(Counterexample {
                x,
                y,
                reason: format!("outside region by {distance} but Strichartz conditions hold ({verdict:?})"),
            });
        }
    }
}
