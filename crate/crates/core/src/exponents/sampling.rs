//! Seeded random draws of small-denominator parameters and region points.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{region_vertices, LebesguePair, ProblemParams, Sign};
use crate::rational::{rat, Rational};

/// Largest denominator used for `m`, `γ` and `β`.
pub const MAX_DENOM: i128 = 24;

fn small_rational<R: Rng>(rng: &mut R, lo: Rational, hi: Rational) -> Option<Rational> {
    // a random fraction k/q strictly inside (lo, hi)
    for _ in 0..16 {
        let q = rng.gen_range(1..=MAX_DENOM);
        let k_lo = (lo * q).floor().to_integer() + 1;
        let k_hi = (hi * q).ceil().to_integer() - 1;
        if k_lo <= k_hi {
            return Some(rat(rng.gen_range(k_lo..=k_hi), q));
        }
    }
    None
}

/// A subcritical parameter set with `d ∈ 1..=6` and `m` drawn from a short
/// list that covers `σ < 1`, `σ = 1`, `σ > 1` and `σ > 2`.
pub fn random_params<R: Rng>(rng: &mut R) -> ProblemParams {
    const MS: [(i128, i128); 6] = [(2, 1), (3, 1), (4, 1), (5, 2), (6, 1), (7, 2)];
    loop {
        let d: u32 = rng.gen_range(1..=6);
        let (mn, md) = *MS.choose(rng).expect("nonempty");
        let m = rat(mn, md);
        let dim = rat(i128::from(d), 1);
        let Some(gamma) = small_rational(rng, rat(0, 1), dim) else { continue };
        let eta = gamma / dim;
        let lo = rat(2, 1) * (rat(1, 1) - eta);
        let hi = lo + rat(2, 1) * m / dim;
        let Some(beta) = small_rational(rng, lo, hi) else { continue };
        let sign = if rng.gen_bool(0.5) { Sign::Focusing } else { Sign::Defocusing };
        if let Ok(p) = ProblemParams::new(d, m, gamma, beta, sign) {
            return p;
        }
    }
}

/// A subcritical parameter set whose `Ω_{γ,σ}` has nonempty interior.
pub fn random_params_with_region<R: Rng>(rng: &mut R) -> (ProblemParams, Vec<LebesguePair>) {
    loop {
        let p = random_params(rng);
        if let Ok(v) = region_vertices(&p) {
            if !v.is_empty() {
                return (p, v);
            }
        }
    }
}

/// A lattice point strictly inside the polygon with the given vertices
/// (counter-clockwise), by rejection on lattices of growing resolution.
/// Points have denominators at most 4096.
pub fn random_point_in<R: Rng>(
    rng: &mut R,
    vertices: &[LebesguePair],
    inside: impl Fn(&LebesguePair) -> bool,
) -> Option<LebesguePair> {
    let xs = vertices.iter().map(|v| v.x());
    let ys = vertices.iter().map(|v| v.y());
    let (x_lo, x_hi) = (xs.clone().min()?, xs.max()?);
    let (y_lo, y_hi) = (ys.clone().min()?, ys.max()?);
    let mut n: i128 = 24;
    while n <= 4096 {
        let i_lo = (x_lo * n).floor().to_integer();
        let i_hi = (x_hi * n).ceil().to_integer();
        let j_lo = (y_lo * n).floor().to_integer();
        let j_hi = (y_hi * n).ceil().to_integer();
        for _ in 0..64 {
            let p = LebesguePair::new(rat(rng.gen_range(i_lo..=i_hi), n), rat(rng.gen_range(j_lo..=j_hi), n));
            if inside(&p) {
                return Some(p);
            }
        }
        n *= 2;
    }
    None
}
