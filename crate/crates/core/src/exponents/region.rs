use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{derive, DerivedExponents, ExponentError, ProblemParams};
use crate::rational::{int, rat, Rational};

/// A point `(x, y) = (1/r, 1/q)` of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LebesguePair {
    #[serde(with = "crate::rational::serde_str")]
    pub inv_r: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub inv_q: Rational,
}

impl LebesguePair {
    pub fn new(inv_r: Rational, inv_q: Rational) -> Self {
        LebesguePair { inv_r, inv_q }
    }

    pub fn x(&self) -> Rational {
        self.inv_r
    }

    pub fn y(&self) -> Rational {
        self.inv_q
    }

    /// `0 <= 1/r <= 1/2` and `0 <= 1/q <= 1`.
    pub fn in_unit_range(&self) -> bool {
        let zero = Rational::zero();
        zero <= self.inv_r && self.inv_r <= rat(1, 2) && zero <= self.inv_q && self.inv_q <= int(1)
    }
}

/// The open half-plane `a·x + b·y < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl HalfPlane {
    fn new(a: Rational, b: Rational, c: Rational) -> Self {
        HalfPlane { a, b, c }
    }

    pub fn value(&self, x: Rational, y: Rational) -> Rational {
        self.a * x + self.b * y
    }

    pub fn strict(&self, x: Rational, y: Rational) -> bool {
        self.value(x, y) < self.c
    }

    pub fn closed(&self, x: Rational, y: Rational) -> bool {
        self.value(x, y) <= self.c
    }

    /// How far `(x, y)` sits outside the closed half-plane, normalised by
    /// `|a| + |b|`. Zero for points inside.
    pub fn violation(&self, x: Rational, y: Rational) -> Rational {
        let excess = self.value(x, y) - self.c;
        if excess <= Rational::zero() {
            return Rational::zero();
        }
        let norm = self.a.abs_ratio() + self.b.abs_ratio();
        excess / norm
    }
}

trait AbsRatio {
    fn abs_ratio(&self) -> Self;
}

impl AbsRatio for Rational {
    fn abs_ratio(&self) -> Rational {
        if *self < Rational::zero() {
            -*self
        } else {
            *self
        }
    }
}

fn omega_gamma_halfplanes(params: &ProblemParams, dx: &DerivedExponents) -> Vec<HalfPlane> {
    let (s, e, b) = (dx.sigma, dx.eta, params.beta);
    let zero = Rational::zero();
    let one = Rational::one();
    vec![
        // y > 0
        HalfPlane::new(zero, -one, zero),
        // y < 2σ(1/2 - x)
        HalfPlane::new(int(2) * s, one, s),
        // y < σ(βx - 1 + η)
        HalfPlane::new(-s * b, one, s * (e - one)),
        // y > σ(2 - η - (β+2)x)
        HalfPlane::new(-s * (b + int(2)), -one, -s * (int(2) - e)),
    ]
}

/// Half-planes cutting out `Ω_{γ,σ}` by its main definition.
pub fn omega_gamma_sigma_halfplanes(params: &ProblemParams) -> Result<Vec<HalfPlane>, ExponentError> {
    let dx = derive(params)?;
    let zero = Rational::zero();
    let one = Rational::one();
    let mut planes = omega_gamma_halfplanes(params, &dx);
    planes.push(HalfPlane::new(-one, zero, zero));
    planes.push(HalfPlane::new(one, zero, dx.x3));
    if dx.sigma > one {
        let x4 = dx.x4.expect("x4 defined for sigma > 1");
        let x5 = dx.x5.expect("x5 defined for sigma > 1");
        planes.push(HalfPlane::new(-one, zero, -x4));
        planes.push(HalfPlane::new(one, zero, x5));
    }
    Ok(planes)
}

fn omega_gamma_with(point: &LebesguePair, params: &ProblemParams, dx: &DerivedExponents) -> bool {
    let (x, y) = (point.x(), point.y());
    let (s, e, b) = (dx.sigma, dx.eta, params.beta);
    let one = Rational::one();
    Rational::zero() < y
        && y < int(2) * s * (rat(1, 2) - x)
        && y < s * (b * x - one + e)
        && y > s * (int(2) - e - (b + int(2)) * x)
}

pub fn in_omega_gamma(point: &LebesguePair, params: &ProblemParams) -> Result<bool, ExponentError> {
    let dx = derive(params)?;
    Ok(omega_gamma_with(point, params, &dx))
}

/// Membership in `Ω_{γ,σ}`.
///
/// For `σ > 1` the five-way split on `(2η-1)σ` and `β̃` is used; parameters
/// outside every row (`β̃ >= 2/σ`) fall back to [`in_omega_gamma_sigma_raw`].
pub fn in_omega_gamma_sigma(point: &LebesguePair, params: &ProblemParams) -> Result<bool, ExponentError> {
    let dx = derive(params)?;
    let one = Rational::one();
    if !omega_gamma_with(point, params, &dx) {
        return Ok(false);
    }
    let x = point.x();
    if dx.sigma <= one {
        return Ok(Rational::zero() < x && x < dx.x3);
    }
    let bt = dx.beta_tilde;
    let s = dx.sigma;
    let inv_s = one / s;
    let two_inv_s = int(2) / s;
    let x4 = dx.x4.expect("x4 defined for sigma > 1");
    let x5 = dx.x5.expect("x5 defined for sigma > 1");
    let beta_0 = dx.beta_0.expect("beta_0 defined for sigma > 1");
    let zero = Rational::zero();
    if (int(2) * dx.eta - one) * s <= int(2) {
        if zero < bt && bt <= inv_s {
            return Ok(true);
        }
        if inv_s < bt && bt <= two_inv_s {
            return Ok(x < x5);
        }
    } else {
        if zero < bt && bt <= inv_s {
            return Ok(true);
        }
        if inv_s < bt && bt <= beta_0 {
            return Ok(x < x5);
        }
        if beta_0 < bt && bt < two_inv_s {
            return Ok(x4 < x && x < x5);
        }
    }
    in_omega_gamma_sigma_raw(point, params)
}

/// Membership in `Ω_{γ,σ}` straight from its two-branch definition.
pub fn in_omega_gamma_sigma_raw(point: &LebesguePair, params: &ProblemParams) -> Result<bool, ExponentError> {
    let planes = omega_gamma_sigma_halfplanes(params)?;
    Ok(planes.iter().all(|h| h.strict(point.x(), point.y())))
}

fn intersect(h: &HalfPlane, k: &HalfPlane) -> Option<(Rational, Rational)> {
    let det = h.a * k.b - h.b * k.a;
    if det.is_zero() {
        return None;
    }
    let x = (h.c * k.b - h.b * k.c) / det;
    let y = (h.a * k.c - h.c * k.a) / det;
    Some((x, y))
}

/// Vertices of the closure of `Ω_{γ,σ}`, sorted counter-clockwise.
///
/// Empty when the region has no interior.
pub fn region_vertices(params: &ProblemParams) -> Result<Vec<LebesguePair>, ExponentError> {
    let planes = omega_gamma_sigma_halfplanes(params)?;
    let mut verts: Vec<(Rational, Rational)> = Vec::new();
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            if let Some((x, y)) = intersect(&planes[i], &planes[j]) {
                if planes.iter().all(|h| h.closed(x, y)) && !verts.contains(&(x, y)) {
                    verts.push((x, y));
                }
            }
        }
    }
    if verts.len() < 3 {
        return Ok(Vec::new());
    }
    // sort by angle around the vertex mean using an exact cross-product comparator
    let n = int(verts.len() as i128);
    let cx = verts.iter().map(|v| v.0).sum::<Rational>() / n;
    let cy = verts.iter().map(|v| v.1).sum::<Rational>() / n;
    let half = |v: &(Rational, Rational)| {
        let (dx, dy) = (v.0 - cx, v.1 - cy);
        dy < Rational::zero() || (dy.is_zero() && dx < Rational::zero())
    };
    verts.sort_by(|p, q| {
        half(p).cmp(&half(q)).then_with(|| {
            let cross = (p.0 - cx) * (q.1 - cy) - (p.1 - cy) * (q.0 - cx);
            Rational::zero().cmp(&cross)
        })
    });
    let area2: Rational = (0..verts.len())
        .map(|i| {
            let (p, q) = (verts[i], verts[(i + 1) % verts.len()]);
            p.0 * q.1 - p.1 * q.0
        })
        .sum();
    if area2.is_zero() {
        return Ok(Vec::new());
    }
    Ok(verts.into_iter().map(|(x, y)| LebesguePair::new(x, y)).collect())
}

/// `(dβ + γ)/(m(β + 2))`.
pub fn alpha_tilde_sup_closed_form(params: &ProblemParams) -> Rational {
    (params.dim() * params.beta + params.gamma) / (params.m * (params.beta + int(2)))
}

/// Supremum of `α̃ = y + σx` over `Ω_{γ,σ}` by vertex enumeration, checked
/// against the closed form.
pub fn alpha_tilde_sup(params: &ProblemParams) -> Result<Rational, ExponentError> {
    let dx = derive(params)?;
    let verts = region_vertices(params)?;
    let vertex = verts.iter().map(|p| p.y() + dx.sigma * p.x()).max().ok_or(ExponentError::EmptyRegion)?;
    let closed = alpha_tilde_sup_closed_form(params);
    if vertex != closed {
        return Err(ExponentError::SupMismatch { vertex, closed });
    }
    Ok(vertex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Sign;

    fn fixture() -> ProblemParams {
        ProblemParams::new(1, int(2), rat(1, 2), int(2), Sign::Defocusing).unwrap()
    }

    fn pt(x: Rational, y: Rational) -> LebesguePair {
        LebesguePair::new(x, y)
    }

    #[test]
    fn omega_gamma_examples() {
        let p = fixture();
        assert!(in_omega_gamma(&pt(rat(2, 5), rat(1, 20)), &p).unwrap());
        assert!(!in_omega_gamma(&pt(rat(2, 5), rat(1, 10)), &p).unwrap());
        assert!(!in_omega_gamma(&pt(rat(1, 2), rat(1, 100)), &p).unwrap());
    }

    #[test]
    fn omega_gamma_sigma_examples() {
        let p = fixture();
        assert!(in_omega_gamma_sigma(&pt(rat(2, 5), rat(1, 20)), &p).unwrap());
        // x3 = 1/2 for the fixture
        assert!(!in_omega_gamma_sigma(&pt(rat(1, 2), rat(1, 1000)), &p).unwrap());
    }

    #[test]
    fn fixture_vertices_and_sup() {
        let p = fixture();
        let v = region_vertices(&p).unwrap();
        assert_eq!(v.len(), 4);
        // (x0, y0) = (1/3, 1/12), (x1, y1) = (3/8, 1/16) ... plus the two on y = 0
        let set: Vec<_> = v.iter().map(|q| (q.x(), q.y())).collect();
        assert!(set.contains(&(rat(1, 2), int(0))));
        assert!(set.contains(&(rat(3, 8), int(0))));
        assert!(set.contains(&(rat(3, 8), rat(1, 8))));
        assert!(set.contains(&(rat(1, 3), rat(1, 12))));
        assert_eq!(alpha_tilde_sup(&p).unwrap(), rat(5, 16));
    }

    #[test]
    fn sigma_above_one_sample() {
        let p = ProblemParams::new(3, int(2), rat(3, 2), rat(3, 2), Sign::Defocusing).unwrap();
        let verts = region_vertices(&p).unwrap();
        assert!(!verts.is_empty());
        for i in 1..40 {
            for j in 1..80 {
                let q = pt(rat(i, 80), rat(j, 80));
                assert_eq!(in_omega_gamma_sigma(&q, &p).unwrap(), in_omega_gamma_sigma_raw(&q, &p).unwrap());
            }
        }
    }

    #[test]
    fn empty_region_reports() {
        // β at the lower end of the window: β̃ = 0
        let p = ProblemParams::new(1, int(2), rat(1, 2), int(1), Sign::Defocusing).unwrap();
        assert!(region_vertices(&p).unwrap().is_empty());
        assert_eq!(alpha_tilde_sup(&p), Err(ExponentError::EmptyRegion));
    }
}
