//! Exact rational scalars.
//!
//! Every exponent in the calculus is a ratio of small integers, so all of
//! `exponents` and `strichartz` run over [`Rational`] with no tolerance.
//! [`Extended`] adds `+inf` for Lebesgue exponents such as `q = inf`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Canonical reduced fraction with positive denominator.
pub type Rational = Ratio<i128>;

/// Shorthand constructor; panics on a zero denominator.
pub fn rat(numer: i128, denom: i128) -> Rational {
    Ratio::new(numer, denom)
}

pub fn int(n: i128) -> Rational {
    Ratio::from_integer(n)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| *q.numer() as f64 / *q.denom() as f64)
}

/// Exact `"num/den"` form, always with an explicit denominator.
pub fn exact_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Shortest round-trip decimal rendering of the nearest `f64`.
pub fn decimal_string(q: &Rational) -> String {
    format!("{}", to_f64(q))
}

pub fn min(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// `base^exp` for an integer exponent, `None` on overflow or `0^negative`.
pub fn checked_powi(base: &Rational, exp: i128) -> Option<Rational> {
    if base.is_zero() && exp < 0 {
        return None;
    }
    let e = u32::try_from(exp.unsigned_abs()).ok()?;
    let n = base.numer().checked_pow(e)?;
    let d = base.denom().checked_pow(e)?;
    let r = Ratio::new(n, d);
    Some(if exp < 0 { r.recip() } else { r })
}

/// Smallest integer `k` with `base^exp <= k`, computed exactly.
///
/// `base > 0`. Falls back to floating point only when the exact integer
/// comparison would overflow `i128`. Saturates at `u64::MAX`.
pub fn ceil_pow(base: &Rational, exp: &Rational) -> u64 {
    let approx = to_f64(base).powf(to_f64(exp));
    if approx.is_nan() || approx >= u64::MAX as f64 / 2.0 {
        return u64::MAX;
    }
    let guess = approx.ceil().max(0.0) as u64;
    // base^exp <= k  <=>  p^a <= k^b q^a   with base = p/q, exp = a/b (b > 0)
    let fits = |k: u64| -> Option<bool> {
        let (p, q) = (*base.numer(), *base.denom());
        let (a, b) = (*exp.numer(), *exp.denom());
        let b = u32::try_from(b).ok()?;
        let k = i128::from(k);
        if a >= 0 {
            let a = u32::try_from(a).ok()?;
            let lhs = p.checked_pow(a)?;
            let rhs = k.checked_pow(b)?.checked_mul(q.checked_pow(a)?)?;
            Some(lhs <= rhs)
        } else {
            let a = u32::try_from(-a).ok()?;
            // (q/p)^|a| <= k^b
            let lhs = q.checked_pow(a)?;
            let rhs = k.checked_pow(b)?.checked_mul(p.checked_pow(a)?)?;
            Some(lhs <= rhs)
        }
    };
    let mut k = guess;
    match fits(k) {
        Some(true) => {
            while k > 0 && fits(k - 1) == Some(true) {
                k -= 1;
            }
            k
        }
        Some(false) => {
            while fits(k) == Some(false) {
                k = k.saturating_add(1);
            }
            k
        }
        None => guess,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("floating-point literal `{0}` rejected; write exponents as \"a/b\"")]
    Float(String),
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"a/b"` or `"a"`. Decimal points and exponents are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(ParseRationalError::Float(s.to_owned()));
    }
    let parse_int = |t: &str| t.trim().parse::<i128>().map_err(|_| ParseRationalError::Invalid(s.to_owned()));
    match s.split_once('/') {
        None => Ok(int(parse_int(s)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d == 0 {
                return Err(ParseRationalError::ZeroDenominator(s.to_owned()));
            }
            Ok(Ratio::new(n, d))
        }
    }
}

/// A rational extended by `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Rational),
    Infinity,
}

impl Extended {
    pub fn finite(&self) -> Option<Rational> {
        match self {
            Extended::Finite(q) => Some(*q),
            Extended::Infinity => None,
        }
    }

    /// `1/self`, with `1/inf = 0` and `1/0 = inf`.
    pub fn recip(&self) -> Extended {
        match self {
            Extended::Infinity => Extended::Finite(Rational::zero()),
            Extended::Finite(q) if q.is_zero() => Extended::Infinity,
            Extended::Finite(q) => Extended::Finite(q.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(q) => to_f64(q),
            Extended::Infinity => f64::INFINITY,
        }
    }
}

impl From<Rational> for Extended {
    fn from(q: Rational) -> Self {
        Extended::Finite(q)
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
            (Extended::Infinity, _) => Ordering::Greater,
            (_, Extended::Infinity) => Ordering::Less,
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(q) => write!(f, "{}", exact_string(q)),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Extended {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Extended::Infinity),
            other => parse_rational(other).map(Extended::Finite),
        }
    }
}

impl serde::Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Extended {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "serde_str")]` for a [`Rational`] stored as `"num/den"`.
pub mod serde_str {
    use super::{exact_string, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&exact_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// `Option<Rational>` counterpart of [`serde_str`].
pub mod serde_str_opt {
    use super::{exact_string, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, serializer: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => serializer.serialize_str(&exact_string(q)),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(deserializer)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// `Vec<Rational>` counterpart of [`serde_str`].
pub mod serde_str_vec {
    use super::{exact_string, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(qs: &[Rational], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(qs.iter().map(exact_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(deserializer)?
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
