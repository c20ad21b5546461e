//! Arithmetic backends.
//!
//! Every allocation routine is generic over [`Real`], implemented for exact
//! rationals ([`BigRational`]) and for `f64`. Rational inputs give exact tie
//! detection; floats flag *near* ties whose comparative figures agree to
//! within [`NEAR_TIE_RELATIVE`].

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Relative tolerance under which two float quantities are treated as tied.
pub const NEAR_TIE_RELATIVE: f64 = 1e-12;

pub trait Real:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_u64(v: u64) -> Self;
    fn from_ratio(r: &BigRational) -> Self;
    /// Best-effort conversion; exact backends store the binary value of `v` exactly.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// The exact rational value, when the backend is exact.
    fn to_ratio(&self) -> Option<BigRational>;
    /// Largest integer not above `self`.
    fn floor_i64(&self) -> i64;

    /// Comparison that treats values within tolerance as equal.
    ///
    /// `scale` is an additional magnitude for the absolute part of the
    /// tolerance (pass `0.0` for purely relative comparisons). Exact
    /// backends ignore it.
    fn cmp_tol(&self, other: &Self, scale: f64) -> Ordering;

    /// Strict total comparison (no tolerance).
    fn cmp_exact(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn to_ratio(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("integer part fits in i64")
    }

    fn cmp_tol(&self, other: &Self, _scale: f64) -> Ordering {
        self.cmp(other)
    }

    fn cmp_exact(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Real for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_ratio(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_ratio(&self) -> Option<BigRational> {
        None
    }

    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }

    fn cmp_tol(&self, other: &Self, scale: f64) -> Ordering {
        let tol = NEAR_TIE_RELATIVE * scale.max(self.abs()).max(other.abs());
        if (self - other).abs() <= tol {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

/// Converts a rational to the nearest-ish `f64`, robust to huge numerators
/// and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both parts down so they fit in the float range.
    let nbits = r.numer().bits() as i64;
    let dbits = r.denom().bits() as i64;
    let shift_n = (nbits - 900).max(0) as u64;
    let shift_d = (dbits - 900).max(0) as u64;
    let n = (r.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Parses `"3"`, `"-1/2"`, `"0.125"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let negative = mantissa.starts_with('-');
    let digits = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Formats a rational as `"p/q"` (or `"p"` when integral).
pub fn format_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Least common multiple of a set of denominators.
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Binomial coefficient as `f64` (used only for reporting orbit sizes).
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
