//! Signpost (divisor) sequences `d(1) <= d(2) <= ...` of divisor methods.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ApportionError, Result};
use crate::numeric::{ratio_to_f64, Real};

/// A closed family of signpost sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum SignpostSequence {
    /// `d(n) = n - 1 + beta` with `beta >= 0`.
    Linear { beta: BigRational },
    /// `d(n) = (n - 1 + beta)_+` with `beta < 0`.
    ClippedLinear { beta: BigRational },
    /// `d(n) = n^exponent`.
    Power { exponent: f64 },
    /// `d(n) = ratio^(n-1)`.
    Geometric { ratio: BigRational },
    /// `d(n) = sqrt(n (n - 1))`.
    SqrtPairProduct,
    /// `d(n) = 2 n (n - 1) / (2 n - 1)`.
    HarmonicPair,
    /// Explicit values `d(1), d(2), ...`. Past the end of the list the last
    /// step is repeated, unless `cap` is set, in which case `d(n) = +inf`
    /// for `n > cap`.
    Table {
        values: Vec<BigRational>,
        cap: Option<u64>,
    },
}

/// How comparisons of comparative figures are carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exactness {
    ExactRational,
    /// Figures are compared through their squares, which are rational.
    ExactSquaredRational,
    FloatEpsilon,
}

/// A single signpost value in the comparison domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Signpost<R> {
    Zero,
    Finite(R),
    Infinite,
}

/// A comparative figure `v / d(n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Figure<R> {
    /// `d(n) = +inf`: the party cannot take another seat.
    Capped,
    Finite(R),
    /// `d(n) = 0`: a mandatory seat.
    Infinite,
}

impl<R: Real> Figure<R> {
    pub fn cmp_tol(&self, other: &Self) -> Ordering {
        self.cmp_with(other, |a, b| a.cmp_tol(b, 0.0))
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        self.cmp_with(other, |a, b| a.cmp_exact(b))
    }

    fn cmp_with(&self, other: &Self, f: impl Fn(&R, &R) -> Ordering) -> Ordering {
        use Figure::*;
        match (self, other) {
            (Finite(a), Finite(b)) => f(a, b),
            (Capped, Capped) | (Infinite, Infinite) => Ordering::Equal,
            (Capped, _) | (_, Infinite) => Ordering::Less,
            (_, Capped) | (Infinite, _) => Ordering::Greater,
        }
    }

    pub fn finite(&self) -> Option<&R> {
        match self {
            Figure::Finite(r) => Some(r),
            _ => None,
        }
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl SignpostSequence {
    /// The `beta`-linear family, clipped at zero when `beta < 0`.
    pub fn linear(beta: BigRational) -> Self {
        if beta.is_negative() {
            SignpostSequence::ClippedLinear { beta }
        } else {
            SignpostSequence::Linear { beta }
        }
    }

    pub fn jefferson() -> Self {
        Self::linear(q(1, 1))
    }

    pub fn webster() -> Self {
        Self::linear(q(1, 2))
    }

    pub fn adams() -> Self {
        Self::linear(q(0, 1))
    }

    pub fn imperiali() -> Self {
        Self::linear(q(2, 1))
    }

    pub fn danish() -> Self {
        Self::linear(q(1, 3))
    }

    pub fn cambridge() -> Self {
        Self::linear(q(-5, 1))
    }

    pub fn adjusted_sainte_lague() -> Self {
        SignpostSequence::Table {
            values: vec![q(7, 10), q(3, 2), q(5, 2)],
            cap: None,
        }
    }

    pub fn huntington() -> Self {
        SignpostSequence::SqrtPairProduct
    }

    pub fn dean() -> Self {
        SignpostSequence::HarmonicPair
    }

    pub fn estonia() -> Self {
        SignpostSequence::Power { exponent: 0.9 }
    }

    pub fn macau() -> Self {
        SignpostSequence::Geometric { ratio: q(2, 1) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(ApportionError::InvalidSignposts(msg.to_string()));
        match self {
            SignpostSequence::Linear { beta } if beta.is_negative() => {
                bad("linear signposts need beta >= 0; use the clipped family")
            }
            SignpostSequence::ClippedLinear { beta } if !beta.is_negative() => {
                bad("clipped linear signposts need beta < 0")
            }
            SignpostSequence::Power { exponent } if !(exponent.is_finite() && *exponent > 0.0) => {
                bad("power exponent must be positive")
            }
            SignpostSequence::Geometric { ratio } if *ratio <= <BigRational as One>::one() => {
                bad("geometric ratio must exceed 1")
            }
            SignpostSequence::Table { values, cap } => {
                if values.is_empty() {
                    return bad("empty table");
                }
                if values.iter().any(|v| v.is_negative()) {
                    return bad("negative signpost");
                }
                for w in values.windows(2) {
                    if w[1] < w[0] || (Signed::is_positive(&w[0]) && w[1] == w[0]) {
                        return bad("signposts must be nondecreasing and strictly increasing once positive");
                    }
                }
                if *cap == Some(0) {
                    return bad("cap must be at least 1");
                }
                let extrapolates = cap.is_none_or(|c| c > values.len() as u64);
                if extrapolates && (values.len() < 2 || self.table_step().is_none_or(|s| !Signed::is_positive(&s))) {
                    return bad("table needs two values with a positive last step to be extended");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn table_step(&self) -> Option<BigRational> {
        match self {
            SignpostSequence::Table { values, .. } if values.len() >= 2 => {
                Some(values[values.len() - 1].clone() - values[values.len() - 2].clone())
            }
            _ => None,
        }
    }

    pub fn exactness(&self) -> Exactness {
        match self {
            SignpostSequence::Power { .. } => Exactness::FloatEpsilon,
            SignpostSequence::SqrtPairProduct => Exactness::ExactSquaredRational,
            _ => Exactness::ExactRational,
        }
    }

    /// Number of leading zero signposts, i.e. seats every party is guaranteed.
    pub fn zero_count(&self) -> u64 {
        match self {
            SignpostSequence::Linear { beta } => u64::from(beta.is_zero()),
            SignpostSequence::ClippedLinear { beta } => {
                (<BigRational as One>::one() - beta).floor().to_integer().to_u64().unwrap_or(u64::MAX)
            }
            SignpostSequence::Power { .. } | SignpostSequence::Geometric { .. } => 0,
            SignpostSequence::SqrtPairProduct | SignpostSequence::HarmonicPair => 1,
            SignpostSequence::Table { values, .. } => values.iter().take_while(|v| v.is_zero()).count() as u64,
        }
    }

    /// Largest seat count a single party can reach, if bounded.
    pub fn cap(&self) -> Option<u64> {
        match self {
            SignpostSequence::Table { cap, .. } => *cap,
            _ => None,
        }
    }

    /// The `beta` of the linear method this sequence matches asymptotically
    /// (`d(n) = a (n - 1 + beta) + o(1)`), if any.
    pub fn asymptotic_beta(&self) -> Option<BigRational> {
        match self {
            SignpostSequence::Linear { beta } | SignpostSequence::ClippedLinear { beta } => Some(beta.clone()),
            SignpostSequence::SqrtPairProduct | SignpostSequence::HarmonicPair => Some(q(1, 2)),
            SignpostSequence::Table { values, cap: None } => {
                let step = self.table_step()?;
                let len = BigRational::from_integer(BigInt::from(values.len()));
                Some(values[values.len() - 1].clone() / step - len + <BigRational as One>::one())
            }
            _ => None,
        }
    }

    /// `d(n)` as an exact rational, when it is one (`None` for `+inf`,
    /// power and square-root families).
    pub fn exact_value(&self, n: u64) -> Option<BigRational> {
        if n == 0 {
            return Some(<BigRational as Zero>::zero());
        }
        let nn = BigRational::from_integer(BigInt::from(n));
        match self {
            SignpostSequence::Linear { beta } => Some(nn - <BigRational as One>::one() + beta.clone()),
            SignpostSequence::ClippedLinear { beta } => {
                let v = nn - <BigRational as One>::one() + beta.clone();
                Some(if v.is_negative() { <BigRational as Zero>::zero() } else { v })
            }
            SignpostSequence::Geometric { ratio } => Some(num_traits::pow(ratio.clone(), (n - 1) as usize)),
            SignpostSequence::HarmonicPair => {
                let two = BigRational::from_integer(2.into());
                Some(two.clone() * nn.clone() * (nn.clone() - <BigRational as One>::one()) / (two * nn - <BigRational as One>::one()))
            }
            SignpostSequence::Table { values, cap } => {
                if cap.is_some_and(|c| n > c) {
                    return None;
                }
                let len = values.len() as u64;
                if n <= len {
                    Some(values[(n - 1) as usize].clone())
                } else {
                    let step = self.table_step()?;
                    Some(values[values.len() - 1].clone() + step * BigRational::from_integer(BigInt::from(n - len)))
                }
            }
            SignpostSequence::Power { .. } | SignpostSequence::SqrtPairProduct => None,
        }
    }

    /// `d(n)` as a float (`+inf` beyond a cap).
    pub fn value_f64(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            SignpostSequence::Power { exponent } => (n as f64).powf(*exponent),
            SignpostSequence::SqrtPairProduct => ((n as f64) * (n as f64 - 1.0)).sqrt(),
            _ => self.exact_value(n).map_or(f64::INFINITY, |v| ratio_to_f64(&v)),
        }
    }

    /// Builds an evaluator in backend `R`. Fails when exact arithmetic is
    /// requested for a family that has no exact representation.
    pub(crate) fn evaluator<R: Real>(&self) -> Result<Evaluator<R>> {
        self.validate()?;
        if R::EXACT && self.exactness() == Exactness::FloatEpsilon {
            return Err(ApportionError::UnsupportedMethod(
                "power signposts have no exact representation".into(),
            ));
        }
        let to_r = |r: &BigRational| if R::EXACT { R::from_ratio(r) } else { R::from_f64(ratio_to_f64(r)) };
        let kind = match self {
            SignpostSequence::Linear { beta } | SignpostSequence::ClippedLinear { beta } => Kind::Linear {
                beta: to_r(beta),
                beta_f: ratio_to_f64(beta),
            },
            SignpostSequence::Power { exponent } => Kind::Power { exponent: *exponent },
            SignpostSequence::Geometric { ratio } => Kind::Geometric {
                ratio: to_r(ratio),
                ratio_f: ratio_to_f64(ratio),
            },
            SignpostSequence::SqrtPairProduct => Kind::Sqrt,
            SignpostSequence::HarmonicPair => Kind::Harmonic,
            SignpostSequence::Table { values, .. } => Kind::Table {
                values: values.iter().map(to_r).collect(),
                step: self.table_step().map(|s| to_r(&s)),
            },
        };
        Ok(Evaluator {
            kind,
            zeros: self.zero_count(),
            cap: self.cap(),
            squared: R::EXACT && self.exactness() == Exactness::ExactSquaredRational,
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Kind<R> {
    Linear { beta: R, beta_f: f64 },
    Power { exponent: f64 },
    Geometric { ratio: R, ratio_f: f64 },
    Sqrt,
    Harmonic,
    Table { values: Vec<R>, step: Option<R> },
}

/// Signposts compiled for one arithmetic backend.
///
/// Values live in the *comparison domain*: for exact square-root signposts
/// the domain is squared, so `d(n)^2 = n (n - 1)` stays rational and votes
/// and divisors must be squared as well.
#[derive(Debug, Clone)]
pub(crate) struct Evaluator<R> {
    kind: Kind<R>,
    pub(crate) zeros: u64,
    pub(crate) cap: Option<u64>,
    pub(crate) squared: bool,
}

const GUESS_LIMIT: f64 = 1e15;

impl<R: Real> Evaluator<R> {
    pub(crate) fn value(&self, n: u64) -> Signpost<R> {
        if n <= self.zeros {
            return Signpost::Zero;
        }
        if self.cap.is_some_and(|c| n > c) {
            return Signpost::Infinite;
        }
        let nr = R::from_u64(n);
        let v = match &self.kind {
            Kind::Linear { beta, .. } => nr - R::one() + beta.clone(),
            Kind::Power { exponent } => R::from_f64((n as f64).powf(*exponent)),
            Kind::Geometric { ratio, ratio_f } => {
                if R::EXACT {
                    let mut acc = R::one();
                    for _ in 1..n {
                        acc = acc * ratio.clone();
                    }
                    acc
                } else {
                    let v = ratio_f.powf((n - 1) as f64);
                    if !v.is_finite() {
                        return Signpost::Infinite;
                    }
                    R::from_f64(v)
                }
            }
            Kind::Sqrt => {
                let prod = R::from_u64(n) * R::from_u64(n - 1);
                if self.squared {
                    prod
                } else {
                    R::from_f64(prod.to_f64().sqrt())
                }
            }
            Kind::Harmonic => {
                let two = R::from_u64(2);
                two.clone() * nr.clone() * (nr.clone() - R::one()) / (two * nr - R::one())
            }
            Kind::Table { values, step } => {
                let len = values.len() as u64;
                if n <= len {
                    values[(n - 1) as usize].clone()
                } else {
                    let step = step.clone().expect("validated table extrapolation");
                    values[values.len() - 1].clone() + step * R::from_u64(n - len)
                }
            }
        };
        if v.is_positive() {
            Signpost::Finite(v)
        } else {
            Signpost::Zero
        }
    }

    /// `d(n)` compared with `x` (`x > 0`, in the comparison domain).
    pub(crate) fn cmp_at(&self, n: u64, x: &R, tolerant: bool) -> Ordering {
        if n == 0 {
            return Ordering::Less;
        }
        match self.value(n) {
            Signpost::Zero => Ordering::Less,
            Signpost::Infinite => Ordering::Greater,
            Signpost::Finite(d) => {
                if tolerant {
                    d.cmp_tol(x, 0.0)
                } else {
                    d.cmp_exact(x)
                }
            }
        }
    }

    /// The comparative figure `v / d(n)` (domain units).
    pub(crate) fn figure(&self, vote: &R, n: u64) -> Figure<R> {
        match self.value(n) {
            Signpost::Zero => Figure::Infinite,
            Signpost::Infinite => Figure::Capped,
            Signpost::Finite(d) => Figure::Finite(vote.clone() / d),
        }
    }

    /// Rough count of signposts `<= x` (plain units), used to start searches.
    fn approx_count(&self, x_plain: f64) -> u64 {
        let raw = match &self.kind {
            Kind::Linear { beta_f, .. } => x_plain + 1.0 - beta_f,
            Kind::Power { exponent } => x_plain.powf(1.0 / exponent),
            Kind::Geometric { ratio_f, .. } => {
                if x_plain < 1.0 {
                    0.0
                } else {
                    1.0 + x_plain.ln() / ratio_f.ln()
                }
            }
            Kind::Sqrt | Kind::Harmonic => x_plain + 0.5,
            Kind::Table { .. } => 0.0,
        };
        let raw = if raw.is_nan() { 0.0 } else { raw.clamp(0.0, GUESS_LIMIT) };
        let guess = raw.floor() as u64;
        match self.cap {
            Some(c) => guess.min(c),
            None => guess,
        }
    }

    fn plain(&self, x: &R) -> f64 {
        let v = x.to_f64();
        if self.squared {
            v.sqrt()
        } else {
            v
        }
    }

    /// `#{n >= 1 : d(n) < x}`.
    pub(crate) fn count_below(&self, x: &R, tolerant: bool) -> u64 {
        let guess = self.approx_count(self.plain(x));
        self.last_true(guess, |n| self.cmp_at(n, x, tolerant) == Ordering::Less)
    }

    /// `#{n >= 1 : d(n) <= x}`.
    pub(crate) fn count_at_most(&self, x: &R, tolerant: bool) -> u64 {
        let guess = self.approx_count(self.plain(x));
        self.last_true(guess, |n| self.cmp_at(n, x, tolerant) != Ordering::Greater)
    }

    /// Largest `n` with `pred(n)`, for a predicate true on a prefix
    /// `0..=answer` (`pred(0)` must hold).
    fn last_true(&self, guess: u64, pred: impl Fn(u64) -> bool) -> u64 {
        let limit = self.cap.unwrap_or(u64::MAX / 4);
        let bisect = |mut lo: u64, mut hi: u64| {
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if pred(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let start = guess.min(limit);
        if start == 0 || pred(start) {
            let mut lo = start;
            let mut step = 1u64;
            loop {
                let hi = lo.saturating_add(step).min(limit);
                if hi == lo {
                    return lo;
                }
                if pred(hi) {
                    lo = hi;
                    step = step.saturating_mul(2);
                } else {
                    return bisect(lo, hi);
                }
            }
        } else {
            let mut hi = start;
            let mut step = 1u64;
            loop {
                let lo = hi.saturating_sub(step);
                if lo == 0 || pred(lo) {
                    return bisect(lo, hi);
                }
                hi = lo;
                step = step.saturating_mul(2);
            }
        }
    }
}
