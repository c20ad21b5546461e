//! Generalised rounding rules.

use std::cmp::Ordering;

use crate::error::{ApportionError, Result};
use crate::numeric::Real;
use crate::signpost::{Signpost, SignpostSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounded {
    Unique(i64),
    /// Both values are admissible.
    Tie(i64, i64),
}

impl Rounded {
    pub fn low(&self) -> i64 {
        match *self {
            Rounded::Unique(n) | Rounded::Tie(n, _) => n,
        }
    }

    pub fn high(&self) -> i64 {
        match *self {
            Rounded::Unique(n) | Rounded::Tie(_, n) => n,
        }
    }
}

/// `alpha`-rounding: the integer `n` with `x - alpha <= n <= x - alpha + 1`.
pub fn alpha_round<R: Real>(x: &R, alpha: &R) -> Rounded {
    let y = x.clone() - alpha.clone();
    let nearest = (y.clone() + R::from_f64(0.5)).floor_i64();
    if y.cmp_tol(&R::from_i64(nearest), 1.0) == Ordering::Equal {
        Rounded::Tie(nearest, nearest + 1)
    } else {
        Rounded::Unique(y.floor_i64() + 1)
    }
}

/// Rounding by signposts: the `n` with `d(n) <= x <= d(n + 1)`.
pub fn d_round<R: Real>(x: &R, seq: &SignpostSequence) -> Result<Rounded> {
    if !x.is_positive() {
        return Err(ApportionError::InvalidArgument("signpost rounding needs x > 0".into()));
    }
    let ev = seq.evaluator::<R>()?;
    let xd = if ev.squared { x.clone() * x.clone() } else { x.clone() };
    let tolerant = !R::EXACT;
    let n = ev.count_at_most(&xd, tolerant);
    if let Some(cap) = ev.cap {
        if n == cap && ev.cmp_at(cap, &xd, tolerant) == Ordering::Less {
            return Err(ApportionError::BeyondCap { cap });
        }
    }
    if n > 0 {
        if let Signpost::Finite(_) = ev.value(n) {
            if ev.cmp_at(n, &xd, tolerant) == Ordering::Equal {
                return Ok(Rounded::Tie(n as i64 - 1, n as i64));
            }
        }
    }
    Ok(Rounded::Unique(n as i64))
}
