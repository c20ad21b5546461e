//! Moments of the ordered shares `p^(1) >= ... >= p^(m)` of a point drawn
//! uniformly from the simplex.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{ApportionError, Result};
use crate::numeric::ratio_to_f64;

fn index_check(m: usize, j: usize) -> Result<()> {
    if m == 0 || j == 0 || j > m {
        return Err(ApportionError::InvalidArgument(format!("index {j} outside 1..={m}")));
    }
    Ok(())
}

/// `(sum_{i=j}^m 1/i, sum_{i=j}^m 1/i^2)`.
pub fn harmonic_sums(m: usize, j: usize) -> Result<(f64, f64)> {
    index_check(m, j)?;
    Ok((j..=m).fold((0.0, 0.0), |(a, b), i| {
        let x = 1.0 / i as f64;
        (a + x, b + x * x)
    }))
}

fn exact_sums(m: usize, j: usize) -> (BigRational, BigRational) {
    (j..=m).fold((BigRational::zero(), BigRational::zero()), |(a, b), i| {
        let x = BigRational::new(BigInt::from(1), BigInt::from(i));
        (a + x.clone(), b + x.clone() * x)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedSimplexMoments {
    pub m: usize,
    /// 1 is the largest share.
    pub j: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub mean: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub second_moment: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub variance: BigRational,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(ratio_to_f64(r))
}

pub fn ordered_simplex_moments(m: usize, j: usize) -> Result<OrderedSimplexMoments> {
    index_check(m, j)?;
    let (h1, h2) = exact_sums(m, j);
    let mm = BigRational::from_integer(BigInt::from(m));
    let norm = mm.clone() * (mm.clone() + BigRational::from_integer(1.into()));
    let mean = h1.clone() / mm.clone();
    let second_moment = (h2.clone() + h1.clone() * h1.clone()) / norm.clone();
    let variance = h2 / norm.clone() - h1.clone() * h1 / (norm * mm);
    Ok(OrderedSimplexMoments {
        m,
        j,
        mean,
        second_moment,
        variance,
    })
}

/// `Cov(p^(j), p^(k))`.
pub fn ordered_simplex_covariance(m: usize, j: usize, k: usize) -> Result<BigRational> {
    index_check(m, j)?;
    index_check(m, k)?;
    let (hj, _) = exact_sums(m, j);
    let (hk, _) = exact_sums(m, k);
    let (_, h2) = exact_sums(m, j.max(k));
    let mm = BigRational::from_integer(BigInt::from(m));
    let norm = mm.clone() * (mm.clone() + BigRational::from_integer(1.into()));
    Ok(h2 / norm.clone() - hj * hk / (norm * mm))
}

pub fn ordered_simplex_covariance_matrix(m: usize) -> Result<Vec<Vec<BigRational>>> {
    (1..=m)
        .map(|j| (1..=m).map(|k| ordered_simplex_covariance(m, j, k)).collect())
        .collect()
}
