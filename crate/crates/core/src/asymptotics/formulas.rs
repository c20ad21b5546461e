//! Closed-form limits of the seat excess as the house size grows.

use serde::Serialize;

use crate::analysis::Functional;
use crate::error::{ApportionError, Result};
use crate::method::{Family, Method};

use super::simplex::harmonic_sums;

/// Limit mean, variance and covariance of the seat excess.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentPrediction {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

/// A value resting on a conjecture rather than a theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conjectured<T> {
    pub value: T,
    pub conjecture: bool,
}

pub(crate) fn check_shares(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(ApportionError::EmptyWeights);
    }
    if let Some(index) = p.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(ApportionError::NonPositiveVote { index });
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(ApportionError::InvalidArgument(format!("shares sum to {total}, not 1")));
    }
    Ok(())
}

fn share_check(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(ApportionError::InvalidArgument(format!("share {p} outside (0, 1)")))
    }
}

pub fn predict_bias(method: &Method, p: &[f64]) -> Result<Vec<f64>> {
    check_shares(p)?;
    let m = p.len() as f64;
    Ok(match method.family()? {
        Family::Divisor { beta } => p.iter().map(|&pi| (beta - 0.5) * (m * pi - 1.0)).collect(),
        Family::Quota { gamma } => p.iter().map(|&pi| gamma * (pi - 1.0 / m)).collect(),
    })
}

pub fn predict_variance(method: &Method, p: &[f64]) -> Result<Vec<f64>> {
    check_shares(p)?;
    let m = p.len() as f64;
    Ok(match method.family()? {
        Family::Divisor { .. } => p.iter().map(|&pi| (1.0 + (m - 2.0) * pi * pi) / 12.0).collect(),
        Family::Quota { .. } => vec![(m + 2.0) * (m - 1.0) / (12.0 * m * m); p.len()],
    })
}

pub fn predict_covariance(method: &Method, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let variance = predict_variance(method, p)?;
    let m = p.len() as f64;
    let family = method.family()?;
    Ok((0..p.len())
        .map(|i| {
            (0..p.len())
                .map(|j| {
                    if i == j {
                        variance[i]
                    } else {
                        match family {
                            Family::Divisor { .. } => ((m - 2.0) * p[i] * p[j] - p[i] - p[j]) / 12.0,
                            Family::Quota { .. } => -(m + 2.0) / (12.0 * m * m),
                        }
                    }
                })
                .collect()
        })
        .collect())
}

pub fn predict_moments(method: &Method, p: &[f64]) -> Result<MomentPrediction> {
    Ok(MomentPrediction {
        mean: predict_bias(method, p)?,
        variance: predict_variance(method, p)?,
        covariance: predict_covariance(method, p)?,
    })
}

/// Deterministic range of each `Delta_i`.
pub fn excess_bounds(method: &Method, p: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_shares(p)?;
    let m = p.len() as f64;
    Ok(match method.family()? {
        Family::Divisor { beta } => p
            .iter()
            .map(|&pi| {
                let shift = (beta - 1.0) * (m * pi - 1.0);
                (pi - 1.0 + shift, shift + (m - 1.0) * pi)
            })
            .collect(),
        Family::Quota { gamma } => p
            .iter()
            .map(|&pi| {
                let centre = gamma * (pi - 1.0 / m);
                let half = (m - 1.0) / m;
                (centre - half, centre + half)
            })
            .collect(),
    })
}

/// Limit mean of `Delta` for the `j`-th largest party when the shares are
/// uniform on the simplex.
pub fn predict_ordered_bias(method: &Method, m: usize, j: usize) -> Result<f64> {
    let (h1, _) = harmonic_sums(m, j)?;
    Ok(match method.family()? {
        Family::Divisor { beta } => (beta - 0.5) * (h1 - 1.0),
        Family::Quota { gamma } => gamma / m as f64 * (h1 - 1.0),
    })
}

pub fn predict_ordered_variance(method: &Method, m: usize, j: usize) -> Result<f64> {
    let (h1, h2) = harmonic_sums(m, j)?;
    let mf = m as f64;
    let second = (h2 + h1 * h1) / (mf * (mf + 1.0));
    let var_p = h2 / (mf * (mf + 1.0)) - h1 * h1 / (mf * mf * (mf + 1.0));
    Ok(match method.family()? {
        Family::Divisor { beta } => (1.0 + (mf - 2.0) * second) / 12.0 + (beta - 0.5).powi(2) * mf * mf * var_p,
        Family::Quota { gamma } => (mf + 2.0) * (mf - 1.0) / (12.0 * mf * mf) + gamma * gamma * var_p,
    })
}

fn merge_check(p_i: f64, p_j: f64, m: usize) -> Result<()> {
    share_check(p_i)?;
    share_check(p_j)?;
    if p_i + p_j >= 1.0 || m < 3 {
        return Err(ApportionError::InvalidArgument("merging needs p_i + p_j < 1 and m >= 3".into()));
    }
    Ok(())
}

/// Mean seat gain of two parties pooling their votes.
pub fn apparentement_joint_gain(method: &Method, p_i: f64, p_j: f64, m: usize) -> Result<f64> {
    merge_check(p_i, p_j, m)?;
    let mf = m as f64;
    Ok(match method.family()? {
        Family::Divisor { beta } => (beta - 0.5) * (1.0 - p_i - p_j),
        Family::Quota { gamma } => gamma * (mf - 2.0) / (mf * (mf - 1.0)),
    })
}

/// Mean gain of party `i` itself after the coalition's seats are split again.
pub fn apparentement_party_gain(method: &Method, p_i: f64, p_j: f64, m: usize) -> Result<Conjectured<f64>> {
    merge_check(p_i, p_j, m)?;
    let mf = m as f64;
    let fraction = p_i / (p_i + p_j);
    let value = match method.family()? {
        Family::Divisor { beta } => fraction * (beta - 0.5) * (1.0 - p_i - p_j),
        Family::Quota { gamma } => gamma * ((mf - 2.0) / (mf - 1.0) * fraction - (mf - 2.0) / (2.0 * mf)),
    };
    Ok(Conjectured { value, conjecture: true })
}

/// Limit mean of a divergence functional.
pub fn predict_divergence_mean(method: &Method, p: &[f64], functional: Functional) -> Result<f64> {
    check_shares(p)?;
    let mf = p.len() as f64;
    let family = method.family()?;
    let inv: f64 = p.iter().map(|x| 1.0 / x).sum();
    let unsupported = || {
        Err(ApportionError::UnsupportedMethod(format!(
            "no limit mean of {functional:?} for {method}"
        )))
    };
    match (functional, family) {
        (Functional::SainteLague, Family::Divisor { beta }) => {
            Ok((inv + mf - 2.0) / 12.0 + (beta - 0.5).powi(2) * (inv - mf * mf))
        }
        (Functional::SainteLague, Family::Quota { gamma }) => {
            Ok((mf + 2.0) * (mf - 1.0) / (12.0 * mf * mf) * inv + gamma * gamma / (mf * mf) * (inv - mf * mf))
        }
        (Functional::SumSquares, Family::Divisor { beta }) => {
            let var: f64 = p.iter().map(|x| (1.0 + (mf - 2.0) * x * x) / 12.0).sum();
            let bias: f64 = p.iter().map(|x| (mf * x - 1.0).powi(2)).sum();
            Ok(var + (beta - 0.5).powi(2) * bias)
        }
        (Functional::SumSquares, Family::Quota { gamma }) => {
            let spread: f64 = p.iter().map(|x| (x - 1.0 / mf).powi(2)).sum();
            Ok((mf + 2.0) * (mf - 1.0) / (12.0 * mf) + gamma * gamma * spread)
        }
        (Functional::Jefferson, Family::Divisor { beta: 1.0 }) => Ok((mf - 1.0) / 2.0),
        (Functional::Adams, Family::Divisor { beta: 0.0 }) => Ok((mf - 1.0) / 2.0),
        _ => unsupported(),
    }
}
