//! Equidistribution diagnostics for fractional parts `frac((N + c) p)`.

use crate::error::{ApportionError, Result};

/// Shortest range accepted by the diagnostics.
pub const MIN_RANGE: u64 = 10_000;

/// Kolmogorov-Smirnov distance of a sample from the continuous CDF `cdf`.
pub fn ks_statistic_against(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov-Smirnov distance of a sample from `U(0, 1)`.
pub fn ks_statistic(sample: Vec<f64>) -> f64 {
    ks_statistic_against(sample, |x| x.clamp(0.0, 1.0))
}

fn check_range(from: u64, to: u64) -> Result<()> {
    if to < from || to - from + 1 < MIN_RANGE {
        return Err(ApportionError::InvalidArgument(format!(
            "diagnostic range needs at least {MIN_RANGE} house sizes"
        )));
    }
    Ok(())
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// Per party, the KS distance between `frac((N + offset) p_i)` over
/// `N = from..=to` and `U(0, 1)`.
pub fn equidistribution_ks(p: &[f64], offset: f64, from: u64, to: u64) -> Result<Vec<f64>> {
    check_range(from, to)?;
    Ok(p.iter()
        .map(|&pi| ks_statistic((from..=to).map(|n| frac((n as f64 + offset) * pi)).collect()))
        .collect())
}

/// Pearson statistic of the joint fractional parts of two parties on a
/// `bins x bins` grid, with its degrees of freedom.
pub fn joint_uniformity_chi2(p_i: f64, p_j: f64, offset: f64, from: u64, to: u64, bins: usize) -> Result<(f64, usize)> {
    check_range(from, to)?;
    if bins < 2 {
        return Err(ApportionError::InvalidArgument("need at least two bins".into()));
    }
    let mut counts = vec![0u64; bins * bins];
    let cell = |x: f64| ((x * bins as f64) as usize).min(bins - 1);
    for n in from..=to {
        let x = n as f64 + offset;
        counts[cell(frac(x * p_i)) * bins + cell(frac(x * p_j))] += 1;
    }
    let expected = (to - from + 1) as f64 / (bins * bins) as f64;
    let chi2 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    Ok((chi2, bins * bins - 1))
}
