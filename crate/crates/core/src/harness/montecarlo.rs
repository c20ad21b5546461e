//! Monte Carlo over shares drawn uniformly from the simplex.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::allocation::TiePolicy;
use crate::error::{ApportionError, Result};
use crate::method::Method;
use crate::weights::PartyWeights;

use super::in_chunks;
use super::stats::{Observation, SweepStats, DEFAULT_BIN_WIDTH};
use super::sweep::{record, sweep_with, SweepOptions};

/// Trials per independently seeded chunk.
pub const TRIAL_CHUNK: u64 = 1024;

/// Uniform point of the simplex, sorted in decreasing order.
pub fn sorted_simplex_draw<G: Rng + ?Sized>(m: usize, rng: &mut G) -> Vec<f64> {
    let mut x: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = x.iter().sum();
    for v in &mut x {
        *v /= total;
    }
    x.sort_by(|a, b| b.total_cmp(a));
    x
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn trial_chunks(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(TRIAL_CHUNK))
        .map(|c| (c, TRIAL_CHUNK.min(trials - c * TRIAL_CHUNK)))
        .collect()
}

fn merge_all(m: usize, parts: &[SweepStats]) -> SweepStats {
    let mut total = SweepStats::new(m, DEFAULT_BIN_WIDTH, None);
    for part in parts {
        total.merge(part);
    }
    total
}

/// Moments of the ordered shares `p_(1) >= ... >= p_(m)` alone.
pub fn mc_simplex_shares(m: usize, trials: u64, seed: u64) -> Result<SweepStats> {
    if m < 2 || trials == 0 {
        return Err(ApportionError::InvalidArgument("need m >= 2 and at least one trial".into()));
    }
    let zeros = vec![0.0; m];
    let parts = in_chunks(&trial_chunks(trials), |&(chunk, n)| {
        let mut rng = chunk_rng(seed, chunk);
        let mut s = SweepStats::new(m, DEFAULT_BIN_WIDTH, None);
        for _ in 0..n {
            let p = sorted_simplex_draw(m, &mut rng);
            s.observe(Observation { delta: &p, primary: &zeros, house: 0, tie: false, near_tie: false });
        }
        Ok(s)
    })?;
    Ok(merge_all(m, &parts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexStats {
    /// Excess of the `j`-th largest party.
    pub delta: SweepStats,
    /// The ordered shares themselves.
    pub shares: SweepStats,
}

/// Allocates `house` seats for `trials` random share vectors, recording the
/// excess of the parties in decreasing order of size.
pub fn mc_ordered_simplex(method: &Method, m: usize, house: u64, trials: u64, seed: u64) -> Result<SimplexStats> {
    method.validate()?;
    if m < 2 || trials == 0 {
        return Err(ApportionError::InvalidArgument("need m >= 2 and at least one trial".into()));
    }
    let minimum = method.minimum_house(m);
    if house < minimum.max(1) {
        return Err(ApportionError::InfeasibleHouse { house, minimum });
    }
    let zeros = vec![0.0; m];
    let parts = in_chunks(&trial_chunks(trials), |&(chunk, n)| {
        let mut rng = chunk_rng(seed, chunk);
        let mut delta = SweepStats::new(m, DEFAULT_BIN_WIDTH, None);
        let mut shares = SweepStats::new(m, DEFAULT_BIN_WIDTH, None);
        for _ in 0..n {
            let p = sorted_simplex_draw(m, &mut rng);
            let w = PartyWeights::new(p.clone())?;
            let a = crate::allocate(method, &w, house, TiePolicy::AverageOverTies)?;
            record(&mut delta, &a, &p, TiePolicy::AverageOverTies);
            shares.observe(Observation { delta: &p, primary: &zeros, house, tie: false, near_tie: false });
        }
        Ok((delta, shares))
    })?;
    let (d, s): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    Ok(SimplexStats {
        delta: merge_all(m, &d),
        shares: merge_all(m, &s),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationSource {
    /// Every house size in `from..=to` (above the guard) for fixed shares.
    Fixed { weights: PartyWeights<f64>, from: u64, to: u64 },
    /// Independent uniform shares at a fixed house size, parties ordered by size.
    RandomSimplex { m: usize, house: u64, trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationFrequency {
    pub samples: u64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Lower plus upper, per party.
    pub per_party: Vec<f64>,
    /// Fraction of samples where some party violates quota.
    pub overall: f64,
    pub range: Option<(u64, u64)>,
}

impl ViolationFrequency {
    fn from_stats(s: &SweepStats) -> Self {
        let n = s.count as f64;
        let lower: Vec<f64> = s.lower_violations.iter().map(|&c| c as f64 / n).collect();
        let upper: Vec<f64> = s.upper_violations.iter().map(|&c| c as f64 / n).collect();
        ViolationFrequency {
            samples: s.count,
            per_party: lower.iter().zip(&upper).map(|(a, b)| a + b).collect(),
            lower,
            upper,
            overall: s.any_violation_frequency(),
            range: s.range,
        }
    }
}

/// Frequency with which parties fall outside `[floor q_i, ceil q_i]`.
pub fn quota_violation_frequency(method: &Method, source: &ViolationSource, seed: u64) -> Result<ViolationFrequency> {
    let stats = match source {
        ViolationSource::Fixed { weights, from, to } => {
            let options = SweepOptions { bin_width: DEFAULT_BIN_WIDTH, check_bounds: false };
            sweep_with(method, weights, *from, *to, TiePolicy::AverageOverTies, options)?
        }
        ViolationSource::RandomSimplex { m, house, trials } => mc_ordered_simplex(method, *m, *house, *trials, seed)?.delta,
    };
    Ok(ViolationFrequency::from_stats(&stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_draws_are_sorted_and_normalised() {
        let mut rng = chunk_rng(1, 0);
        for _ in 0..100 {
            let p = sorted_simplex_draw(5, &mut rng);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn reproducible_and_chunk_independent() {
        let a = mc_ordered_simplex(&Method::webster(), 3, 50, 3000, 11).unwrap();
        let b = mc_ordered_simplex(&Method::webster(), 3, 50, 3000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.delta.count, 3000);
        let s = mc_simplex_shares(3, 3000, 11).unwrap();
        for j in 0..3 {
            assert!((s.mean[j] - a.shares.mean[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn hamilton_never_violates() {
        let f = quota_violation_frequency(
            &Method::hamilton(),
            &ViolationSource::RandomSimplex { m: 4, house: 97, trials: 2000 },
            3,
        )
        .unwrap();
        assert_eq!(f.overall, 0.0);
    }

    #[test]
    fn infeasible_house_rejected() {
        assert!(mc_ordered_simplex(&Method::adams(), 4, 3, 10, 1).is_err());
    }
}
