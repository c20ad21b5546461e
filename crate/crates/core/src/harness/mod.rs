//! Empirical verification: house-size sweeps, Monte Carlo over random
//! shares, exact period averages and equidistribution diagnostics.

pub mod apparentement;
pub mod compare;
pub mod diagnostics;
pub mod montecarlo;
pub mod period;
pub mod stats;
pub mod sweep;

pub use apparentement::{apparentement_sweep, ApparentementStats};
pub use compare::{compare, CheckedQuantity, ComparisonEntry, ComparisonReport, Tolerances};
pub use diagnostics::{equidistribution_ks, joint_uniformity_chi2, ks_statistic, ks_statistic_against};
pub use montecarlo::{
    mc_ordered_simplex, mc_simplex_shares, quota_violation_frequency, sorted_simplex_draw, SimplexStats,
    ViolationFrequency, ViolationSource,
};
pub use period::{detect_period, period_average_bias};
pub use stats::{Histogram, Observation, SweepStats, DEFAULT_BIN_WIDTH};
pub use sweep::{effective_start, excess_series, for_each_allocation, sweep, sweep_bounds, sweep_with, SweepOptions, SWEEP_CHUNK};

use crate::error::Result;

/// Deterministic per-item seed derived from a master seed.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps `f` over `items`, in parallel with the `parallel` feature, keeping order.
pub(crate) fn in_chunks<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Shares proportional to `sqrt 2, sqrt 3, sqrt 5, 1, sqrt 7, sqrt 11, ...`,
/// rationally independent in exact arithmetic.
pub fn sqrt_shares(m: usize) -> Vec<f64> {
    let mut raw = Vec::with_capacity(m);
    let mut primes = (2u64..).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0));
    for k in 0..m {
        if k == 3 {
            raw.push(1.0);
        } else {
            raw.push((primes.next().expect("infinite") as f64).sqrt());
        }
    }
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}
