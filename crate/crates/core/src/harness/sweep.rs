//! Deterministic sweeps over consecutive house sizes.

use num_rational::BigRational;

use crate::allocation::{Allocation, TiePolicy};
use crate::divisor::DivisorState;
use crate::error::{ApportionError, Result};
use crate::method::Method;
use crate::numeric::Real;
use crate::quota::allocate_quota;
use crate::signpost::SignpostSequence;
use crate::weights::PartyWeights;

use super::stats::{Observation, SweepStats, DEFAULT_BIN_WIDTH};
use super::{in_chunks, mix_seed};

/// House sizes per independently processed chunk.
pub const SWEEP_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub bin_width: f64,
    /// Record whether each primary excess lies within the deterministic bounds.
    pub check_bounds: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            bin_width: DEFAULT_BIN_WIDTH,
            check_bounds: true,
        }
    }
}

/// The deterministic excess bounds, for methods where they are asserted.
pub fn sweep_bounds(method: &Method, shares: &[f64]) -> Option<Vec<(f64, f64)>> {
    let eligible = match method {
        Method::Quota(_) => true,
        Method::Divisor(SignpostSequence::Linear { .. }) => true,
        Method::Divisor(_) => false,
    };
    if eligible {
        crate::asymptotics::excess_bounds(method, shares).ok()
    } else {
        None
    }
}

/// First house size a sweep records: the larger of `from` and the method's
/// small-house guard.
pub fn effective_start<R: Real>(method: &Method, w: &PartyWeights<R>, from: u64) -> u64 {
    from.max(method.small_n_guard(w.len(), w.min_share().to_f64()))
}

pub(crate) fn policy_at(policy: TiePolicy, house: u64) -> TiePolicy {
    match policy {
        TiePolicy::SeededRandom(seed) => TiePolicy::SeededRandom(mix_seed(seed, house)),
        other => other,
    }
}

/// Excess used for moments and the excess of the primary vector.
pub(crate) fn excess_pair<R: Real>(a: &Allocation<R>, shares: &[f64], policy: TiePolicy) -> (Vec<f64>, Vec<f64>) {
    let n = a.house as f64;
    let primary: Vec<f64> = a.seats.iter().zip(shares).map(|(&s, p)| s as f64 - n * p).collect();
    let delta = if a.is_tie() && policy == TiePolicy::AverageOverTies {
        a.expected_seats_f64().iter().zip(shares).map(|(s, p)| s - n * p).collect()
    } else {
        primary.clone()
    };
    (delta, primary)
}

pub(crate) fn record<R: Real>(stats: &mut SweepStats, a: &Allocation<R>, shares: &[f64], policy: TiePolicy) {
    let (delta, primary) = excess_pair(a, shares, policy);
    stats.observe(Observation {
        delta: &delta,
        primary: &primary,
        house: a.house,
        tie: a.is_tie(),
        near_tie: a.near_tie(),
    });
}

/// Allocations for every house size in `from..=to`, fed to `visit` in order.
pub fn for_each_allocation<R: Real>(
    method: &Method,
    w: &PartyWeights<R>,
    from: u64,
    to: u64,
    policy: TiePolicy,
    visit: &mut dyn FnMut(Allocation<R>),
) -> Result<()> {
    match method {
        Method::Divisor(seq) => {
            let mut state = DivisorState::new(w, seq, from)?;
            loop {
                visit(state.allocation(policy_at(policy, state.house())));
                if state.house() >= to {
                    return Ok(());
                }
                state.advance()?;
            }
        }
        Method::Quota(gamma) => {
            for house in from..=to {
                visit(allocate_quota(w, gamma, house, policy_at(policy, house))?);
            }
            Ok(())
        }
    }
}

/// Excess statistics over every house size from `max(from, guard)` to `to`.
pub fn sweep<R: Real + Send + Sync>(method: &Method, w: &PartyWeights<R>, from: u64, to: u64, policy: TiePolicy) -> Result<SweepStats> {
    sweep_with(method, w, from, to, policy, SweepOptions::default())
}

pub fn sweep_with<R: Real + Send + Sync>(
    method: &Method,
    w: &PartyWeights<R>,
    from: u64,
    to: u64,
    policy: TiePolicy,
    options: SweepOptions,
) -> Result<SweepStats> {
    method.validate()?;
    let start = effective_start(method, w, from);
    if start > to {
        return Err(ApportionError::InvalidArgument(format!(
            "empty sweep: effective start {start} exceeds {to}"
        )));
    }
    let shares: Vec<f64> = w.shares().iter().map(Real::to_f64).collect();
    let bounds = if options.check_bounds { sweep_bounds(method, &shares) } else { None };
    let chunks: Vec<(u64, u64)> = (0..)
        .map(|k| start + k * SWEEP_CHUNK)
        .take_while(|&lo| lo <= to)
        .map(|lo| (lo, (lo + SWEEP_CHUNK - 1).min(to)))
        .collect();
    let parts = in_chunks(&chunks, |&(lo, hi)| {
        let mut stats = SweepStats::new(w.len(), options.bin_width, bounds.clone());
        for_each_allocation(method, w, lo, hi, policy, &mut |a| record(&mut stats, &a, &shares, policy))?;
        Ok(stats)
    })?;
    let mut total = SweepStats::new(w.len(), options.bin_width, bounds);
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}

/// Expected excess at every house size in `from..=to`, exactly.
pub fn excess_series(method: &Method, w: &PartyWeights<BigRational>, from: u64, to: u64) -> Result<Vec<Vec<BigRational>>> {
    let mut out = Vec::new();
    for_each_allocation(method, w, from, to, TiePolicy::AverageOverTies, &mut |a| {
        let n = BigRational::from_integer(a.house.into());
        out.push(
            a.expected_seats()
                .into_iter()
                .zip(w.shares())
                .map(|(s, p)| s - n.clone() * p.clone())
                .collect(),
        );
    })?;
    Ok(out)
}
