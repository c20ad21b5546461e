//! Seat gains from merging two parties into a joint list.

use serde::Serialize;

use crate::allocation::TiePolicy;
use crate::error::{ApportionError, Result};
use crate::method::Method;
use crate::numeric::Real;
use crate::weights::PartyWeights;

use super::in_chunks;
use super::stats::{Observation, SweepStats, DEFAULT_BIN_WIDTH};
use super::sweep::{effective_start, for_each_allocation, SWEEP_CHUNK};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApparentementStats {
    pub parties: (usize, usize),
    /// `s_{i+j} - s_i - s_j` (expected seats).
    pub joint: SweepStats,
    /// Gain of each of the two parties after the bloc's seats are split
    /// between them by the same method.
    pub per_party: SweepStats,
    /// House sizes where the bloc won too few seats for the split.
    pub skipped_splits: u64,
}

fn expected_run<R: Real>(method: &Method, w: &PartyWeights<R>, lo: u64, hi: u64) -> Result<Vec<(Vec<f64>, Vec<u64>)>> {
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for_each_allocation(method, w, lo, hi, TiePolicy::AverageOverTies, &mut |a| {
        out.push((a.expected_seats_f64(), a.seats))
    })?;
    Ok(out)
}

/// Sweeps the original and the merged apportionment side by side.
pub fn apparentement_sweep<R: Real + Send + Sync>(
    method: &Method,
    w: &PartyWeights<R>,
    pair: (usize, usize),
    from: u64,
    to: u64,
) -> Result<ApparentementStats> {
    method.validate()?;
    let (i, j) = pair;
    if w.len() < 3 {
        return Err(ApportionError::InvalidArgument("apparentement needs at least three parties".into()));
    }
    let (merged, map) = w.merged(i, j)?;
    let bloc = map[i];
    let sub = w.subset(&[i, j])?;
    let sub_minimum = method.minimum_house(2);
    let start = effective_start(method, w, from).max(effective_start(method, &merged, from));
    if start > to {
        return Err(ApportionError::InvalidArgument(format!("empty sweep: effective start {start} exceeds {to}")));
    }
    let chunks: Vec<(u64, u64)> = (0..)
        .map(|k| start + k * SWEEP_CHUNK)
        .take_while(|&lo| lo <= to)
        .map(|lo| (lo, (lo + SWEEP_CHUNK - 1).min(to)))
        .collect();
    let parts = in_chunks(&chunks, |&(lo, hi)| {
        let original = expected_run(method, w, lo, hi)?;
        let joint_run = expected_run(method, &merged, lo, hi)?;
        let mut joint = SweepStats::new(1, DEFAULT_BIN_WIDTH, None);
        let mut per_party = SweepStats::new(2, DEFAULT_BIN_WIDTH, None);
        let mut skipped = 0u64;
        for (k, ((orig, _), (mrg, mrg_seats))) in original.iter().zip(&joint_run).enumerate() {
            let house = lo + k as u64;
            let gain = [mrg[bloc] - orig[i] - orig[j]];
            joint.observe(Observation { delta: &gain, primary: &[0.0], house, tie: false, near_tie: false });
            let bloc_seats = mrg_seats[bloc];
            if bloc_seats < sub_minimum.max(1) {
                skipped += 1;
                continue;
            }
            let split = crate::allocate(method, &sub, bloc_seats, TiePolicy::AverageOverTies)?.expected_seats_f64();
            let gains = [split[0] - orig[i], split[1] - orig[j]];
            per_party.observe(Observation { delta: &gains, primary: &[0.0, 0.0], house, tie: false, near_tie: false });
        }
        Ok((joint, per_party, skipped))
    })?;
    let mut joint = SweepStats::new(1, DEFAULT_BIN_WIDTH, None);
    let mut per_party = SweepStats::new(2, DEFAULT_BIN_WIDTH, None);
    let mut skipped_splits = 0;
    for (a, b, s) in &parts {
        joint.merge(a);
        per_party.merge(b);
        skipped_splits += s;
    }
    Ok(ApparentementStats {
        parties: pair,
        joint,
        per_party,
        skipped_splits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn webster_merge_is_roughly_neutral() {
        let w = PartyWeights::from_shares(&crate::harness::sqrt_shares(4)).unwrap();
        let s = apparentement_sweep(&Method::webster(), &w, (2, 3), 1, 20_000).unwrap();
        assert!(s.joint.mean[0].abs() < 0.02);
        assert_eq!(s.joint.count, 20_000);
    }

    #[test]
    fn needs_three_parties() {
        let w = PartyWeights::from_shares(&[0.6, 0.4]).unwrap();
        assert!(apparentement_sweep(&Method::webster(), &w, (0, 1), 1, 10).is_err());
    }
}
