//! Quota (largest-remainder) methods with quota `V / (N + gamma)`.

use std::cmp::Ordering;

use num_rational::BigRational;

use crate::allocation::{Allocation, Support, TieOrbit, TiePolicy};
use crate::error::{ApportionError, Result};
use crate::numeric::{format_ratio, Real};
use crate::weights::PartyWeights;

fn to_backend<R: Real>(r: &BigRational) -> R {
    R::from_ratio(r)
}

/// Largest-remainder allocation. The remainder `r = N - sum floor(x_i)` is
/// written `r = q m + t` with `0 <= t < m`; each party receives
/// `floor(x_i) + q`, plus one for the `t` largest fractional parts. When this
/// would leave a party below zero (large `gamma`, small house), the result is
/// the sequential one: the `N` largest figures `x_i - k`, `k >= 0`.
pub fn allocate_quota<R: Real>(w: &PartyWeights<R>, gamma: &BigRational, house: u64, policy: TiePolicy) -> Result<Allocation<R>> {
    let g: R = to_backend(gamma);
    let scale = R::from_u64(house) + g;
    if !scale.is_positive() {
        return Err(ApportionError::NonPositiveQuota {
            house,
            offset: format_ratio(gamma),
        });
    }
    let m = w.len();
    let x: Vec<R> = w.shares().iter().map(|p| scale.clone() * p.clone()).collect();
    let base: Vec<i64> = x.iter().map(Real::floor_i64).collect();
    let frac: Vec<R> = x.iter().zip(&base).map(|(v, &b)| v.clone() - R::from_i64(b)).collect();
    let remainder = house as i64 - base.iter().sum::<i64>();
    let q = remainder.div_euclid(m as i64);
    let t = remainder.rem_euclid(m as i64) as usize;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| frac[b].cmp_exact(&frac[a]).then(a.cmp(&b)));
    let mut seats_i: Vec<i64> = base.iter().map(|&b| b + q).collect();
    for &i in &order[..t] {
        seats_i[i] += 1;
    }
    let mut seats: Vec<u64> = seats_i.iter().map(|&s| s.max(0) as u64).collect();
    // Clipping only adds seats; withdraw the last-awarded ones.
    let figure = |i: usize, s: u64| x[i].clone() - R::from_u64(s);
    let mut surplus = seats.iter().sum::<u64>() - house;
    while surplus > 0 {
        let i = (0..m)
            .filter(|&i| seats[i] > 0)
            .min_by(|&a, &b| figure(a, seats[a] - 1).cmp_exact(&figure(b, seats[b] - 1)).then(b.cmp(&a)))
            .expect("seats to withdraw");
        seats[i] -= 1;
        surplus -= 1;
    }

    // alpha must satisfy x_i - s_i <= alpha <= x_i - s_i + 1 for seated parties.
    let lower = (0..m).map(|i| figure(i, seats[i])).reduce(|a, b| if b > a { b } else { a }).expect("non-empty");
    let upper = (0..m)
        .filter(|&i| seats[i] > 0)
        .map(|i| figure(i, seats[i] - 1))
        .reduce(|a, b| if b < a { b } else { a })
        .unwrap_or_else(|| lower.clone() + R::one());
    let same = |a: &R, b: &R| if R::EXACT { a.cmp_exact(b) } else { a.cmp_tol(b, 1.0) } == Ordering::Equal;
    let tie = same(&lower, &upper).then(|| {
        let losing: Vec<usize> = (0..m).filter(|&i| seats[i] > 0 && same(&figure(i, seats[i] - 1), &upper)).collect();
        let gaining: Vec<usize> = (0..m).filter(|&i| same(&figure(i, seats[i]), &lower)).collect();
        let mut orbit_base = seats.clone();
        for &i in &losing {
            orbit_base[i] -= 1;
        }
        let mut tied: Vec<usize> = losing.iter().chain(&gaining).copied().collect();
        tied.sort_unstable();
        TieOrbit {
            base: orbit_base,
            extra: losing.len(),
            tied,
            near: !R::EXACT,
        }
    });
    let support = Support::Quota { lower, upper };
    Ok(Allocation::resolve(house, seats, tie, support, policy))
}
