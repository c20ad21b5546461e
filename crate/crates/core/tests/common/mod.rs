//! Property checkers shared by the property-test suite and the acceptance run.
#![allow(dead_code)]

use apportion::harness::detect_period;
use apportion::{
    allocate, allocate_divisor, allocate_divisor_by_search, allocate_quota, ApportionError, Method, PartyWeights,
    Real, SignpostSequence, TiePolicy,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Check = Result<(), String>;
pub type Weights = PartyWeights<BigRational>;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Divisor methods with exact arithmetic.
pub fn exact_divisors() -> Vec<Method> {
    vec![
        Method::jefferson(),
        Method::webster(),
        Method::adams(),
        Method::linear(q(1, 3)),
        Method::linear(q(3, 2)),
        Method::linear(q(2, 1)),
        Method::Divisor(SignpostSequence::imperiali()),
        Method::Divisor(SignpostSequence::danish()),
        Method::Divisor(SignpostSequence::huntington()),
        Method::Divisor(SignpostSequence::dean()),
        Method::Divisor(SignpostSequence::adjusted_sainte_lague()),
        Method::Divisor(SignpostSequence::macau()),
    ]
}

pub fn linear_betas() -> Vec<BigRational> {
    vec![q(0, 1), q(1, 4), q(1, 3), q(1, 2), q(2, 3), q(1, 1), q(3, 2), q(2, 1)]
}

pub fn quota_gammas() -> Vec<BigRational> {
    vec![q(-1, 1), q(-1, 2), q(0, 1), q(1, 2), q(1, 1), q(2, 1)]
}

pub fn weights(votes: &[u64]) -> Weights {
    PartyWeights::from_counts(votes).expect("positive votes")
}

/// Sorted tie orbit, or the error kind as a string.
fn orbit(method: &Method, w: &Weights, house: u64) -> Result<Vec<Vec<u64>>, String> {
    let a = allocate(method, w, house, TiePolicy::AverageOverTies).map_err(|e| format!("{e:?}"))?;
    let (mut v, truncated) = a.tie_vectors(usize::MAX);
    assert!(!truncated);
    v.sort();
    Ok(v)
}

fn shifted(vs: &[Vec<u64>], by: &[u64]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vs.iter().map(|v| v.iter().zip(by).map(|(a, b)| a + b).collect()).collect();
    out.sort();
    out
}

fn feasible(method: &Method, m: usize, house: u64) -> bool {
    house >= method.minimum_house(m)
}

/// Sequential highest averages and the divisor search give the same orbit.
pub fn div_a_equals_div_b(method: &Method, votes: &[u64], house: u64) -> Check {
    let Method::Divisor(seq) = method else { return Ok(()) };
    let w = weights(votes);
    let seq_result = allocate_divisor(&w, seq, house, TiePolicy::EnumerateAll);
    let search_result = allocate_divisor_by_search(&w, seq, house);
    match (seq_result, search_result) {
        (Ok(a), Ok(b)) => {
            let (mut x, _) = a.tie_vectors(usize::MAX);
            let (mut y, _) = b.tie_vectors(usize::MAX);
            x.sort();
            y.sort();
            if x == y {
                Ok(())
            } else {
                Err(format!("{method} {votes:?} N={house}: sequential {x:?} vs search {y:?}"))
            }
        }
        (Err(_), Err(_)) => Ok(()),
        (a, b) => Err(format!("{method} {votes:?} N={house}: {:?} vs {:?}", a.is_ok(), b.is_ok())),
    }
}

/// beta at N equals one seat each plus beta + 1 at N - m, once every party
/// holds a seat.
pub fn shift_relation(beta: &BigRational, votes: &[u64], house: u64) -> Check {
    let m = votes.len();
    let w = weights(votes);
    let base = Method::linear(beta.clone());
    if !feasible(&base, m, house) {
        return Ok(());
    }
    let here = orbit(&base, &w, house)?;
    if here.iter().any(|v| v.contains(&0)) {
        return Ok(());
    }
    let up = Method::linear(beta + <BigRational as One>::one());
    let there = orbit(&up, &w, house - m as u64)?;
    if shifted(&there, &vec![1; m]) == here {
        Ok(())
    } else {
        Err(format!("beta={beta} {votes:?} N={house}: {here:?} vs {there:?}+1"))
    }
}

/// `s(N + L) = s(N) + L p` above the guard.
pub fn periodicity(method: &Method, votes: &[u64], offset: u64) -> Check {
    let w = weights(votes);
    let period = detect_period(&w).map_err(|e| e.to_string())?;
    let house = method.small_n_guard(w.len(), Real::to_f64(&w.min_share())) + offset;
    let add: Vec<u64> = w
        .shares()
        .iter()
        .map(|p| (p * int(period)).to_integer().to_u64().expect("integral"))
        .collect();
    let a = orbit(method, &w, house)?;
    let b = orbit(method, &w, house + period)?;
    if shifted(&a, &add) == b {
        Ok(())
    } else {
        Err(format!("{method} {votes:?} N={house} L={period}: {a:?} vs {b:?}"))
    }
}

/// For two parties, linear beta and quota gamma = 2 beta - 1 coincide.
pub fn two_party_coincidence(beta: &BigRational, votes: &[u64], house: u64) -> Check {
    assert_eq!(votes.len(), 2);
    let w = weights(votes);
    let gamma = beta * int(2) - <BigRational as One>::one();
    let d = Method::linear(beta.clone());
    let quota = Method::Quota(gamma.clone());
    if !feasible(&d, 2, house) || !feasible(&quota, 2, house) {
        return Ok(());
    }
    let Method::Divisor(seq) = &d else { unreachable!() };
    let x = allocate_divisor(&w, seq, house, TiePolicy::EnumerateAll).map_err(|e| e.to_string())?;
    let y = allocate_quota(&w, &gamma, house, TiePolicy::EnumerateAll).map_err(|e| e.to_string())?;
    let (mut xs, _) = x.tie_vectors(usize::MAX);
    let (mut ys, _) = y.tie_vectors(usize::MAX);
    xs.sort();
    ys.sort();
    if xs == ys {
        Ok(())
    } else {
        Err(format!("beta={beta} {votes:?} N={house}: {xs:?} vs {ys:?}"))
    }
}

/// Scaling every vote by the same positive rational changes nothing.
pub fn homogeneity(method: &Method, votes: &[u64], house: u64, factor: &BigRational) -> Check {
    let w = weights(votes);
    let scaled = w.scaled(factor.clone()).map_err(|e| e.to_string())?;
    let a = orbit(method, &w, house);
    let b = orbit(method, &scaled, house);
    let same = match (&a, &b) {
        (Ok(x), Ok(y)) => x == y,
        (Err(x), Err(y)) => x == y,
        _ => false,
    };
    if same {
        Ok(())
    } else {
        Err(format!("{method} {votes:?} N={house} x{factor}: {a:?} vs {b:?}"))
    }
}

/// Exact deterministic excess bounds for linear divisor and quota methods.
fn exact_bounds(method: &Method, p: &[BigRational]) -> Vec<(BigRational, BigRational)> {
    let m = int(p.len() as u64);
    let one = <BigRational as One>::one();
    match method {
        Method::Divisor(SignpostSequence::Linear { beta }) => p
            .iter()
            .map(|pi| {
                let shift = (beta - &one) * (&m * pi - &one);
                (pi - &one + &shift, &shift + (&m - &one) * pi)
            })
            .collect(),
        Method::Quota(gamma) => p
            .iter()
            .map(|pi| {
                let centre = gamma * (pi - &one / &m);
                let half = (&m - &one) / &m;
                (&centre - &half, &centre + &half)
            })
            .collect(),
        _ => panic!("no bounds for {method}"),
    }
}

/// Every orbit member lies within the deterministic bounds above the guard.
pub fn deterministic_bounds(method: &Method, votes: &[u64], house: u64) -> Check {
    let w = weights(votes);
    let guard = method.small_n_guard(w.len(), Real::to_f64(&w.min_share()));
    if house < guard {
        return Ok(());
    }
    let bounds = exact_bounds(method, w.shares());
    let n = int(house);
    for v in orbit(method, &w, house)? {
        for ((&s, p), (lo, hi)) in v.iter().zip(w.shares()).zip(&bounds) {
            let delta = int(s) - &n * p;
            if &delta < lo || &delta > hi {
                return Err(format!("{method} {votes:?} N={house}: {v:?} outside [{lo}, {hi}]"));
            }
        }
    }
    Ok(())
}

/// Seats sum to the house and the excess sums to zero exactly.
pub fn excess_sums_to_zero(method: &Method, votes: &[u64], house: u64) -> Check {
    let w = weights(votes);
    let a = match allocate(method, &w, house, TiePolicy::AverageOverTies) {
        Ok(a) => a,
        Err(ApportionError::InfeasibleHouse { .. } | ApportionError::NonPositiveQuota { .. }) => return Ok(()),
        Err(e) => return Err(e.to_string()),
    };
    let n = int(house);
    for v in a.tie_vectors(usize::MAX).0 {
        let sum: BigRational = v.iter().zip(w.shares()).map(|(&s, p)| int(s) - &n * p).sum();
        if !sum.is_zero() || v.iter().sum::<u64>() != house {
            return Err(format!("{method} {votes:?} N={house}: {v:?} sums to {sum}"));
        }
    }
    let expected: BigRational = a.expected_seats().iter().zip(w.shares()).map(|(s, p)| s - &n * p).sum();
    if expected.is_zero() {
        Ok(())
    } else {
        Err(format!("{method} {votes:?} N={house}: expected excess sums to {expected}"))
    }
}

/// Some orbit member at `N + 1` dominates some orbit member at `N`.
pub fn house_monotone(method: &Method, votes: &[u64], house: u64) -> Check {
    let w = weights(votes);
    if !feasible(method, votes.len(), house) {
        return Ok(());
    }
    let a = orbit(method, &w, house)?;
    let b = orbit(method, &w, house + 1)?;
    let ok = a.iter().any(|x| b.iter().any(|y| y.iter().zip(x).all(|(s, t)| s >= t)));
    if ok {
        Ok(())
    } else {
        Err(format!("{method} {votes:?} N={house}: {a:?} -> {b:?}"))
    }
}

/// Small vote vectors used for paradox searches.
pub const CORPUS: &[&[u64]] = &[
    &[5, 3, 2],
    &[7, 5, 1],
    &[14, 11, 4],
    &[61, 29, 10],
    &[6, 6, 2],
    &[30, 25, 22, 13, 10],
    &[39, 28, 18, 15],
    &[1000, 620, 380],
    &[8, 7, 3, 2],
    &[12, 9, 7, 4, 3],
];

/// First `(votes, N, party)` with `s_party(N + 1) < s_party(N)` under Hamilton.
pub fn alabama_witness(max_house: u64) -> Option<(Vec<u64>, u64, usize)> {
    let method = Method::hamilton();
    for votes in CORPUS {
        let w = weights(votes);
        for house in 1..max_house {
            let a = allocate(&method, &w, house, TiePolicy::AverageOverTies).ok()?;
            let b = allocate(&method, &w, house + 1, TiePolicy::AverageOverTies).ok()?;
            if a.is_tie() || b.is_tie() {
                continue;
            }
            if let Some(i) = (0..votes.len()).find(|&i| b.seats[i] < a.seats[i]) {
                return Some((votes.to_vec(), house, i));
            }
        }
    }
    None
}

