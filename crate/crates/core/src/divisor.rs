//! Divisor (highest-averages) methods.

use std::cmp::Ordering;

use crate::allocation::{Allocation, Support, TieOrbit, TiePolicy};
use crate::error::{ApportionError, Result};
use crate::numeric::Real;
use crate::signpost::{Evaluator, Figure, SignpostSequence};
use crate::weights::PartyWeights;

fn check_house<R: Real>(ev: &Evaluator<R>, m: usize, house: u64) -> Result<()> {
    let minimum = ev.zeros.saturating_mul(m as u64);
    if house < minimum {
        return Err(ApportionError::InfeasibleHouse { house, minimum });
    }
    if let Some(cap) = ev.cap {
        let capacity = cap.saturating_mul(m as u64);
        if house > capacity {
            return Err(ApportionError::CapExceeded { house, capacity });
        }
    }
    Ok(())
}

fn domain_votes<R: Real>(ev: &Evaluator<R>, w: &PartyWeights<R>) -> Vec<R> {
    w.votes()
        .iter()
        .map(|v| if ev.squared { v.clone() * v.clone() } else { v.clone() })
        .collect()
}

fn cmp_fig<R: Real>(a: &Figure<R>, b: &Figure<R>) -> Ordering {
    if R::EXACT {
        a.cmp_exact(b)
    } else {
        a.cmp_tol(b)
    }
}

/// Support interval `[max v/d(s+1), min v/d(s)]` and, when its ends meet,
/// the tie orbit.
fn orbit_and_support<R: Real>(ev: &Evaluator<R>, votes: &[R], seats: &[u64]) -> (Option<TieOrbit>, Support<R>) {
    let next: Vec<Figure<R>> = votes.iter().zip(seats).map(|(v, &s)| ev.figure(v, s + 1)).collect();
    let cur: Vec<Figure<R>> = votes
        .iter()
        .zip(seats)
        .map(|(v, &s)| if s == 0 { Figure::Infinite } else { ev.figure(v, s) })
        .collect();
    let lower = next
        .iter()
        .filter(|f| f.finite().is_some())
        .max_by(|a, b| a.cmp_exact(b))
        .and_then(|f| f.finite().cloned());
    let upper = cur
        .iter()
        .filter(|f| f.finite().is_some())
        .min_by(|a, b| a.cmp_exact(b))
        .and_then(|f| f.finite().cloned());
    let support = Support::Divisor {
        lower: lower.clone(),
        upper: upper.clone(),
        squared: ev.squared,
    };
    let (Some(lo), Some(hi)) = (lower, upper) else {
        return (None, support);
    };
    let lo = Figure::Finite(lo);
    let hi = Figure::Finite(hi);
    if cmp_fig(&lo, &hi) != Ordering::Equal {
        return (None, support);
    }
    let mut base = seats.to_vec();
    let mut tied = Vec::new();
    let mut extra = 0;
    for i in 0..seats.len() {
        if cmp_fig(&cur[i], &hi) == Ordering::Equal {
            base[i] -= 1;
            extra += 1;
            tied.push(i);
        } else if cmp_fig(&next[i], &lo) == Ordering::Equal {
            tied.push(i);
        }
    }
    let orbit = TieOrbit {
        base,
        tied,
        extra,
        near: !R::EXACT,
    };
    (Some(orbit), support)
}

/// Seats with comparative figure above a provisional divisor, used as a
/// starting point for the sequential fill.
fn jump_start<R: Real>(seq: &SignpostSequence, ev: &Evaluator<R>, w: &PartyWeights<R>, votes: &[R], house: u64) -> Vec<u64> {
    let m = votes.len();
    let floor_seats = vec![ev.zeros; m];
    let Ok(ev_f) = seq.evaluator::<f64>() else {
        return floor_seats;
    };
    let target = house.saturating_sub(2 * m as u64);
    if target <= ev.zeros * m as u64 {
        return floor_seats;
    }
    let vf: Vec<f64> = w.votes().iter().map(Real::to_f64).collect();
    let total = |d: f64| -> u128 { vf.iter().map(|v| ev_f.count_below(&(v / d), false) as u128).sum() };
    let target = target as u128;
    let mut hi = 1.0f64;
    let mut steps = 0;
    while total(hi) > target && steps < 1000 {
        hi *= 2.0;
        steps += 1;
    }
    let mut lo = hi;
    steps = 0;
    while total(lo) <= target && steps < 1000 {
        lo /= 2.0;
        steps += 1;
    }
    if total(lo) <= target {
        hi = lo;
    } else {
        for _ in 0..100 {
            let mid = (lo * hi).sqrt();
            if !(mid > lo && mid < hi) {
                break;
            }
            if total(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    if !hi.is_finite() || hi <= 0.0 {
        return floor_seats;
    }
    let d = R::from_f64(hi);
    let d = if ev.squared { d.clone() * d } else { d };
    let seats: Vec<u64> = votes.iter().map(|v| ev.count_below(&(v.clone() / d.clone()), false)).collect();
    if seats.iter().map(|&s| s as u128).sum::<u128>() > house as u128 {
        floor_seats
    } else {
        seats
    }
}

/// Sequential state of a divisor method: seats are awarded one at a time to
/// the highest comparative figure, lowest index first among equals.
#[derive(Debug, Clone)]
pub struct DivisorState<R> {
    ev: Evaluator<R>,
    votes: Vec<R>,
    seats: Vec<u64>,
    next: Vec<Figure<R>>,
    house: u64,
}

impl<R: Real> DivisorState<R> {
    /// The canonical allocation at `house`.
    pub fn new(w: &PartyWeights<R>, seq: &SignpostSequence, house: u64) -> Result<Self> {
        let ev = seq.evaluator::<R>()?;
        let m = w.len();
        check_house(&ev, m, house)?;
        let votes = domain_votes(&ev, w);
        let seats = jump_start(seq, &ev, w, &votes, house);
        let next = votes.iter().zip(&seats).map(|(v, &s)| ev.figure(v, s + 1)).collect();
        let placed = seats.iter().sum();
        let mut state = DivisorState {
            ev,
            votes,
            seats,
            next,
            house: placed,
        };
        while state.house < house {
            state.advance()?;
        }
        if let (Some(orbit), _) = state.orbit() {
            state.seats = orbit.canonical();
            state.next = state
                .votes
                .iter()
                .zip(&state.seats)
                .map(|(v, &s)| state.ev.figure(v, s + 1))
                .collect();
        }
        Ok(state)
    }

    pub fn house(&self) -> u64 {
        self.house
    }

    pub fn seats(&self) -> &[u64] {
        &self.seats
    }

    /// Awards the next seat.
    pub fn advance(&mut self) -> Result<()> {
        let mut best = 0;
        for i in 1..self.next.len() {
            if self.next[i].cmp_exact(&self.next[best]) == Ordering::Greater {
                best = i;
            }
        }
        if self.next[best] == Figure::Capped {
            let capacity = self.ev.cap.unwrap_or(0).saturating_mul(self.seats.len() as u64);
            return Err(ApportionError::CapExceeded {
                house: self.house + 1,
                capacity,
            });
        }
        self.seats[best] += 1;
        self.next[best] = self.ev.figure(&self.votes[best], self.seats[best] + 1);
        self.house += 1;
        Ok(())
    }

    /// Tie orbit and support interval at the current house size.
    pub fn orbit(&self) -> (Option<TieOrbit>, Support<R>) {
        orbit_and_support(&self.ev, &self.votes, &self.seats)
    }

    pub fn allocation(&self, policy: TiePolicy) -> Allocation<R> {
        let (tie, support) = self.orbit();
        Allocation::resolve(self.house, self.seats.clone(), tie, support, policy)
    }
}

/// Sequential highest-averages allocation.
pub fn allocate_divisor<R: Real>(w: &PartyWeights<R>, seq: &SignpostSequence, house: u64, policy: TiePolicy) -> Result<Allocation<R>> {
    Ok(DivisorState::new(w, seq, house)?.allocation(policy))
}

enum Probe {
    TooSmall,
    TooLarge,
    Feasible,
}

/// Allocation through an explicit divisor: searches for `D` with
/// `sum_i round_d(v_i / D) = N`.
pub fn allocate_divisor_by_search<R: Real>(w: &PartyWeights<R>, seq: &SignpostSequence, house: u64) -> Result<Allocation<R>> {
    let ev = seq.evaluator::<R>()?;
    check_house(&ev, w.len(), house)?;
    let votes = domain_votes(&ev, w);
    let tolerant = !R::EXACT;
    let counts = |d: &R| -> (Vec<u64>, Vec<u64>) {
        votes
            .iter()
            .map(|v| {
                let x = v.clone() / d.clone();
                (ev.count_below(&x, tolerant), ev.count_at_most(&x, tolerant))
            })
            .unzip()
    };
    let probe = |low: &[u64], high: &[u64]| {
        let n = house as u128;
        if low.iter().map(|&s| s as u128).sum::<u128>() > n {
            Probe::TooSmall
        } else if high.iter().map(|&s| s as u128).sum::<u128>() < n {
            Probe::TooLarge
        } else {
            Probe::Feasible
        }
    };
    let two = R::from_u64(2);
    let mut lo: Option<R> = None;
    let mut hi: Option<R> = None;
    let mut d = R::one();
    let mut found = None;
    for _ in 0..10_000 {
        let (low, high) = counts(&d);
        match probe(&low, &high) {
            Probe::Feasible => {
                found = Some((d.clone(), low, high));
                break;
            }
            Probe::TooSmall => lo = Some(d.clone()),
            Probe::TooLarge => {
                // Next divisor below `d` at which some party gains a seat.
                let snap = votes
                    .iter()
                    .zip(&high)
                    .map(|(v, &h)| ev.figure(v, h + 1))
                    .max_by(|a, b| a.cmp_exact(b))
                    .and_then(|f| f.finite().cloned());
                match snap {
                    Some(c) => {
                        let (low_c, high_c) = counts(&c);
                        if let Probe::Feasible = probe(&low_c, &high_c) {
                            found = Some((c, low_c, high_c));
                            break;
                        }
                        hi = Some(c);
                    }
                    None => hi = Some(d.clone()),
                }
            }
        }
        d = match (&lo, &hi) {
            (Some(l), Some(h)) => (l.clone() + h.clone()) / two.clone(),
            (Some(l), None) => l.clone() * two.clone(),
            (None, Some(h)) => h.clone() / two.clone(),
            (None, None) => unreachable!("probe set one bracket end"),
        };
    }
    let (_, low, high) = found.ok_or(ApportionError::SearchDiverged)?;
    let placed: u64 = low.iter().sum();
    let boundary: Vec<usize> = (0..low.len()).filter(|&i| high[i] > low[i]).collect();
    let extra = (house - placed) as usize;
    let tie = (extra > 0 && extra < boundary.len()).then(|| TieOrbit {
        base: low.clone(),
        tied: boundary.clone(),
        extra,
        near: !R::EXACT,
    });
    let mut seats = low;
    for &i in &boundary[..extra] {
        seats[i] += 1;
    }
    let (_, support) = orbit_and_support(&ev, &votes, &seats);
    Ok(Allocation::resolve(house, seats, tie, support, TiePolicy::EnumerateAll))
}

/// Checks the min-max condition `max v_i/d(s_i+1) <= min v_i/d(s_i)`.
pub fn satisfies_min_max<R: Real>(w: &PartyWeights<R>, seq: &SignpostSequence, seats: &[u64]) -> Result<bool> {
    let ev = seq.evaluator::<R>()?;
    let votes = domain_votes(&ev, w);
    let (_, support) = orbit_and_support(&ev, &votes, seats);
    let Support::Divisor { lower, upper, .. } = support else {
        unreachable!("divisor support")
    };
    let mandatory_ok = seats.iter().all(|&s| s >= ev.zeros) && ev.cap.is_none_or(|c| seats.iter().all(|&s| s <= c));
    Ok(mandatory_ok
        && match (lower, upper) {
            (Some(l), Some(u)) => l.cmp_exact(&u) != Ordering::Greater,
            _ => true,
        })
}
