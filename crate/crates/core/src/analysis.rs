//! Divergence functionals of allocations and brute-force minimisers.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::allocation::{Allocation, TiePolicy};
use crate::error::{ApportionError, Result};
use crate::method::Method;
use crate::numeric::Real;
use crate::weights::PartyWeights;

/// Misfit functionals of a seat vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `sum Delta_i^2 / p_i`
    SainteLague,
    /// `sum Delta_i^2`
    SumSquares,
    /// `max |Delta_i|`
    MaxAbs,
    /// `max Delta_i`
    MaxPos,
    /// `max Delta_i / p_i`
    Jefferson,
    /// `-min Delta_i / p_i`
    Adams,
    /// `sum Delta_i^4`
    Quartic,
    /// `sum Delta_i^2 / s_i`, infinite when a party with positive quota has no seat.
    PerSeat,
}

impl Functional {
    pub const ALL: [Functional; 8] = [
        Functional::SainteLague,
        Functional::SumSquares,
        Functional::MaxAbs,
        Functional::MaxPos,
        Functional::Jefferson,
        Functional::Adams,
        Functional::Quartic,
        Functional::PerSeat,
    ];

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "sainte-lague" | "sl" => Functional::SainteLague,
            "sum-squares" | "squares" => Functional::SumSquares,
            "max-abs" => Functional::MaxAbs,
            "max-pos" => Functional::MaxPos,
            "jefferson" => Functional::Jefferson,
            "adams" => Functional::Adams,
            "quartic" => Functional::Quartic,
            "per-seat" => Functional::PerSeat,
            _ => return Err(ApportionError::InvalidArgument(format!("unknown functional `{name}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceValues<R> {
    pub sainte_lague: R,
    pub sum_squares: R,
    pub max_abs: R,
    pub max_pos: R,
    pub jefferson: R,
    pub adams: R,
    pub quartic: R,
    /// `None` stands for `+inf`.
    pub per_seat: Option<R>,
}

impl<R: Real> DivergenceValues<R> {
    pub fn get(&self, f: Functional) -> Option<&R> {
        Some(match f {
            Functional::SainteLague => &self.sainte_lague,
            Functional::SumSquares => &self.sum_squares,
            Functional::MaxAbs => &self.max_abs,
            Functional::MaxPos => &self.max_pos,
            Functional::Jefferson => &self.jefferson,
            Functional::Adams => &self.adams,
            Functional::Quartic => &self.quartic,
            Functional::PerSeat => return self.per_seat.as_ref(),
        })
    }
}

fn max_of<R: Real>(it: impl Iterator<Item = R>) -> R {
    it.reduce(|a, b| if b.cmp_exact(&a) == Ordering::Greater { b } else { a })
        .expect("non-empty")
}

fn values_of<R: Real>(w: &PartyWeights<R>, seats: &[u64]) -> DivergenceValues<R> {
    let house: u64 = seats.iter().sum();
    let n = R::from_u64(house);
    let delta: Vec<R> = seats
        .iter()
        .zip(w.shares())
        .map(|(&s, p)| R::from_u64(s) - n.clone() * p.clone())
        .collect();
    let zero = R::zero();
    let sum = |it: &mut dyn Iterator<Item = R>| it.fold(zero.clone(), |a, b| a + b);
    let ratio: Vec<R> = delta.iter().zip(w.shares()).map(|(d, p)| d.clone() / p.clone()).collect();
    let per_seat = seats.iter().zip(&delta).try_fold(zero.clone(), |acc, (&s, d)| {
        if s == 0 {
            if *d == zero {
                Some(acc)
            } else {
                None
            }
        } else {
            Some(acc + d.clone() * d.clone() / R::from_u64(s))
        }
    });
    DivergenceValues {
        sainte_lague: sum(&mut delta.iter().zip(w.shares()).map(|(d, p)| d.clone() * d.clone() / p.clone())),
        sum_squares: sum(&mut delta.iter().map(|d| d.clone() * d.clone())),
        max_abs: max_of(delta.iter().map(Real::abs)),
        max_pos: max_of(delta.iter().cloned()),
        jefferson: max_of(ratio.iter().cloned()),
        adams: max_of(ratio.iter().map(|r| -r.clone())),
        quartic: sum(&mut delta.iter().map(|d| {
            let sq = d.clone() * d.clone();
            sq.clone() * sq
        })),
        per_seat,
    }
}

pub fn divergences<R: Real>(w: &PartyWeights<R>, a: &Allocation<R>) -> Result<DivergenceValues<R>> {
    if a.seats.len() != w.len() {
        return Err(ApportionError::DimensionMismatch {
            expected: w.len(),
            found: a.seats.len(),
        });
    }
    Ok(values_of(w, &a.seats))
}

/// Divergences of an arbitrary seat vector.
pub fn divergences_of_seats<R: Real>(w: &PartyWeights<R>, seats: &[u64]) -> Result<DivergenceValues<R>> {
    if seats.len() != w.len() {
        return Err(ApportionError::DimensionMismatch {
            expected: w.len(),
            found: seats.len(),
        });
    }
    Ok(values_of(w, seats))
}

/// Largest number of compositions [`brute_force_min`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

fn composition_count(house: u64, m: usize) -> u128 {
    // C(N + m - 1, m - 1)
    let n = house as u128 + m as u128 - 1;
    let k = m as u128 - 1;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
        if acc > BRUTE_FORCE_LIMIT * 1000 {
            return acc;
        }
    }
    acc
}

fn for_each_composition(house: u64, m: usize, f: &mut impl FnMut(&[u64])) {
    fn rec(prefix: &mut Vec<u64>, left: u64, slots: usize, f: &mut impl FnMut(&[u64])) {
        if slots == 1 {
            prefix.push(left);
            f(prefix);
            prefix.pop();
            return;
        }
        for s in (0..=left).rev() {
            prefix.push(s);
            rec(prefix, left - s, slots - 1, f);
            prefix.pop();
        }
    }
    rec(&mut Vec::with_capacity(m), house, m, f);
}

/// Every seat vector with total `house` that minimises `functional`, in
/// lexicographically decreasing order.
pub fn brute_force_min<R: Real>(functional: Functional, w: &PartyWeights<R>, house: u64) -> Result<Vec<Vec<u64>>> {
    let count = composition_count(house, w.len());
    if count > BRUTE_FORCE_LIMIT {
        return Err(ApportionError::InstanceTooLarge {
            count,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best: Option<R> = None;
    let mut argmin: Vec<Vec<u64>> = Vec::new();
    let mut infinite: Vec<Vec<u64>> = Vec::new();
    for_each_composition(house, w.len(), &mut |seats| {
        let values = values_of(w, seats);
        let Some(v) = values.get(functional) else {
            if best.is_none() {
                infinite.push(seats.to_vec());
            }
            return;
        };
        let ord = match &best {
            None => Ordering::Less,
            Some(b) => {
                if R::EXACT {
                    v.cmp_exact(b)
                } else {
                    v.cmp_tol(b, 1.0)
                }
            }
        };
        match ord {
            Ordering::Less => {
                best = Some(v.clone());
                argmin.clear();
                argmin.push(seats.to_vec());
            }
            Ordering::Equal => argmin.push(seats.to_vec()),
            Ordering::Greater => {}
        }
    });
    Ok(if best.is_some() { argmin } else { infinite })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerCheck {
    pub holds: bool,
    /// Seat vectors the method can produce (its tie orbit).
    pub method_orbit: Vec<Vec<u64>>,
    pub argmin: Vec<Vec<u64>>,
    /// A vector in exactly one of the two sets, when they differ.
    pub witness: Option<Vec<u64>>,
}

/// Whether the method's tie orbit is exactly the argmin set of `functional`.
pub fn verify_minimizer_identity<R: Real>(method: &Method, functional: Functional, w: &PartyWeights<R>, house: u64) -> Result<MinimizerCheck> {
    let mut argmin = brute_force_min(functional, w, house)?;
    let alloc = crate::allocate(method, w, house, TiePolicy::EnumerateAll)?;
    let (mut orbit, truncated) = alloc.tie_vectors(usize::MAX);
    debug_assert!(!truncated);
    orbit.sort();
    argmin.sort();
    let witness = orbit
        .iter()
        .find(|s| argmin.binary_search(s).is_err())
        .or_else(|| argmin.iter().find(|s| orbit.binary_search(s).is_err()))
        .cloned();
    Ok(MinimizerCheck {
        holds: witness.is_none(),
        method_orbit: orbit,
        argmin,
        witness,
    })
}
