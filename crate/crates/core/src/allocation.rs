//! Allocation results, tie orbits and tie policies.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::numeric::Real;

/// Default cap on the number of enumerated alternative seat vectors.
pub const DEFAULT_TIE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    /// Lots drawn from a seeded generator.
    SeededRandom(u64),
    /// Primary vector is the canonical one; every alternative is listed.
    EnumerateAll,
    /// Primary vector is the canonical one; statistics use the orbit average.
    AverageOverTies,
}

/// All seat vectors compatible with a tie: every party in `tied` gets
/// `base` seats and `extra` of them get one more.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieOrbit {
    pub base: Vec<u64>,
    pub tied: Vec<usize>,
    pub extra: usize,
    /// Detected within floating-point tolerance rather than exactly.
    pub near: bool,
}

impl TieOrbit {
    /// Number of seat vectors in the orbit.
    pub fn size(&self) -> u128 {
        let n = self.tied.len() as u128;
        let k = self.extra.min(self.tied.len() - self.extra) as u128;
        (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
    }

    /// The vector that gives the extra seats to the lowest-index tied parties.
    pub fn canonical(&self) -> Vec<u64> {
        let mut seats = self.base.clone();
        for &i in &self.tied[..self.extra] {
            seats[i] += 1;
        }
        seats
    }

    /// Mean seat vector over the orbit.
    pub fn expected_seats(&self) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = self
            .base
            .iter()
            .map(|&b| BigRational::from_integer(BigInt::from(b)))
            .collect();
        let share = BigRational::new(BigInt::from(self.extra), BigInt::from(self.tied.len()));
        for &i in &self.tied {
            out[i] += share.clone();
        }
        out
    }

    pub fn expected_seats_f64(&self) -> Vec<f64> {
        let share = self.extra as f64 / self.tied.len() as f64;
        let mut out: Vec<f64> = self.base.iter().map(|&b| b as f64).collect();
        for &i in &self.tied {
            out[i] += share;
        }
        out
    }

    pub fn contains(&self, seats: &[u64]) -> bool {
        if seats.len() != self.base.len() {
            return false;
        }
        let mut plus = 0;
        for (i, (&s, &b)) in seats.iter().zip(&self.base).enumerate() {
            if s == b + 1 && self.tied.binary_search(&i).is_ok() {
                plus += 1;
            } else if s != b {
                return false;
            }
        }
        plus == self.extra
    }

    /// Orbit members in lexicographic order of the chosen tied positions,
    /// at most `limit` of them. The flag reports truncation.
    pub fn vectors(&self, limit: usize) -> (Vec<Vec<u64>>, bool) {
        let k = self.extra;
        let n = self.tied.len();
        let mut out = Vec::new();
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            if out.len() == limit {
                return (out, true);
            }
            let mut seats = self.base.clone();
            for &p in &pick {
                seats[self.tied[p]] += 1;
            }
            out.push(seats);
            let Some(pos) = (0..k).rev().find(|&i| pick[i] < n - k + i) else {
                return (out, false);
            };
            pick[pos] += 1;
            for i in pos + 1..k {
                pick[i] = pick[i - 1] + 1;
            }
        }
    }

    /// A uniformly random orbit member.
    pub fn draw(&self, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seats = self.base.clone();
        for p in rand::seq::index::sample(&mut rng, self.tied.len(), self.extra) {
            seats[self.tied[p]] += 1;
        }
        seats
    }
}

/// Where the allocation is stable.
#[derive(Debug, Clone, PartialEq)]
pub enum Support<R> {
    /// Divisors `D` in `[lower, upper]` reproduce the allocation. `None` stands
    /// for `0` below and `+inf` above. With `squared`, both ends are squares
    /// of the actual divisors.
    Divisor {
        lower: Option<R>,
        upper: Option<R>,
        squared: bool,
    },
    /// Rounding offsets `alpha` in `[lower, upper]` reproduce the allocation.
    Quota { lower: R, upper: R },
}

impl<R: Real> Support<R> {
    /// The interval ends as plain floats (square roots taken where needed).
    pub fn to_f64(&self) -> (f64, f64) {
        match self {
            Support::Divisor { lower, upper, squared } => {
                let fix = |v: f64| if *squared { v.sqrt() } else { v };
                (
                    lower.as_ref().map_or(0.0, |v| fix(v.to_f64())),
                    upper.as_ref().map_or(f64::INFINITY, |v| fix(v.to_f64())),
                )
            }
            Support::Quota { lower, upper } => (lower.to_f64(), upper.to_f64()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<R> {
    pub seats: Vec<u64>,
    pub house: u64,
    pub tie: Option<TieOrbit>,
    /// Orbit members, filled under [`TiePolicy::EnumerateAll`].
    pub alternatives: Vec<Vec<u64>>,
    pub truncated: bool,
    pub support: Support<R>,
}

impl<R: Real> Allocation<R> {
    pub(crate) fn resolve(house: u64, seats: Vec<u64>, tie: Option<TieOrbit>, support: Support<R>, policy: TiePolicy) -> Self {
        let mut alloc = Allocation {
            seats,
            house,
            tie,
            alternatives: Vec::new(),
            truncated: false,
            support,
        };
        if let Some(orbit) = &alloc.tie {
            match policy {
                TiePolicy::SeededRandom(seed) => alloc.seats = orbit.draw(seed),
                TiePolicy::AverageOverTies => alloc.seats = orbit.canonical(),
                TiePolicy::EnumerateAll => {
                    alloc.seats = orbit.canonical();
                    let (vectors, truncated) = orbit.vectors(DEFAULT_TIE_LIMIT);
                    alloc.alternatives = vectors;
                    alloc.truncated = truncated;
                }
            }
        }
        alloc
    }

    pub fn is_tie(&self) -> bool {
        self.tie.is_some()
    }

    pub fn near_tie(&self) -> bool {
        self.tie.as_ref().is_some_and(|t| t.near)
    }

    /// All seat vectors of the tie orbit (just the primary vector when unique).
    pub fn tie_vectors(&self, limit: usize) -> (Vec<Vec<u64>>, bool) {
        match &self.tie {
            Some(orbit) => orbit.vectors(limit),
            None => (vec![self.seats.clone()], false),
        }
    }

    /// Seats averaged uniformly over the tie orbit.
    pub fn expected_seats(&self) -> Vec<BigRational> {
        match &self.tie {
            Some(orbit) => orbit.expected_seats(),
            None => self
                .seats
                .iter()
                .map(|&s| BigRational::from_integer(BigInt::from(s)))
                .collect(),
        }
    }

    pub fn expected_seats_f64(&self) -> Vec<f64> {
        match &self.tie {
            Some(orbit) => orbit.expected_seats_f64(),
            None => self.seats.iter().map(|&s| s as f64).collect(),
        }
    }

    /// Expected seats in backend `R` (exact when `R` is exact).
    pub fn expected_seats_r(&self) -> Vec<R> {
        if R::EXACT {
            self.expected_seats().iter().map(R::from_ratio).collect()
        } else {
            self.expected_seats_f64().into_iter().map(R::from_f64).collect()
        }
    }
}
