//! Seat excess `s_i - N p_i` and quota satisfaction.

use serde::{Deserialize, Serialize};

use crate::allocation::Allocation;
use crate::error::{ApportionError, Result};
use crate::numeric::Real;
use crate::weights::PartyWeights;

#[derive(Debug, Clone, PartialEq)]
pub struct SeatExcess<R> {
    pub delta: Vec<R>,
}

impl<R: Real> SeatExcess<R> {
    pub fn sum(&self) -> R {
        self.delta.iter().cloned().fold(R::zero(), |a, b| a + b)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.delta.iter().map(Real::to_f64).collect()
    }
}

fn check_dims<R: Real>(a: &Allocation<R>, w: &PartyWeights<R>) -> Result<()> {
    if a.seats.len() != w.len() {
        return Err(ApportionError::DimensionMismatch {
            expected: w.len(),
            found: a.seats.len(),
        });
    }
    Ok(())
}

fn excess_of<R: Real>(seats: Vec<R>, house: u64, w: &PartyWeights<R>) -> SeatExcess<R> {
    let n = R::from_u64(house);
    SeatExcess {
        delta: seats
            .into_iter()
            .zip(w.shares())
            .map(|(s, p)| s - n.clone() * p.clone())
            .collect(),
    }
}

/// `Delta_i = s_i - N p_i` for the primary seat vector.
pub fn seat_excess<R: Real>(a: &Allocation<R>, w: &PartyWeights<R>) -> Result<SeatExcess<R>> {
    check_dims(a, w)?;
    Ok(excess_of(a.seats.iter().map(|&s| R::from_u64(s)).collect(), a.house, w))
}

/// Seat excess averaged over the tie orbit.
pub fn expected_excess<R: Real>(a: &Allocation<R>, w: &PartyWeights<R>) -> Result<SeatExcess<R>> {
    check_dims(a, w)?;
    Ok(excess_of(a.expected_seats_r(), a.house, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotaFlags {
    /// `s_i >= floor(N p_i)`.
    pub lower: bool,
    /// `s_i <= ceil(N p_i)`.
    pub upper: bool,
}

pub fn quota_satisfaction<R: Real>(a: &Allocation<R>, w: &PartyWeights<R>) -> Result<Vec<QuotaFlags>> {
    let delta = seat_excess(a, w)?;
    let one = R::one();
    Ok(delta
        .delta
        .iter()
        .map(|d| QuotaFlags {
            lower: *d > -one.clone(),
            upper: *d < one,
        })
        .collect())
}
