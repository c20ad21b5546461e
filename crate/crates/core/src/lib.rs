//! Seat apportionment by divisor and quota methods, with exact tie
//! detection, asymptotic seat-excess formulas, simulation harnesses and
//! brute-force optimality oracles.

pub mod allocation;
pub mod analysis;
pub mod asymptotics;
pub mod divisor;
pub mod error;
pub mod excess;
pub mod harness;
pub mod method;
pub mod numeric;
pub mod quota;
pub mod rounding;
pub mod signpost;
pub mod weights;

pub use allocation::{Allocation, Support, TieOrbit, TiePolicy, DEFAULT_TIE_LIMIT};
pub use divisor::{allocate_divisor, allocate_divisor_by_search, DivisorState};
pub use error::{ApportionError, Result};
pub use excess::{expected_excess, quota_satisfaction, seat_excess, QuotaFlags, SeatExcess};
pub use method::{Family, Method, METHOD_NAMES};
pub use numeric::Real;
pub use quota::allocate_quota;
pub use rounding::{alpha_round, d_round, Rounded};
pub use signpost::{Exactness, SignpostSequence};
pub use weights::PartyWeights;

/// Allocates `house` seats with any method.
pub fn allocate<R: Real>(method: &Method, w: &PartyWeights<R>, house: u64, policy: TiePolicy) -> Result<Allocation<R>> {
    match method {
        Method::Divisor(seq) => allocate_divisor(w, seq, house, policy),
        Method::Quota(gamma) => allocate_quota(w, gamma, house, policy),
    }
}
