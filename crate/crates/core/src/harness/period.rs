use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{ApportionError, Result};
use crate::method::Method;
use crate::numeric::{lcm_of_denominators, Real};
use crate::weights::PartyWeights;

use super::sweep::excess_series;

/// Least common denominator of the shares: the seat vector at `N + L`
/// exceeds the one at `N` by exactly `L p`.
pub fn detect_period(w: &PartyWeights<BigRational>) -> Result<u64> {
    lcm_of_denominators(w.shares())
        .to_u64()
        .ok_or_else(|| ApportionError::InvalidArgument("period does not fit in 64 bits".into()))
}

/// Exact average of the expected excess over one period starting at the
/// small-house guard.
pub fn period_average_bias(method: &Method, w: &PartyWeights<BigRational>) -> Result<Vec<BigRational>> {
    method.validate()?;
    let period = detect_period(w)?;
    let start = method.small_n_guard(w.len(), Real::to_f64(&w.min_share()));
    let series = excess_series(method, w, start, start + period - 1)?;
    let mut total = vec![<BigRational as Zero>::zero(); w.len()];
    for delta in &series {
        for (t, d) in total.iter_mut().zip(delta) {
            *t += d;
        }
    }
    let l = BigRational::from_integer(BigInt::from(period));
    Ok(total.into_iter().map(|t| t / l.clone()).collect())
}
