//! Asymptotic seat-excess formulas and limit-distribution samplers.

pub mod convolution;
pub mod formulas;
pub mod samplers;
pub mod simplex;

pub use convolution::PiecewisePolynomial;
pub use formulas::{
    apparentement_joint_gain, apparentement_party_gain, excess_bounds, predict_bias, predict_covariance,
    predict_divergence_mean, predict_moments, predict_ordered_bias, predict_ordered_variance, predict_variance,
    Conjectured, MomentPrediction,
};
pub use samplers::{
    s_prime_moments, sample_excess_joint_divisor, sample_excess_joint_divisor_with, sample_excess_marginal,
    sample_excess_marginal_with, sample_s_adams, sample_s_jefferson, sample_s_prime_standardized, LimitSample,
};
pub use simplex::{ordered_simplex_covariance, ordered_simplex_covariance_matrix, ordered_simplex_moments, OrderedSimplexMoments};

use crate::error::{ApportionError, Result};
use crate::method::{Family, Method};

/// Limit density of `Delta_i` for a party of share `p_i` among `m`.
pub fn marginal_density(family: Family, p_i: f64, m: usize) -> PiecewisePolynomial {
    let mf = m as f64;
    let (centre, weight) = match family {
        Family::Divisor { beta } => ((beta - 0.5) * (mf * p_i - 1.0), p_i),
        Family::Quota { gamma } => (gamma * (p_i - 1.0 / mf), 1.0 / mf),
    };
    PiecewisePolynomial::centred_uniform_sum(centre, weight, m - 2)
}

/// Limit probabilities `(P(Delta_i <= -1), P(Delta_i >= 1))` of violating
/// lower and upper quota.
pub fn violation_probability(method: &Method, p_i: f64, m: usize) -> Result<(f64, f64)> {
    if !(p_i > 0.0 && p_i < 1.0) || m < 2 {
        return Err(ApportionError::InvalidArgument("violation probability needs 0 < p < 1 and m >= 2".into()));
    }
    let density = marginal_density(method.family()?, p_i, m);
    let lower = density.cdf(-1.0);
    let upper = 1.0 - density.cdf(1.0);
    let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    Ok((clean(lower), clean(upper)))
}
