//! Samplers for the limit distributions of the seat excess and divergences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ApportionError, Result};
use crate::method::Family;

use super::formulas::check_shares;

/// One draw of a limit variable together with the randomness behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSample {
    pub values: Vec<f64>,
    /// `U_i ~ U(0, 1)` (joint draws) or `U~_k ~ U(-1/2, 1/2)` (marginal draws).
    pub uniforms: Vec<f64>,
    /// Category `J` with `P(J = j) = p_j`, for joint divisor draws.
    pub category: Option<usize>,
}

fn draw_category<G: Rng + ?Sized>(p: &[f64], rng: &mut G) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, &pj) in p.iter().enumerate() {
        acc += pj;
        if u < acc {
            return j;
        }
    }
    p.len() - 1
}

/// The `V_i = U_i 1{J != i}` of the joint construction.
fn draw_v<G: Rng + ?Sized>(p: &[f64], rng: &mut G) -> (Vec<f64>, Vec<f64>, usize) {
    let u: Vec<f64> = (0..p.len()).map(|_| rng.random()).collect();
    let j = draw_category(p, rng);
    let v = u.iter().enumerate().map(|(i, &x)| if i == j { 0.0 } else { x }).collect();
    (u, v, j)
}

/// Joint limit `(X_1, ..., X_m)` of the seat excess of a linear divisor method.
pub fn sample_excess_joint_divisor_with<G: Rng + ?Sized>(p: &[f64], beta: f64, rng: &mut G) -> LimitSample {
    let m = p.len() as f64;
    let (u, v, j) = draw_v(p, rng);
    let total: f64 = v.iter().sum();
    let values = p
        .iter()
        .zip(&v)
        .map(|(&pi, &vi)| pi * total - vi + (beta - 1.0) * (m * pi - 1.0))
        .collect();
    LimitSample {
        values,
        uniforms: u,
        category: Some(j),
    }
}

pub fn sample_excess_joint_divisor(p: &[f64], beta: f64, seed: u64) -> Result<LimitSample> {
    check_shares(p)?;
    Ok(sample_excess_joint_divisor_with(p, beta, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Marginal limit of `Delta_i` for a party of share `p_i` among `m`.
pub fn sample_excess_marginal_with<G: Rng + ?Sized>(family: Family, p_i: f64, m: usize, rng: &mut G) -> LimitSample {
    let mf = m as f64;
    let (centre, weight) = match family {
        Family::Divisor { beta } => ((beta - 0.5) * (mf * p_i - 1.0), p_i),
        Family::Quota { gamma } => (gamma * (p_i - 1.0 / mf), 1.0 / mf),
    };
    let uniforms: Vec<f64> = (0..m - 1).map(|_| rng.random::<f64>() - 0.5).collect();
    let value = centre + uniforms[0] + weight * uniforms[1..].iter().sum::<f64>();
    LimitSample {
        values: vec![value],
        uniforms,
        category: None,
    }
}

pub fn sample_excess_marginal(family: Family, p_i: f64, m: usize, seed: u64) -> Result<f64> {
    if !(p_i > 0.0 && p_i < 1.0) || m < 2 {
        return Err(ApportionError::InvalidArgument("marginal sampler needs 0 < p < 1 and m >= 2".into()));
    }
    Ok(sample_excess_marginal_with(family, p_i, m, &mut ChaCha8Rng::seed_from_u64(seed)).values[0])
}

/// Limit of the Jefferson divergence `max_i Delta_i / p_i` for Jefferson's method.
pub fn sample_s_jefferson_with<G: Rng + ?Sized>(p: &[f64], rng: &mut G) -> f64 {
    draw_v(p, rng).1.iter().sum()
}

/// Limit of the Adams divergence `-min_i Delta_i / p_i` for Adams's method.
pub fn sample_s_adams_with<G: Rng + ?Sized>(p: &[f64], rng: &mut G) -> f64 {
    let (_, v, _) = draw_v(p, rng);
    let m = p.len() as f64;
    let min = v
        .iter()
        .zip(p)
        .map(|(&vi, &pi)| (1.0 - vi) / pi)
        .fold(f64::INFINITY, f64::min);
    m - v.iter().sum::<f64>() - min
}

pub fn sample_s_jefferson(p: &[f64], n: usize, seed: u64) -> Result<Vec<f64>> {
    check_shares(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sample_s_jefferson_with(p, &mut rng)).collect())
}

pub fn sample_s_adams(p: &[f64], n: usize, seed: u64) -> Result<Vec<f64>> {
    check_shares(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sample_s_adams_with(p, &mut rng)).collect())
}

/// Mean and standard deviation used to standardise `S'`.
pub fn s_prime_moments(p: &[f64], beta: f64) -> (f64, f64) {
    let m = p.len() as f64;
    let a: f64 = p.iter().map(|x| 1.0 / x).sum();
    let b: f64 = p.iter().map(|x| 1.0 / (x * x)).sum();
    let c: f64 = p.iter().map(|x| (1.0 / x - m).powi(2)).sum();
    let d = (beta - 0.5).powi(2);
    (a / 12.0 + (a - m * m) * d, (b / 180.0 + d * c / 3.0).sqrt())
}

/// Standardised draws of `S' = sum U_i^2 / p_i - (sum U_i)^2`,
/// `U_i ~ U(beta - 1, beta)` independent.
pub fn sample_s_prime_standardized(m: usize, p: &[f64], beta: f64, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    check_shares(p)?;
    if p.len() != m || m < 2 {
        return Err(ApportionError::DimensionMismatch { expected: m, found: p.len() });
    }
    let (mean, sd) = s_prime_moments(p, beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_samples)
        .map(|_| {
            let mut weighted = 0.0;
            let mut plain = 0.0;
            for &pi in p {
                let u = rng.random::<f64>() + beta - 1.0;
                weighted += u * u / pi;
                plain += u;
            }
            (weighted - plain * plain - mean) / sd
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_draws_sum_to_zero_and_respect_bounds() {
        let p = [0.45, 0.3, 0.15, 0.1];
        let m = p.len() as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let s = sample_excess_joint_divisor_with(&p, 0.5, &mut rng);
            assert!(s.values.iter().sum::<f64>().abs() < 1e-12);
            for (&x, &pi) in s.values.iter().zip(&p) {
                let half = 0.5 + (m - 2.0) / 2.0 * pi;
                assert!(x.abs() <= half + 1e-12);
            }
        }
    }

    #[test]
    fn two_party_joint_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = sample_excess_joint_divisor_with(&[0.6, 0.4], 1.0, &mut rng);
        assert!((s.values[0] + s.values[1]).abs() < 1e-15);
    }

    #[test]
    fn reproducible_by_seed() {
        let a = sample_excess_joint_divisor(&[0.5, 0.5], 0.3, 17).unwrap();
        let b = sample_excess_joint_divisor(&[0.5, 0.5], 0.3, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            sample_excess_marginal(Family::Quota { gamma: 1.0 }, 0.2, 5, 4).unwrap(),
            sample_excess_marginal(Family::Quota { gamma: 1.0 }, 0.2, 5, 4).unwrap()
        );
    }

    #[test]
    fn quota_marginals_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let family = Family::Quota { gamma: 2.0 };
        for _ in 0..2000 {
            let x = sample_excess_marginal_with(family, 0.3, 4, &mut rng).values[0];
            let centre = 2.0 * (0.3 - 0.25);
            assert!((x - centre).abs() <= 0.75);
        }
    }
}
