use serde::{Deserialize, Serialize};

use crate::asymptotics::{predict_moments, violation_probability};
use crate::error::{ApportionError, Result};
use crate::method::Method;

use super::stats::SweepStats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub mean: f64,
    pub variance: f64,
    pub covariance: f64,
    /// Also compare quota-violation frequencies when set.
    pub violation: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mean: 0.01,
            variance: 0.01,
            covariance: 0.01,
            violation: None,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            mean: tol,
            variance: tol,
            covariance: tol,
            violation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckedQuantity {
    Mean,
    Variance,
    Covariance,
    ViolationFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub quantity: CheckedQuantity,
    pub parties: Vec<usize>,
    pub empirical: f64,
    pub predicted: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ComparisonEntry {
    fn new(quantity: CheckedQuantity, parties: Vec<usize>, empirical: f64, predicted: f64, tolerance: f64) -> Self {
        let abs_error = (empirical - predicted).abs();
        ComparisonEntry {
            quantity,
            parties,
            empirical,
            predicted,
            abs_error,
            tolerance,
            pass: abs_error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub method: String,
    pub samples: u64,
    pub range: Option<(u64, u64)>,
    pub entries: Vec<ComparisonEntry>,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn failures(&self) -> impl Iterator<Item = &ComparisonEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn max_error(&self, quantity: CheckedQuantity) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.quantity == quantity)
            .map(|e| e.abs_error)
            .fold(0.0, f64::max)
    }
}

/// Pairs the empirical moments of `stats` with the limit predictions for
/// `method` at shares `p`.
pub fn compare(stats: &SweepStats, method: &Method, p: &[f64], tol: &Tolerances) -> Result<ComparisonReport> {
    if stats.m != p.len() {
        return Err(ApportionError::DimensionMismatch {
            expected: stats.m,
            found: p.len(),
        });
    }
    let predicted = predict_moments(method, p)?;
    let variance = stats.variance();
    let mut entries = Vec::new();
    for i in 0..p.len() {
        entries.push(ComparisonEntry::new(CheckedQuantity::Mean, vec![i], stats.mean[i], predicted.mean[i], tol.mean));
    }
    for i in 0..p.len() {
        entries.push(ComparisonEntry::new(
            CheckedQuantity::Variance,
            vec![i],
            variance[i],
            predicted.variance[i],
            tol.variance,
        ));
    }
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            entries.push(ComparisonEntry::new(
                CheckedQuantity::Covariance,
                vec![i, j],
                stats.covariance(i, j),
                predicted.covariance[i][j],
                tol.covariance,
            ));
        }
    }
    if let Some(vt) = tol.violation {
        for (i, &pi) in p.iter().enumerate() {
            let (lo, hi) = violation_probability(method, pi, p.len())?;
            entries.push(ComparisonEntry::new(
                CheckedQuantity::ViolationFrequency,
                vec![i],
                stats.violation_frequency(i),
                lo + hi,
                vt,
            ));
        }
    }
    Ok(ComparisonReport {
        method: method.to_string(),
        samples: stats.count,
        range: stats.range,
        pass: entries.iter().all(|e| e.pass),
        entries,
    })
}
