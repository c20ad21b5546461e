//! Mergeable running statistics of seat-excess vectors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const DEFAULT_BIN_WIDTH: f64 = 0.01;

/// Fixed-width histogram of one coordinate; bin `k` covers `[k w, (k+1) w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// Values outside are counted in the nearest edge bin.
    pub clip: Option<(f64, f64)>,
    pub counts: BTreeMap<i64, u64>,
}

impl Histogram {
    pub fn new(bin_width: f64, clip: Option<(f64, f64)>) -> Self {
        Histogram {
            bin_width,
            clip,
            counts: BTreeMap::new(),
        }
    }

    pub fn bin_of(&self, x: f64) -> i64 {
        let x = match self.clip {
            Some((lo, hi)) => x.clamp(lo, hi),
            None => x,
        };
        (x / self.bin_width).floor() as i64
    }

    pub fn add(&mut self, x: f64) {
        *self.counts.entry(self.bin_of(x)).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `(bin lower edge, count)` pairs in increasing order.
    pub fn bins(&self) -> Vec<(f64, u64)> {
        self.counts.iter().map(|(&k, &c)| (k as f64 * self.bin_width, c)).collect()
    }
}

/// One recorded house size (or trial).
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    /// Excess used for moments (orbit average at ties).
    pub delta: &'a [f64],
    /// Excess of the primary seat vector, used for quota and bound checks.
    pub primary: &'a [f64],
    pub house: u64,
    pub tie: bool,
    pub near_tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub m: usize,
    pub count: u64,
    pub mean: Vec<f64>,
    /// Co-moment sums `sum (x_i - mean_i)(x_j - mean_j)`.
    pub comoment: Vec<Vec<f64>>,
    pub histograms: Vec<Histogram>,
    pub lower_violations: Vec<u64>,
    pub upper_violations: Vec<u64>,
    /// Observations where some party violates quota.
    pub any_violation: u64,
    pub ties: u64,
    pub near_ties: u64,
    /// Exact (not near-tie) observations outside the deterministic bounds.
    pub bound_violations: u64,
    pub bounds: Option<Vec<(f64, f64)>>,
    /// Smallest and largest house size recorded.
    pub range: Option<(u64, u64)>,
}

impl SweepStats {
    pub fn new(m: usize, bin_width: f64, bounds: Option<Vec<(f64, f64)>>) -> Self {
        let histograms = (0..m)
            .map(|i| Histogram::new(bin_width, bounds.as_ref().map(|b| b[i])))
            .collect();
        SweepStats {
            m,
            count: 0,
            mean: vec![0.0; m],
            comoment: vec![vec![0.0; m]; m],
            histograms,
            lower_violations: vec![0; m],
            upper_violations: vec![0; m],
            any_violation: 0,
            ties: 0,
            near_ties: 0,
            bound_violations: 0,
            bounds,
            range: None,
        }
    }

    pub fn observe(&mut self, obs: Observation<'_>) {
        let x = obs.delta;
        self.count += 1;
        let n = self.count as f64;
        let d: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        for (mu, di) in self.mean.iter_mut().zip(&d) {
            *mu += di / n;
        }
        for i in 0..self.m {
            let after = x[i] - self.mean[i];
            for j in 0..self.m {
                self.comoment[j][i] += d[j] * after;
            }
        }
        for (h, &xi) in self.histograms.iter_mut().zip(x) {
            h.add(xi);
        }
        let mut violated = false;
        for (i, &p) in obs.primary.iter().enumerate() {
            if p <= -1.0 {
                self.lower_violations[i] += 1;
                violated = true;
            }
            if p >= 1.0 {
                self.upper_violations[i] += 1;
                violated = true;
            }
        }
        self.any_violation += u64::from(violated);
        self.ties += u64::from(obs.tie);
        self.near_ties += u64::from(obs.near_tie);
        if let Some(bounds) = &self.bounds {
            if !obs.near_tie {
                let outside = obs
                    .primary
                    .iter()
                    .zip(bounds)
                    .any(|(&p, &(lo, hi))| p < lo - 1e-9 || p > hi + 1e-9);
                self.bound_violations += u64::from(outside);
            }
        }
        self.range = Some(match self.range {
            None => (obs.house, obs.house),
            Some((lo, hi)) => (lo.min(obs.house), hi.max(obs.house)),
        });
    }

    /// Combines statistics of disjoint samples.
    pub fn merge(&mut self, other: &SweepStats) {
        assert_eq!(self.m, other.m, "merging statistics of different sizes");
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for i in 0..self.m {
            self.mean[i] += delta[i] * nb / n;
            for j in 0..self.m {
                self.comoment[i][j] += other.comoment[i][j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        self.count += other.count;
        for (h, o) in self.histograms.iter_mut().zip(&other.histograms) {
            h.merge(o);
        }
        for i in 0..self.m {
            self.lower_violations[i] += other.lower_violations[i];
            self.upper_violations[i] += other.upper_violations[i];
        }
        self.any_violation += other.any_violation;
        self.ties += other.ties;
        self.near_ties += other.near_ties;
        self.bound_violations += other.bound_violations;
        self.range = match (self.range, other.range) {
            (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
            (r, None) | (None, r) => r,
        };
    }

    /// Population variance (divides by the count).
    pub fn variance(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.covariance(i, i)).collect()
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.comoment[i][j] / self.count as f64
    }

    pub fn covariance_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| (0..self.m).map(|j| self.covariance(i, j)).collect()).collect()
    }

    /// Standard error of the mean of coordinate `i`.
    pub fn standard_error(&self, i: usize) -> f64 {
        (self.covariance(i, i) / self.count as f64).sqrt()
    }

    pub fn violation_frequency(&self, i: usize) -> f64 {
        (self.lower_violations[i] + self.upper_violations[i]) as f64 / self.count as f64
    }

    pub fn any_violation_frequency(&self) -> f64 {
        self.any_violation as f64 / self.count as f64
    }
}
