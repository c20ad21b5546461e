//! Party vote weights and the shares derived from them.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{ApportionError, Result};
use crate::numeric::Real;

/// Vote weights `v_i > 0` with their shares `p_i = v_i / V`.
///
/// With `R = BigRational` the shares sum to one exactly; with `R = f64` they
/// are normalised in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyWeights<R> {
    votes: Vec<R>,
    total: R,
    shares: Vec<R>,
    names: Option<Vec<String>>,
}

impl<R: Real> PartyWeights<R> {
    pub fn new(votes: Vec<R>) -> Result<Self> {
        if votes.is_empty() {
            return Err(ApportionError::EmptyWeights);
        }
        if let Some(index) = votes.iter().position(|v| !v.is_positive()) {
            return Err(ApportionError::NonPositiveVote { index });
        }
        let total = votes.iter().cloned().fold(R::zero(), |a, b| a + b);
        let shares = votes.iter().map(|v| v.clone() / total.clone()).collect();
        Ok(Self {
            votes,
            total,
            shares,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.votes.len() {
            return Err(ApportionError::DimensionMismatch {
                expected: self.votes.len(),
                found: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }

    pub fn votes(&self) -> &[R] {
        &self.votes
    }

    pub fn total(&self) -> &R {
        &self.total
    }

    pub fn shares(&self) -> &[R] {
        &self.shares
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Name of party `i`, falling back to its 1-based index.
    pub fn name(&self, i: usize) -> String {
        self.names
            .as_ref()
            .map(|n| n[i].clone())
            .unwrap_or_else(|| format!("{}", i + 1))
    }

    pub fn min_share(&self) -> R {
        self.shares
            .iter()
            .cloned()
            .reduce(|a, b| if b < a { b } else { a })
            .expect("non-empty")
    }

    /// Multiplies every vote by `factor`. Shares are unchanged.
    pub fn scaled(&self, factor: R) -> Result<Self> {
        let mut scaled = Self::new(self.votes.iter().map(|v| v.clone() * factor.clone()).collect())?;
        scaled.names = self.names.clone();
        Ok(scaled)
    }

    pub fn to_f64(&self) -> PartyWeights<f64> {
        let votes: Vec<f64> = self.votes.iter().map(Real::to_f64).collect();
        let total = self.total.to_f64();
        PartyWeights {
            shares: votes.iter().map(|v| v / total).collect(),
            votes,
            total,
            names: self.names.clone(),
        }
    }

    /// The weights restricted to the parties in `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut sub = Self::new(indices.iter().map(|&i| self.votes[i].clone()).collect())?;
        if let Some(names) = &self.names {
            sub.names = Some(indices.iter().map(|&i| names[i].clone()).collect());
        }
        Ok(sub)
    }

    /// Pools the votes of parties `i` and `j` into one party, placed at the
    /// position of `min(i, j)`. Returns the merged weights and, for every
    /// original party, its index in the merged election.
    pub fn merged(&self, i: usize, j: usize) -> Result<(Self, Vec<usize>)> {
        let m = self.len();
        if i >= m || j >= m || i == j {
            return Err(ApportionError::InvalidArgument(format!(
                "cannot merge parties {i} and {j} of {m}"
            )));
        }
        let (keep, drop) = (i.min(j), i.max(j));
        let mut votes = Vec::with_capacity(m - 1);
        let mut map = vec![0; m];
        for k in 0..m {
            if k == drop {
                continue;
            }
            map[k] = votes.len();
            let v = if k == keep {
                self.votes[keep].clone() + self.votes[drop].clone()
            } else {
                self.votes[k].clone()
            };
            votes.push(v);
        }
        map[drop] = map[keep];
        Ok((Self::new(votes)?, map))
    }
}

impl PartyWeights<BigRational> {
    /// Exact weights from integer vote counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        Self::new(
            counts
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }
}

impl PartyWeights<f64> {
    pub fn from_shares(shares: &[f64]) -> Result<Self> {
        if shares.iter().any(|s| !s.is_finite()) {
            return Err(ApportionError::InvalidArgument("non-finite share".into()));
        }
        Self::new(shares.to_vec())
    }
}
