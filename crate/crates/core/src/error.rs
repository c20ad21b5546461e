use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApportionError {
    #[error("no parties given")]
    EmptyWeights,
    #[error("party {index} has a non-positive vote count")]
    NonPositiveVote { index: usize },
    #[error("dimension mismatch: expected {expected} parties, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("house size {house} is below the {minimum} mandatory seats")]
    InfeasibleHouse { house: u64, minimum: u64 },
    #[error("house size {house} exceeds the {capacity} seats allowed by the signpost cap")]
    CapExceeded { house: u64, capacity: u64 },
    #[error("value lies beyond the last finite signpost (cap {cap})")]
    BeyondCap { cap: u64 },
    #[error("quota is undefined: house size {house} plus offset {offset} is not positive")]
    NonPositiveQuota { house: u64, offset: String },
    #[error("invalid signpost sequence: {0}")]
    InvalidSignposts(String),
    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),
    #[error("weights are not exact rationals")]
    NonRational,
    #[error("instance too large: {count} candidate vectors exceed the limit {limit}")]
    InstanceTooLarge { count: u128, limit: u128 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("divisor search did not converge")]
    SearchDiverged,
}

pub type Result<T, E = ApportionError> = std::result::Result<T, E>;
