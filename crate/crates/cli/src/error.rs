use apportion::ApportionError;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(ApportionError),
    Io(std::io::Error),
    /// A comparison or oracle check did not hold; the report is still written.
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(ApportionError::InstanceTooLarge { .. }) => 4,
            CliError::Verification(_) => 3,
            _ => 2,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Input(_) => "invalid_input",
            CliError::Io(_) => "io",
            CliError::Verification(_) => "verification_failed",
            CliError::Core(e) => match e {
                ApportionError::EmptyWeights => "empty_weights",
                ApportionError::NonPositiveVote { .. } => "non_positive_vote",
                ApportionError::DimensionMismatch { .. } => "dimension_mismatch",
                ApportionError::InfeasibleHouse { .. } => "infeasible_house",
                ApportionError::CapExceeded { .. } | ApportionError::BeyondCap { .. } => "cap_exceeded",
                ApportionError::NonPositiveQuota { .. } => "non_positive_quota",
                ApportionError::InvalidSignposts(_) => "invalid_signposts",
                ApportionError::UnsupportedMethod(_) => "unsupported_method",
                ApportionError::NonRational => "non_rational",
                ApportionError::InstanceTooLarge { .. } => "instance_too_large",
                ApportionError::InvalidArgument(_) => "invalid_argument",
                ApportionError::SearchDiverged => "search_diverged",
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Verification(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<ApportionError> for CliError {
    fn from(e: ApportionError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
