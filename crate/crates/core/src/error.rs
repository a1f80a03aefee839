use thiserror::Error;

/// Errors raised while drawing or evaluating exact samples.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A finite entropy tape ran out. Exhaustive enumeration counts these
    /// executions as unresolved mass rather than failures.
    #[error("entropy tape exhausted")]
    Exhausted,

    /// A comparison hit its precision or bit cap without separating its
    /// arguments.
    #[error("comparison undecided after reaching precision cap {cap}")]
    Undecided { cap: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Fewer than two chi-square bins survived tail merging.
    #[error("degenerate binning: only {bins} bin(s) have enough expected mass")]
    DegenerateBinning { bins: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
