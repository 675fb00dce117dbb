use alloc::string::String;

use crate::Nat;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("factorization effort exceeded on {0}")]
    EffortExceeded(Nat),
    #[error("invalid sequence at index {index}: {reason}")]
    InvalidSequence { index: u64, reason: String },
    #[error("index {index} out of range (available: 1..={available})")]
    IndexOutOfRange { index: u64, available: u64 },
    #[error("precondition not met: {0}")]
    PreconditionSkip(String),
    #[error("term {index} exceeds the size budget of {max_digits} decimal digits")]
    TermTooLarge { index: u64, max_digits: u64 },
}
