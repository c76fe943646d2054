//! Error type shared by all solver modules.

use alloc::string::String;

/// Errors reported by library operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SdgError {
    /// An argument violates the operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A documented precondition of a bound or construction does not hold.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    /// The operation does not support this scoring vector or mode.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The operation is meaningless for this input (e.g. a bound whose premise fails).
    #[error("not applicable: {0}")]
    NotApplicable(String),
    /// A configured size or search budget was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

/// Shorthand for results carrying an [`SdgError`].
pub type Result<T> = core::result::Result<T, SdgError>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::SdgError::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
