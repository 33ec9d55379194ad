//! Error taxonomy shared by the library and the CLI.
//!
//! The CLI maps variants onto process exit codes: configuration errors
//! exit 2, numeric/stability errors exit 3, failed invariants exit 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction parameters (grid sizes, filter ranges, CLI flags).
    #[error("configuration error: {0}")]
    Config(String),

    /// Arguments outside an operation's domain (negative order on a
    /// mean-bearing field, out-of-range block index, empty trajectory).
    #[error("domain error: {0}")]
    Domain(String),

    /// Floating-point trouble: NaN/Inf input, eigensolver non-convergence,
    /// matrix-exponential accuracy check failure.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Runtime stability guard tripped (blow-up guard, sigma' <= 0).
    #[error("stability error: {0}")]
    Stability(String),

    /// A verification run produced an ill-posed comparison
    /// (e.g. vanishing right-hand side against a nonzero left-hand side).
    #[error("verification error: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Numeric(_) | Error::Stability(_) => 3,
            Error::Verification(_) => 1,
            Error::Io(_) => 2,
        }
    }
}
