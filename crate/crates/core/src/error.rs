use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// Enumeration would exceed the configured discriminant cap.
    CapExceeded { discriminant: i64, cap: u64 },
    /// Two forms of different discriminants were combined.
    DiscriminantMismatch { left: i64, right: i64 },
    /// A prime that does not split or ramify was asked for a prime form.
    InertPrime { discriminant: i64, prime: u64 },
    /// A fixed-width intermediate value did not fit.
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::CapExceeded { discriminant, cap } => write!(
                f,
                "|D| = {} exceeds the enumeration cap {cap}",
                discriminant.unsigned_abs()
            ),
            Error::DiscriminantMismatch { left, right } => {
                write!(f, "discriminant mismatch: {left} vs {right}")
            }
            Error::InertPrime {
                discriminant,
                prime,
            } => write!(
                f,
                "{prime} is inert for discriminant {discriminant} (Kronecker symbol -1)"
            ),
            Error::Overflow(what) => write!(f, "arithmetic overflow computing {what}"),
        }
    }
}

impl core::error::Error for Error {}
