use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("pixel index {index} out of range for {len} pixels")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("QPSK needs an even number of bits, got {0}")]
    OddBitCount(usize),

    #[error("ideal symbol has zero magnitude")]
    ZeroIdealSymbol,

    #[error("channel estimate is zero, frame cannot be equalized")]
    Unequalizable,

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("brute force limited to {cap} active pixels, got {got}")]
    TooManyPixels { got: usize, cap: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
