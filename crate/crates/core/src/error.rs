use thiserror::Error;

/// Every failure a protocol role, codec or parameter check can raise.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OtError {
    #[error("no safe prime found within the retry budget")]
    PrimeSearchExhausted,
    #[error("input of {got} bits is shorter than the {need}-bit suffix")]
    InputTooShort { got: usize, need: usize },
    #[error("length mismatch: expected {expected} bytes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("plaintext is not below the Paillier modulus")]
    PlaintextOutOfRange,
    #[error("ciphertext is not invertible modulo n")]
    MalformedCiphertext,
    #[error("query pair does not multiply to C")]
    ConsistencyAbort,
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("no decrypted candidate carries the expected tag")]
    NoTagMatch,
    #[error("both decrypted candidates carry the expected tag")]
    AmbiguousTag,
    #[error("Paillier modulus of {have} bits is below the required {need} bits")]
    KeyTooSmall { have: u64, need: u64 },
    #[error("payload component does not fit below the Paillier modulus")]
    EmbeddingOverflow,
    #[error("decode error: {0}")]
    DecodeError(String),
    #[error("frame truncated: need {need} bytes, have {have}")]
    TruncatedFrame { need: usize, have: usize },
    #[error("unknown message type tag {0:#04x}")]
    UnknownTag(u8),
    #[error("unknown role code {0:#04x}")]
    UnknownRole(u8),
    #[error("invalid bit value {0}")]
    InvalidBit(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("protocol flow error: {0}")]
    Flow(String),
}

impl OtError {
    /// Stable variant name, used in transcripts and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            OtError::PrimeSearchExhausted => "PrimeSearchExhausted",
            OtError::InputTooShort { .. } => "InputTooShort",
            OtError::LengthMismatch { .. } => "LengthMismatch",
            OtError::PlaintextOutOfRange => "PlaintextOutOfRange",
            OtError::MalformedCiphertext => "MalformedCiphertext",
            OtError::ConsistencyAbort => "ConsistencyAbort",
            OtError::IndexOutOfRange { .. } => "IndexOutOfRange",
            OtError::NoTagMatch => "NoTagMatch",
            OtError::AmbiguousTag => "AmbiguousTag",
            OtError::KeyTooSmall { .. } => "KeyTooSmall",
            OtError::EmbeddingOverflow => "EmbeddingOverflow",
            OtError::DecodeError(_) => "DecodeError",
            OtError::TruncatedFrame { .. } => "TruncatedFrame",
            OtError::UnknownTag(_) => "UnknownTag",
            OtError::UnknownRole(_) => "UnknownRole",
            OtError::InvalidBit(_) => "InvalidBit",
            OtError::InvalidParameter(_) => "InvalidParameter",
            OtError::Flow(_) => "Flow",
        }
    }
}

pub type Result<T, E = OtError> = std::result::Result<T, E>;

/// Checks that a caller-supplied value is a single bit.
pub fn bit_from_u64(value: u64) -> Result<bool> {
    match value {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(OtError::InvalidBit(other)),
    }
}
