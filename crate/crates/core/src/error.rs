use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bit string: {0}")]
    InvalidBits(String),

    #[error("substring [{start}, {end}] out of range for string of length {len}")]
    SubstringRange { start: usize, end: usize, len: usize },

    #[error("invalid match instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("prime universe of {requested} primes exceeds the cap of {cap}")]
    PrimeCap { requested: u64, cap: u64 },

    #[error("qubit index {qubit} out of range for a {width}-qubit state")]
    InvalidQubit { qubit: usize, width: usize },

    #[error("gate targets must be distinct")]
    DuplicateTarget,

    #[error("gate {gate} expects {expected} target(s), got {got}")]
    GateArity { gate: &'static str, expected: usize, got: usize },

    #[error("invalid register layout: {0}")]
    Layout(String),

    #[error("dense state of {width} qubits exceeds the cap of {cap}")]
    WidthCap { width: usize, cap: usize },

    #[error("state factory exhausted after {0} copies")]
    StateExhausted(usize),

    #[error("unknown cost kind `{0}`")]
    UnknownCostKind(String),

    #[error("index {index} out of range for domain of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
