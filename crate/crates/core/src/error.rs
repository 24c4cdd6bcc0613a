use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{requested} qubits requested, simulator capacity is 1..={max}")]
    Capacity { requested: usize, max: usize },
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    Address { qubit: usize, n_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("target qubit {0} is also used as a control")]
    TargetIsControl(usize),
    #[error("{what} index {index} out of range (must be < {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{what} = {value} is outside its allowed range")]
    Range { what: &'static str, value: f64 },
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("layout has no row register")]
    NoRowRegister,
    #[error("operation needs two distinct flag qubits (aux and mul)")]
    FlagCollision,
    #[error("empty array")]
    EmptyArray,
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("invalid basis pattern: {0}")]
    Pattern(String),
    #[error("simulation inconsistency: {0}")]
    Inconsistency(String),
}
