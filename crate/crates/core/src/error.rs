use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree {0} is out of range (1..=4)")]
    UnsupportedDegree(u32),
    #[error("field order {0} is too large for table-driven arithmetic")]
    FieldTooLarge(u64),
    #[error("modulus {0:?} is not irreducible over F_p")]
    ReducibleModulus(Vec<u32>),
    #[error("modulus must be monic of degree {expected}, got {got:?}")]
    BadModulus { expected: u32, got: Vec<u32> },
    #[error("division by zero in GF(q)")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("field element index {index} is out of range for GF({q})")]
    ElementOutOfRange { index: u64, q: u64 },

    #[error("closed-form Clifford unitary needs odd characteristic; use synthesis for q = {0}")]
    EvenCharacteristic(u64),
    #[error("matrix is not in SL(2, q): determinant is {0}")]
    NotSl2(u32),
    #[error("Clifford synthesis failed: {0}")]
    SynthesisFailed(String),
    #[error("enumeration exceeded its budget of {budget} elements")]
    BudgetExceeded { budget: usize },
    #[error("operator is not Clifford: {0}")]
    NotClifford(String),
    #[error("q = {0} is not supported here (need a prime power <= 9)")]
    UnsupportedQ(u64),

    #[error("joint eigenspace of dimension {0} left after refinement")]
    DegeneracyUnresolved(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad basis grouping: {0}")]
    BadGrouping(String),
    #[error("exhaustive computation too large: {0}")]
    TooLarge(String),
    #[error("stabilizer is trivial; there are no distinguished fixed points")]
    TrivialStabilizer,
    #[error("state has zero norm")]
    ZeroState,

    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
