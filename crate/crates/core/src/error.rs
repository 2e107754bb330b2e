use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("users must be ≥ 2 (got {0})")]
    TooFewUsers(usize),
    #[error("at most {max} users are supported (got {got})")]
    TooManyUsers { got: usize, max: usize },
    #[error("subset mask {mask:#b} has bits outside [1,{users}]")]
    BitOutOfRange { mask: u32, users: usize },
    #[error("user {user} is outside [1,{users}]")]
    UserOutOfRange { user: usize, users: usize },
    #[error("sets overlap (intersection mask {0:#b})")]
    OverlappingSets(u32),
    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("negative probability {p} for symbols {symbols:?}")]
    NegativeProbability { symbols: Vec<usize>, p: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    MassNotOne { sum: f64 },
    #[error("symbol {symbol} of user {user} is outside alphabet of size {size}")]
    SymbolOutOfRange { user: usize, symbol: usize, size: usize },
    #[error("duplicate pmf entry for symbols {0:?}")]
    DuplicateEntry(Vec<usize>),
    #[error("expected {expected} symbols per entry, got {got}")]
    TupleLength { expected: usize, got: usize },
    #[error("alphabet sizes must be >= 1")]
    EmptyAlphabet,
    #[error("probability {0} is outside [0,1]")]
    ProbabilityOutOfRange(f64),

    #[error("component subset must be nonempty")]
    EmptyComponentSubset,
    #[error("negative rate {rate} for subset {subset:?}")]
    NegativeRate { subset: Vec<usize>, rate: f64 },
    #[error("component source cannot be materialised: {0}")]
    NotMaterialisable(String),

    #[error("entropy profile is missing subset {0:?}")]
    MissingSubset(Vec<usize>),
    #[error("entropy profile lists subset {0:?} more than once")]
    DuplicateSubset(Vec<usize>),
    #[error("non-entropic profile: {0}")]
    NonEntropic(String),

    #[error("k = {k} is outside [2, L-1] for L = {users}")]
    KOutOfRange { k: usize, users: usize },
    #[error("user {j} is not in the complement of the subset")]
    JNotInComplement { j: usize },
    #[error("invalid pair ({j}, {m}) for the subset")]
    InvalidPair { j: usize, m: usize },

    #[error("linear program dimensions are inconsistent: {0}")]
    Dimension(String),
    #[error("vertex enumeration limited to n <= {max_n}, m <= {max_m} (got n = {n}, m = {m})")]
    DimensionTooLarge { n: usize, m: usize, max_n: usize, max_m: usize },
    #[error("numerical breakdown in simplex: {0}")]
    NumericalBreakdown(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,

    #[error("entropy {value} is outside [0, log2 {q}]")]
    EntropyOutOfRange { value: f64, q: u64 },
    #[error("field order must be >= 2 (got {0})")]
    FieldOrder(u64),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("capacity C_{user} = {value} is not positive")]
    NonpositiveCapacity { user: usize, value: f64 },
    #[error("weights must be positive (weight {index} = {value})")]
    NonpositiveWeight { index: usize, value: f64 },
    #[error("this operation needs exactly {expected} users (got {got})")]
    WrongUserCount { expected: usize, got: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}
