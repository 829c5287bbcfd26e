use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("entries sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("entry {index} = {value} lies outside [0, 1]")]
    OutOfRange { index: usize, value: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mixing weight {0} lies outside [0, 1]")]
    LambdaOutOfRange(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("time {0} is not on the grid")]
    InvalidTime(u32),
    #[error("expected {expected} vectors, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("measure is not Markovian")]
    NotMarkovian,
    #[error("dynamics is not decomposable at t = {t}, t' = {t_prime}")]
    NotDecomposable { t: u32, t_prime: u32 },
    #[error("grid is not closed under differences: {t} - {t_prime} is missing")]
    GridNotDifferenceClosed { t: u32, t_prime: u32 },
    #[error("grid or dimension mismatch: {0}")]
    GridMismatch(String),
    #[error("trajectory is degenerate; every implementation is Markovian")]
    DegenerateTrajectory,
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("support vector {0} is not a tabulated member")]
    UnknownSupportVector(String),
    #[error("support weights must be positive and sum to 1")]
    BadWeights,
    #[error("configuration {config} outside 1..={n}")]
    BadConfig { config: usize, n: usize },
    #[error("table of {size} entries exceeds the cap of {cap}")]
    GridTooLarge { size: u128, cap: u128 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("operation needs dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("matrix is not unitary within tolerance: {0}")]
    NotUnitary(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{what} = {size} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("unknown schema {0:?}")]
    UnknownSchema(String),
    #[error("family has no generator; cannot extend to {0}")]
    ExtensionUnavailable(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("no tabulated value at {0}")]
    UntabulatedPoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
