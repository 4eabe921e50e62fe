use thiserror::Error;

/// Errors raised by chain construction and the distance, rate and mixing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    Empty,

    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("entries sum to {sum}, outside tolerance {tol} of 1")]
    SumOutOfTolerance { sum: f64, tol: f64 },

    #[error("row {row} is not a probability vector: {source}")]
    InvalidRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix is not square: {rows} rows of length {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{0} state labels given for {1} states")]
    LabelCount(usize, usize),

    #[error("linear system has no unique solution")]
    SingularSystem,

    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },

    #[error("matrix is not irreducible")]
    NotIrreducible,

    #[error("chain is not ergodic")]
    NotErgodic,

    #[error("detailed balance violated by {gap:e}")]
    NotReversible { gap: f64 },

    #[error("stationary distribution has zero mass at state {state}")]
    ZeroStationaryMass { state: usize },

    #[error("matrix is not diagonalisable: {0}")]
    NotDiagonalisable(String),

    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),

    #[error("enumeration of {words} words exceeds cap {cap}")]
    EnumerationTooLarge { words: u128, cap: u128 },

    #[error("no crossing found within {cap} steps")]
    CapExceeded { cap: usize },

    #[error("degenerate spectrum: lambda_max = {lambda_max:e}, bounds undefined")]
    DegenerateSpectrum { lambda_max: f64 },

    #[error("Dirichlet parameter {value} at index {index} is not strictly positive")]
    NonPositiveAlpha { index: usize, value: f64 },

    #[error("infinite distance between matrices {i} and {j}")]
    InfiniteDistance { i: usize, j: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("label lists differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
