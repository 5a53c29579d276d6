use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error(
        "inconsistent degenerate anticommutator system: component ({row}, {col}) \
         has magnitude {magnitude:e} on a null eigenvalue pair"
    )]
    InconsistentDegenerate { row: usize, col: usize, magnitude: f64 },
    #[error("invalid interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },
    #[error("prior density integrates to {integral}, expected 1")]
    PriorNotNormalized { integral: f64 },
    #[error("{name} = {value} outside [{lower}, {upper}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("empty admissible interval for {component}: [{lower}, {upper}]")]
    EmptyInterval {
        component: &'static str,
        lower: f64,
        upper: f64,
    },
    #[error("isometry violation {violation:e} exceeds tolerance")]
    NotIsometry { violation: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("all cooperative solvers failed: {0}")]
    SolversFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
