use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // numerical kernels
    #[error("matrix is not symmetric: |s[{row}][{col}] - s[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("matrix order {0} exceeds the supported maximum of 256")]
    TooLarge(usize),
    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("argument out of domain: {0}")]
    Domain(String),

    // model fitting
    #[error("data matrix must have at least 3 rows and 3 columns, got {n}x{m}")]
    TooSmall { n: usize, m: usize },
    #[error("all-zero data matrix has no singular structure")]
    AllZero,
    #[error("fit is degenerate (lambda1 == lambda2); pass force to proceed")]
    DegenerateFit,
    #[error("probe {0} has no nonzero first-dimension cell")]
    NoFirstDimension(String),

    // directions
    #[error("invalid group specification: {0}")]
    Groups(String),
    #[error("direction vanishes after projection: {0}")]
    ZeroDirection(String),
    #[error("direction set violates its invariants: {0}")]
    InvalidDirections(String),

    // inference
    #[error("sigma-hat zero")]
    SigmaZero,
    #[error("invalid test configuration: {0}")]
    TestConfig(String),

    // input / output
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for command-line front ends: 2 for unreadable input,
    /// 3 for inputs that parse but violate a precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::NonFinite { .. } | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
