use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("eigensolver did not converge within {0} iterations")]
    ConvergenceFailure(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside the domain of the bound: {0}")]
    DomainError(String),
    #[error("matrix {index} is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPsd { index: usize, min_eigenvalue: f64 },
    #[error("spectral norm {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("vertex {0} has zero typical degree")]
    ZeroDegree(usize),
    #[error("graph contains loops")]
    LoopsUnsupported,
    #[error("problem size {size} exceeds the enumeration limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("kernel evaluated to a non-finite value at ({x}, {y})")]
    QuadratureFailure { x: f64, y: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("quadrature node {0} lies on an eigenvalue")]
    SingularResolvent(f64),
    #[error("graph file line {line}: {message}")]
    GraphFormat { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
