use std::path::PathBuf;

/// Errors raised by the library.
///
/// Convergence failures of the iterative solvers are not errors; they are
/// reported through [`crate::solvers::Termination`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid CSR structure: {0}")]
    InvalidCsr(String),

    #[error("matrix market {path}:{line}: {msg}")]
    MatrixMarket {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dense conversion of order {n} exceeds the configured cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("scaling failure: row {row} {reason}")]
    Scaling { row: usize, reason: &'static str },

    #[error("zero pivot in row {row} of the incomplete factorization")]
    ZeroPivot { row: usize },

    #[error("zero diagonal entry in row {row}")]
    ZeroDiagonal { row: usize },

    #[error("operator is singular to working precision")]
    Singular,

    #[error("right-hand side has zero norm")]
    ZeroRhs,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inner solve failed to reach {target:e} (achieved {achieved:e})")]
    InnerSolve { target: f64, achieved: f64 },

    #[error("reference solution only reached relative residual {achieved:e}")]
    Reference { achieved: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wraps the error with the name of the pipeline stage it came from.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
