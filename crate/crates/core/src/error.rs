use thiserror::Error;

/// Errors raised anywhere in the solve pipeline.
#[derive(Debug, Error)]
pub enum GtrsError {
    #[error("malformed instance document: {0}")]
    Parse(String),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("constraint matrix is zero; the constraint must be quadratic")]
    LinearConstraint,

    #[error("matrices are neither jointly diagonal nor part of a definite pencil")]
    NotSimultaneouslyDiagonalizable,

    #[error("free coordinate {index} has zero objective curvature but a nonzero linear term")]
    SingularFreeBlock { index: usize },

    #[error("secular function evaluated at a pole (lambda = {lambda})")]
    PoleEvaluation { lambda: f64 },

    #[error("constraint gradient vanishes; LICQ fails at this point")]
    ZeroGradient,

    #[error("hard case: no null-space step restores feasibility at lambda = {lambda}")]
    HardCaseIncomplete { lambda: f64 },

    #[error("{count} certified local nonglobal minimizers exceed the bound {bound}")]
    CountBoundViolated { count: usize, bound: usize },

    #[error("local nonglobal minimizers at lambda {first} and {second} are not isolated")]
    NotIsolated { first: f64, second: f64 },

    #[error("{0} is not Hermitian")]
    NotHermitian(&'static str),

    #[error("eigenvalues of the embedded Hessian fail to pair at lambda = {lambda}")]
    PairingViolation { lambda: f64 },

    #[error("instance is not reducible to one variable: {0}")]
    NotReducible(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GtrsError>;
