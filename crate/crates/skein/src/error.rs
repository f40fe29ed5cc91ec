use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug)]
pub enum SkeinError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("disallowed root of unity: {0}")]
    DisallowedRoot(String),
    #[error("singular denominator in {0}")]
    SingularDenominator(String),
    #[error("point is not on the character variety (residual {0:.3e})")]
    NotACharacter(f64),
    #[error("(x, y) is not on the fiber curve: |xy - R| = {0:.3e}")]
    NotOnCurve(f64),
    #[error("infeasible fiber data: x = 0 but no r_i vanishes")]
    Infeasible,
    #[error("central image is not scalar (off-scalar deviation {0:.3e})")]
    NotScalar(f64),
    #[error("algebra closure did not reach a fixpoint")]
    NoConvergence,
    #[error("limit construction did not converge (spread {0:.3e})")]
    LimitNotConverged(f64),
    #[error("no consistent eta recovery: {0}")]
    EtaRecoveryFailed(String),
    #[error("slope recursion exceeded denominator bound {0}")]
    RecursionDepth(i64),
    #[error("bad case: {0}")]
    BadCase(String),
    #[error("no admissible slope move found for {0}")]
    NoGeneralSlope(String),
}

pub type Result<T> = std::result::Result<T, SkeinError>;
