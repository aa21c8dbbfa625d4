use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("root finding needs a polynomial of degree at least 1")]
    DegreeTooLow,
    #[error("leading coefficient is zero or not finite")]
    ZeroLeadingCoefficient,
    #[error("root iteration did not reach tolerance after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("interval is empty or reversed: a = {a}, b = {b}")]
    BadInterval { a: f64, b: f64 },
    #[error("right-hand side must have degree >= 1, got {0}")]
    DegreeTooLow(usize),
    #[error("problem `{0}` has no closed-form solution")]
    MissingExactSolution(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{name}` needs a parameter: {reason}")]
    BadParameter { name: String, reason: String },
    #[error("vector has {got} values, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomotopyError {
    #[error("gamma must lie on the unit circle away from +-1, got {re}+{im}i")]
    BadGamma { re: f64, im: f64 },
    #[error("start polynomial is degenerate: {0}")]
    DegenerateStart(#[from] PolyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("Newton did not converge in {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("invalid tracker configuration: {0}")]
    BadConfig(String),
}

/// Crate-level error covering every fallible operation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error("stage {stage} produced no convergent paths")]
    EmptyStage { stage: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
