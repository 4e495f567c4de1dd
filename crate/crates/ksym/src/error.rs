use crate::exprlang::{EvalError, ParseError};
use crate::solver::linalg::LinalgError;

/// Errors raised by the numerical pipeline.
///
/// Verdicts (regular or not, integrable or not) are reported through result
/// structs, not through this type.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("singular frame at q = {q:?} (|det| = {det:.3e})")]
    SingularFrame { q: Vec<f64>, det: f64 },
    #[error("singular metric at q = {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("Euler-Lagrange coefficient matrix is rank deficient")]
    RankDeficient,
    #[error("bracket of horizontal fields has a base component of size {0:.3e}")]
    NonVerticalBracket(f64),
    #[error("not invariant: {0}")]
    NotInvariant(String),
    #[error("singular Hessian of the reduced Lagrangian")]
    SingularHessian,
    #[error("singular vertical Hessian block (not G-regular)")]
    SingularBlock,
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("non-finite state after step at t = {t:?}")]
    NonFiniteState { t: Vec<f64> },
    #[error("step size {0:e} rejected")]
    StepRejected(f64),
    #[error("sweep orders disagree by {defect:.3e} (tolerance {tol:.1e})")]
    NonCommutingSweeps { defect: f64, tol: f64 },
    #[error("chart exit: coordinate {index} = {value} outside [{lo}, {hi}]")]
    ChartExit { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
