use thiserror::Error;

/// Errors produced by grid construction, the direct solver and the
/// iteration driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain edge lengths must be positive, got l1 = {l1}, l2 = {l2}")]
    NonPositiveLength { l1: f64, l2: f64 },

    #[error("grid needs at least {min} intervals per direction, got m = {m}, n = {n}")]
    GridTooSmall { m: usize, n: usize, min: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("fine grid is not an exact 2x refinement of the coarse grid")]
    NonNestedGrids,

    #[error("input field contains a non-finite value")]
    NonFiniteInput,

    #[error("compact operator is numerically singular: |eigenvalue| = {magnitude:.3e} for mode ({p}, {q})")]
    SingularOperator { p: usize, q: usize, magnitude: f64 },

    #[error("nonlinearity evaluated to a non-finite value at node ({i}, {j}) = ({x1}, {x2})")]
    NonFiniteNonlinearity { i: usize, j: usize, x1: f64, x2: f64 },

    #[error("exact-error stopping requires a problem with an exact solution")]
    MissingExactSolution,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("convergence-order input must be positive, got {0}")]
    NonPositiveError(f64),

    #[error("invalid study input: {0}")]
    InvalidStudyInput(String),

    #[error("malformed study table: {0}")]
    MalformedTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
