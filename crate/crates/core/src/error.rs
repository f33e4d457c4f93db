use thiserror::Error;

/// Failure modes of the numerical and combinatorial pipeline.
///
/// Most variants signal a non-generic situation that the caller can repair
/// by redrawing a chart, perturbing the input or rerouting a path.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid pencil specification: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("chart is not admissible: {0}")]
    InadmissibleChart(String),

    #[error("root finder did not converge (degree {degree}, {iterations} iterations)")]
    NoConvergence { degree: usize, iterations: usize },

    #[error("system has a positive-dimensional solution set")]
    PositiveDimensional,

    #[error("path tracker step underflow at arclength {at:.6e} (step {step:.3e})")]
    StepUnderflow { at: f64, step: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("expected {expected} simple points, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("degenerate critical point (|hessian| = {0:.3e})")]
    Degenerate(f64),

    #[error("critical values {0} and {1} collide")]
    ValueCollision(usize, usize),

    #[error("branching is not simple: {0}")]
    NonSimpleBranching(String),

    #[error("transported class is not integral (residual {0:.3e})")]
    NonIntegral(f64),

    #[error("cannot route distinguished paths: {0}")]
    CannotRoute(String),

    #[error("expected rank(M - I) = 1, found {0}")]
    RankMismatch(usize),

    #[error("integer overflow in lattice computation")]
    Overflow,

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
