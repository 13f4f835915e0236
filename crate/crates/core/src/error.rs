use thiserror::Error;

/// Errors raised by the geometry, functional, ellipse, flow and stability layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angular grid needs an even number of samples >= 4, got {0}")]
    InvalidGrid(usize),

    #[error("expected {expected} support samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("support value {value} at sample {index} is not positive")]
    NonPositiveSupport { index: usize, value: f64 },

    #[error("curvature radius {min_radius:e} at sample {index} is below tolerance {tolerance:e}")]
    NotStrictlyConvex {
        index: usize,
        min_radius: f64,
        tolerance: f64,
    },

    #[error("bodies live on different grids ({left} vs {right} samples)")]
    GridMismatch { left: usize, right: usize },

    #[error("linear map is singular (det = {0:e})")]
    SingularMap(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("p must be >= 1 here, got {0}")]
    InvalidP(f64),

    #[error("body area {area} differs from pi beyond tolerance")]
    NotNormalized { area: f64 },

    #[error("ellipse solver did not converge: gap {gap:e} after {iterations} iterations")]
    SolverFailure { gap: f64, iterations: usize },

    #[error(
        "ellipse with semi-major axis {major} is not contained in the disk of radius {radius}"
    )]
    NotContained { major: f64, radius: f64 },

    #[error("flow step rejected at t = {time}: {reason}")]
    StepRejected { time: f64, reason: String },

    #[error("flow reached extinction at t = {time} (dt fell to {dt:e})")]
    ExtinctionReached { time: f64, dt: f64 },

    #[error("requested end time {t_end} exceeds the safe horizon {horizon}")]
    HorizonExceeded { t_end: f64, horizon: f64 },

    #[error("need at least {needed} snapshots, trace has {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("initial bodies are not nested (max excess {excess:e})")]
    NotNested { excess: f64 },

    #[error("traces are not synchronized: {0}")]
    Unsynchronized(String),

    #[error("support bounds [{min_support}, {max_support}] violate c1 = {c1}, c2 = {c2}")]
    BadSandwich {
        min_support: f64,
        max_support: f64,
        c1: f64,
        c2: f64,
    },

    #[error("deficit {0:e} is negative beyond quadrature tolerance")]
    DegenerateDeficit(f64),

    #[error("ratio at p = 2 ({ratio_p2}) fell below ratio at p = 1 ({ratio_p1})")]
    MonotonicityViolated { ratio_p1: f64, ratio_p2: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
