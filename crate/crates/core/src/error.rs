use thiserror::Error;

/// Errors raised by the discretization, solvers and the simulation driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sequence length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite kernel value at target {i}, source {j}")]
    NumericalSingularity { i: usize, j: usize },

    #[error("coincident nodes {i} and {j} in alternate-point sum")]
    GeometryDegeneracy { i: usize, j: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("equal-arclength resampling did not converge (nonuniformity {nonuniformity:e} after {iterations} iterations)")]
    ResamplingFailure { iterations: usize, nonuniformity: f64 },

    #[error("backward map is not monotone: D_h alpha0 = {slope:e} at node {node}")]
    MapDegeneracy { node: usize, slope: f64 },

    #[error("density solve failed (residual {residual:e}, condition estimate {condition:e})")]
    SolverFailure { residual: f64, condition: f64 },

    #[error("frame collapse: sigma = {sigma:e} at t = {time}")]
    FrameCollapse { time: f64, sigma: f64 },

    #[error("non-finite state encountered; last valid time {last_valid_time}")]
    BlowUp { last_valid_time: f64 },

    #[error("time step {dt:e} exceeds the stability gate {limit:e}")]
    TimeStepTooLarge { dt: f64, limit: f64 },

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
