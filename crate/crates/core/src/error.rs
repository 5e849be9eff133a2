use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("family {0} has no polynomial prefactor")]
    NoPrefactor(&'static str),

    #[error("polynomial degree {degree} exceeds the maximum {max}")]
    DegreeTooHigh { degree: u32, max: u32 },

    #[error("carrier {0} is not supported here")]
    UnsupportedCarrier(&'static str),

    #[error("point is at a vortex core (|psi| = {amplitude:e})")]
    AtVortexCore { amplitude: f64 },

    #[error("ambiguous winding: phase increment {increment:.3} rad after maximal refinement")]
    AmbiguousWinding { increment: f64 },

    #[error("degenerate vortex: Re w and Im w are parallel (|w x w*| = {cross:e})")]
    DegenerateVortex { cross: f64 },

    #[error("point is not on a vortex line (|psi| = {amplitude:e}, tolerance {tolerance:e})")]
    NotOnLine { amplitude: f64, tolerance: f64 },

    #[error("refinement failed after {iterations} iterations (|psi| = {residual:e})")]
    RefinementFailed {
        last: [f64; 3],
        residual: f64,
        iterations: usize,
    },

    #[error("grids do not match")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("initial data does not decay at the box boundary: relative amplitude {measured:e} > {limit:e}")]
    BoundaryDecay { measured: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field: field.to_string(),
        reason: reason.into(),
    }
}
