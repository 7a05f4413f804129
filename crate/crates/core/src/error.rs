use thiserror::Error;

/// Errors raised by the geometry, maximal-function and experiment modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse scalar {input:?}: {reason}")]
    ParseScalar { input: String, reason: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("level {alpha} must lie strictly between 0 and 1")]
    LevelOutOfRange { alpha: String },

    #[error("level {alpha} does not exceed the floor {gamma}; the superlevel set is all of the line")]
    LevelNotAboveFloor { alpha: String, gamma: String },

    #[error("floor {gamma} must lie in [0, 1)")]
    FloorOutOfRange { gamma: String },

    #[error("the set is empty")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("empty interval ({lo}, {hi})")]
    EmptyInterval { lo: String, hi: String },

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("delta {delta} outside the admissible window ({lo}, 1)")]
    DeltaOutOfWindow { delta: f64, lo: f64 },

    #[error("ball family is empty")]
    EmptyFamily,

    #[error("balls {indices:?} do not have density above the level {alpha}")]
    DensityBelowLevel { indices: Vec<usize>, alpha: f64 },

    #[error("exponent fit needs at least 5 points with value > 1, got {0}")]
    TooFewPoints(usize),

    #[error("optimizer did not converge: {trace}")]
    NoConvergence { trace: String },

    #[error("nothing to plot")]
    NothingToPlot,

    #[error("operator family {family} is incompatible with {reason}")]
    IncompatibleFamily { family: String, reason: String },

    #[error("malformed geometry: {0}")]
    Geometry(String),

    #[error("malformed table: {0}")]
    Table(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
