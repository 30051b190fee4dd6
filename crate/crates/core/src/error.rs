use alloc::string::String;

/// Errors raised by grid construction, operator assembly and propagation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {0}; grids have one to three axes")]
    Dimension(usize),
    #[error("axis {axis}: interval [{lo}, {hi}] is not positive")]
    Interval { axis: usize, lo: f64, hi: f64 },
    #[error("axis {axis}: {points} points is below the minimum of 4")]
    TooFewPoints { axis: usize, points: usize },
    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    Axis { axis: usize, dims: usize },
    #[error("array of length {found} does not conform to grid of {expected} points")]
    Shape { expected: usize, found: usize },
    #[error("Bernoulli index {0} outside 0..=3")]
    BernoulliIndex(usize),
    #[error("the gradient of V₀ is required but was not supplied")]
    MissingGradient,
    #[error("scheme '{0}' is not recognized")]
    UnknownScheme(String),
    #[error("coefficient table '{0}' is not available; supply it through the config")]
    MissingTable(String),
    #[error("invalid coefficient table '{name}': {reason}")]
    InvalidTable { name: String, reason: String },
    #[error("incompatible configuration: {0}")]
    Incompatible(String),
    #[error("problem '{0}' is not recognized")]
    UnknownProblem(String),
    #[error("field has {found} components, problem needs {expected}")]
    FieldDimension { expected: usize, found: usize },
    #[error("eigen-solver did not converge: {0}")]
    EigenSolver(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
