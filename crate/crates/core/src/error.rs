use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("path has no vertices")]
    EmptyPath,
    #[error("vertex {0} is not finite")]
    NonFiniteVertex(usize),
    #[error("vertex {0} duplicates its predecessor")]
    DuplicateVertex(usize),
    #[error("arclength {s} outside [0, {length}]")]
    ArclengthOutOfRange { s: f64, length: f64 },
    #[error("sweep span reversed: {s0} > {s1}")]
    ReversedSpan { s0: f64, s1: f64 },
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("deceleration magnitude must be positive, got {0}")]
    NonPositiveDecel(f64),
    #[error("speed must be non-negative and finite, got {0}")]
    InvalidSpeed(f64),
    #[error("an agent needs at least one followable path")]
    NoPaths,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Scenario validation failure. `field` is a dotted path into the scenario
/// document, e.g. `agents[1].radius`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid scenario field `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<GeomError> for Error {
    fn from(e: GeomError) -> Self {
        Error::Domain(e.into())
    }
}
