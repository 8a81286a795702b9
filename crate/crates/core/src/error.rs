use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} lies on the boundary of its domain")]
    BoundaryPoint(String),
    #[error("point {0} is outside its declared domain")]
    OutsideDomain(String),
    #[error("points belong to different domains")]
    DomainMismatch,
    #[error("kernel evaluated on the diagonal")]
    DiagonalSingularity,
    #[error("index {0} out of range")]
    IndexOutOfRange(i64),
    #[error("non-finite value at node {0}")]
    NonFiniteValue(usize),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("input not representable within truncation: {0}")]
    TruncationExceeded(String),
    #[error("Neumann series did not converge after {0} terms")]
    NoConvergence(usize),
    #[error("sup norm {0} exceeds the solver limit 0.5")]
    NormTooLarge(f64),
    #[error("derivative vanishes at {0}")]
    CriticalPoint(String),
    #[error("welding fit failed: {0}")]
    FitFailure(String),
    #[error("degenerate section, denominator {0}")]
    DegenerateSection(f64),
    #[error("form degree {0} exceeds 4")]
    DegreeTooLarge(usize),
    #[error("unknown suite {0}")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io failure: {0}")]
    IoFailure(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::IoFailure(e.to_string())
    }
}
