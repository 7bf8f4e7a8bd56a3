use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("raise precision: {0}")]
    RaisePrecision(String),
    #[error("basepoint too close to singularity")]
    BasepointNearSingularity,
    #[error("path too close to singular locus")]
    PathTooClose,
    #[error("irregular singularity at {0}")]
    IrregularSingularity(String),
    #[error("point is not a singular point of the system")]
    NotSingular,
    #[error("matrix not certifiably invertible: {0}")]
    NotInvertible(String),
    #[error("near-singular fiber at t = {0}")]
    NearSingularFiber(String),
    #[error("unknown family label `{0}`")]
    UnknownFamily(String),
    #[error("isotrivial family: {0}")]
    Isotrivial(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("symmetry violated beyond certified error: {0}")]
    SymmetryViolation(String),
    #[error("reduction stalled; raise precision")]
    ReductionStalled,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("valency check failed: {0}")]
    ValencyViolated(String),
    #[error("increase subdivision: {0}")]
    IncreaseSubdivision(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
