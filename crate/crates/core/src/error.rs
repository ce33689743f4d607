use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("facet {facet} has only {count} incident vertices")]
    IncidenceDegenerate { facet: usize, count: usize },
    #[error("invalid combinatorial type: {0}")]
    InvalidType(String),
    #[error("({0}, {1}) is not an edge of the graph")]
    NoSuchEdge(usize, usize),
    #[error("graph is not polyhedral: {0}")]
    NotPolyhedral(String),
    #[error("contracting the edge does not leave a polyhedral graph")]
    ResultNotPolyhedral,
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    DegreeMismatch { vertex: usize, degree: usize },
    #[error("input does not affinely span the ambient space")]
    DegenerateInput,
    #[error("vertex coordinates do not affinely span the ambient space")]
    NotSpanning,
    #[error("convex hull construction failed: {0}")]
    HullFailure(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("transform is inadmissible: {0}")]
    Inadmissible(String),
    #[error("well-shaping transform not achieved: {0}")]
    NotAchieved(String),
    #[error("combinatorial types differ")]
    TypeMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("numerical rank is ambiguous (gap ratio {ratio:.3e} at the cut)")]
    RankAmbiguous { ratio: f64, tail: Vec<f64> },
    #[error("combinatorial type changed at t = {parameter} (sample {sample})")]
    TypeBreak { parameter: f64, sample: usize },
    #[error("summands share an edge direction")]
    SharedEdgeDirection,
    #[error("stacked pyramid breaks strict convexity; use a smaller height")]
    TooTall,
    #[error("corrector diverged at t = {0}")]
    CorrectorDiverged(f64),
    #[error("not a nontrivial first-order flex: {0}")]
    InvalidFlex(String),
    #[error("singular linear system")]
    SingularSystem,
    #[error("stress is not a self-stress (reciprocal mismatch {0:.3e})")]
    InconsistentStress(f64),
    #[error("lift differs between the two faces of an edge (mismatch {0:.3e})")]
    FaceChoiceMismatch(f64),
    #[error("sign condition violated on edge {0}")]
    SignConditionViolated(usize),
    #[error("heights are not a polyhedral lift (residual {0:.3e})")]
    NotALift(f64),
    #[error("no contraction case applies")]
    CaseUnavailable,
    #[error("flex tail does not converge (difference {0:.3e})")]
    NoConvergence(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("realization failed validation: {0}")]
    ValidationFailed(String),
}

pub type Result<T> = core::result::Result<T, Error>;
