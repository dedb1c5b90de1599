use crate::map::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("graph is not simple: {0}")]
    NonSimpleGraph(String),
    #[error("inconsistent incidence: {0}")]
    InconsistentIncidence(String),
    #[error("Euler characteristic mismatch: expected {expected}, got {got}")]
    EulerMismatch { expected: i64, got: i64 },
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("missing angle on edge ({0}, {1})")]
    MissingAngle(VertexId, VertexId),
    #[error("angle {0} outside the open interval (0, pi)")]
    RangeViolated(f64),
    #[error("vertex {0} lies on the boundary")]
    BoundaryVertex(VertexId),
    #[error("operation requires a torus map")]
    NotTorus,
    #[error("operation requires a disk-patch map")]
    NotDiskPatch,
    #[error("C1 violated: max face residual {0:.3e}")]
    C1Violated(f64),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("no convergence after {iters} iterations: max |K| = {max_k:.3e}")]
    NoConvergence { iters: usize, max_k: f64 },
    #[error("inconsistent holonomy at vertex {vertex}: deviation {deviation:.3e}")]
    InconsistentHolonomy { vertex: VertexId, deviation: f64 },
    #[error("layout frame mismatch: {0}")]
    FrameMismatch(&'static str),
    #[error("point not strictly inside the unit disk")]
    NotInsideDisk,
    #[error("trace too short: {0} usable steps")]
    TooShort(usize),
    #[error("interior region is empty")]
    EmptyInterior,
    #[error("angle perturbation has no usable null-space component")]
    EmptyNullSpace,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
