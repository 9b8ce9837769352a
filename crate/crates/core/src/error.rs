use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph shape: {0}")]
    InvalidShape(String),
    #[error("defect mask references element absent from the graph: {0}")]
    MaskMismatch(String),
    #[error("requested {requested} {what} but only {available} exist")]
    CountExceeded {
        what: &'static str,
        requested: usize,
        available: usize,
    },
    #[error("logical graph has no edges")]
    EmptyGraph,
    #[error("spin assignment is incomplete: {0}")]
    IncompleteAssignment(String),
    #[error("isometries require the full cubic lattice: {0}")]
    NotFullCube(String),
    #[error("lattice does not fit the target graph: {0}")]
    CapacityExceeded(String),
    #[error("expected a {expected} graph, found {found}")]
    WrongFamily {
        expected: &'static str,
        found: &'static str,
    },
    #[error("coupling value {value} on {coupler} leaves the range [-2, 1]")]
    RangeViolation { coupler: String, value: f64 },
    #[error("{variables} variables exceed the enumeration cap of {cap}")]
    TooLarge { variables: usize, cap: usize },
    #[error("value outside its domain: {0}")]
    DomainError(String),
    #[error("no solved instances in group {0}")]
    EmptyGroup(String),
    #[error("expected {expected} results, got {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("result sets share no instance ids")]
    NoOverlap,
    #[error("embedding does not cover the logical graph: {0}")]
    Uncovered(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
