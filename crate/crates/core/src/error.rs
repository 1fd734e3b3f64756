use thiserror::Error;

/// Errors raised by the annotation graph API.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgError {
    #[error("malformed identifier {id:?}: {reason}")]
    MalformedId { id: String, reason: String },
    #[error("identifier {0} already exists")]
    DuplicateId(String),
    #[error("no such object: {0}")]
    NoSuchObject(String),
    #[error("{id} has no feature {name:?}")]
    NoSuchFeature { id: String, name: String },
    #[error("anchors {start} and {end} do not belong to graph {graph}")]
    CrossGraphAnchors {
        graph: String,
        start: String,
        end: String,
    },
    #[error("offset order violated: {0}")]
    OrderViolation(String),
    #[error("annotation from {start} to {end} would close a cycle")]
    CycleError { start: String, end: String },
    #[error("anchor {anchor} is used by annotation {annotation}")]
    AnchorInUse { anchor: String, annotation: String },
    #[error("timeline {timeline} is used by graph {graph}")]
    TimelineInUse { timeline: String, graph: String },
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("graph {0} has no anchored anchors")]
    EmptyDomain(String),
}

impl AgError {
    /// The bare error name, as surfaced through string-only bindings.
    pub fn name(&self) -> &'static str {
        match self {
            AgError::MalformedId { .. } => "MalformedId",
            AgError::DuplicateId(_) => "DuplicateId",
            AgError::NoSuchObject(_) => "NoSuchObject",
            AgError::NoSuchFeature { .. } => "NoSuchFeature",
            AgError::CrossGraphAnchors { .. } => "CrossGraphAnchors",
            AgError::OrderViolation(_) => "OrderViolation",
            AgError::CycleError { .. } => "CycleError",
            AgError::AnchorInUse { .. } => "AnchorInUse",
            AgError::TimelineInUse { .. } => "TimelineInUse",
            AgError::BadArgument(_) => "BadArgument",
            AgError::EmptyDomain(_) => "EmptyDomain",
        }
    }

    pub(crate) fn malformed(id: &str, reason: impl Into<String>) -> Self {
        AgError::MalformedId {
            id: id.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = AgError> = std::result::Result<T, E>;
