//! Annotation graphs: labelled arcs between time-anchored nodes, grouped into
//! graphs, sets and timelines, with corpus format codecs, an XML interchange
//! format and a replayable event bus.
//!
//! Start with [`Registry`], which owns every object and carries the whole API.

pub mod api;
pub mod cli;
pub mod error;
pub mod events;
pub mod feature;
pub mod flat;
pub mod graph;
pub mod id;
pub mod index;
pub mod io;
pub mod model;
pub mod offset;
pub mod registry;
pub mod validate;

pub use error::{AgError, Result};
pub use feature::FeatureMap;
pub use id::{Identifier, ObjectKind};
pub use index::AnnotationSortKey;
pub use model::SignalInfo;
pub use offset::Offset;
pub use registry::{ObjectRef, Registry, SharedRegistry};
