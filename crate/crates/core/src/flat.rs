//! The string-only interface for scripting bindings.
//!
//! Every argument is a string and every result is a string, a boolean or
//! nothing, so a binding only has to forward calls by name:
//!
//! ```
//! use agtk::flat::{Flat, Value};
//!
//! let ag = Flat::new();
//! let set = ag.call("CreateAGSet", &["Test"]).unwrap();
//! let tl = ag.call("CreateTimeline", &[set.as_str()]).unwrap();
//! assert_eq!(tl.as_str(), "Test:Timeline1");
//! assert_eq!(ag.call("ExistsTimeline", &["Test:Timeline1"]).unwrap(), Value::Bool(true));
//! let err = ag.call("CreateTimeline", &["CallHome"]).unwrap_err();
//! assert_eq!(err.name, "NoSuchObject");
//! ```
//!
//! Lists of ids come back as one string with the ids separated by single
//! spaces. Offsets are passed and returned in decimal notation; an unset
//! offset reads as [`Value::None`]. Errors carry the API error name, such as
//! `NoSuchObject` or `DuplicateId`.

use std::fmt;

use crate::error::AgError;
use crate::id::{Identifier, ObjectKind};
use crate::model::SignalInfo;
use crate::offset::Offset;
use crate::registry::{wrong_kind, SharedRegistry};

/// A call result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Str(String),
    Bool(bool),
    None,
}

impl Value {
    /// The string payload; empty for booleans and `None`.
    pub fn as_str(&self) -> &str {
        match self {
            Value::Str(s) => s,
            _ => "",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::None => Ok(()),
        }
    }
}

/// A failed call, named after the API error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatError {
    pub name: &'static str,
    pub message: String,
}

impl fmt::Display for FlatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.message)
    }
}

impl std::error::Error for FlatError {}

impl From<AgError> for FlatError {
    fn from(e: AgError) -> Self {
        FlatError {
            name: e.name(),
            message: e.to_string(),
        }
    }
}

/// Every function name accepted by [`Flat::call`].
pub const FUNCTIONS: &[&str] = &[
    "CreateAGSet",
    "ExistsAGSet",
    "DeleteAGSet",
    "CreateTimeline",
    "ExistsTimeline",
    "DeleteTimeline",
    "CreateSignal",
    "ExistsSignal",
    "DeleteSignal",
    "GetSignals",
    "CreateAG",
    "ExistsAG",
    "DeleteAG",
    "CreateAnchor",
    "ExistsAnchor",
    "DeleteAnchor",
    "SetAnchorOffset",
    "UnsetAnchorOffset",
    "GetAnchorOffset",
    "SetAnchorUnit",
    "GetAnchorUnit",
    "CreateAnnotation",
    "ExistsAnnotation",
    "DeleteAnnotation",
    "CopyAnnotation",
    "SplitAnnotation",
    "NSplitAnnotation",
    "GetAnnotationType",
    "GetStartAnchor",
    "GetEndAnchor",
    "SetFeature",
    "GetFeature",
    "ExistsFeature",
    "DeleteFeature",
    "GetAnchorSet",
    "GetAnchorSetByOffset",
    "GetAnchorSetNearestOffset",
    "GetIncomingAnnotationSet",
    "GetOutgoingAnnotationSet",
    "GetAnnotationSetByOffset",
    "GetAnnotationSeqByOffset",
    "GetAnnotationsByFeature",
    "GetAnnotationsByType",
    "toXML",
];

/// A handle on a registry that speaks only strings. Clones share the
/// registry; the handle itself holds no other state.
#[derive(Debug, Clone, Default)]
pub struct Flat {
    registry: SharedRegistry,
}

fn join(ids: Vec<Identifier>) -> Value {
    Value::Str(
        ids.iter()
            .map(Identifier::as_str)
            .collect::<Vec<_>>()
            .join(" "),
    )
}

fn id(i: Identifier) -> Value {
    Value::Str(i.into_string())
}

fn offset(text: &str) -> Result<Offset, AgError> {
    Ok(text.trim().parse()?)
}

fn arity(function: &str, args: &[&str], min: usize, max: usize) -> Result<(), AgError> {
    if args.len() < min || args.len() > max {
        let want = if min == max {
            min.to_string()
        } else {
            format!("{min} to {max}")
        };
        return Err(AgError::BadArgument(format!(
            "{function} takes {want} argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

impl Flat {
    pub fn new() -> Self {
        Flat::default()
    }

    pub fn with_registry(registry: SharedRegistry) -> Self {
        Flat { registry }
    }

    pub fn registry(&self) -> &SharedRegistry {
        &self.registry
    }

    /// Calls API function `function` with string arguments.
    pub fn call(&self, function: &str, args: &[&str]) -> Result<Value, FlatError> {
        let (min, max) = match function {
            "CreateSignal" => (2, 7),
            "CreateAG" => (1, 2),
            "GetAnchorSetByOffset" => (2, 3),
            "GetAnnotationSeqByOffset" => (1, 3),
            "SetAnchorOffset"
            | "SetAnchorUnit"
            | "NSplitAnnotation"
            | "GetFeature"
            | "ExistsFeature"
            | "DeleteFeature"
            | "GetAnchorSetNearestOffset"
            | "GetAnnotationSetByOffset"
            | "GetAnnotationsByType" => (2, 2),
            "SetFeature" | "GetAnnotationsByFeature" => (3, 3),
            "CreateAnnotation" => (4, 4),
            f if FUNCTIONS.contains(&f) => (1, 1),
            f => return Err(AgError::BadArgument(format!("unknown function {f:?}")).into()),
        };
        arity(function, args, min, max)?;
        let a = |i: usize| args.get(i).copied();
        let exists = |kind: ObjectKind| {
            let found = self.registry.read(|r| r.kind_of(args[0]).ok());
            Value::Bool(found == Some(kind))
        };
        let delete = |kind: ObjectKind| -> Result<Value, AgError> {
            self.registry.write(|r| {
                let found = r.kind_of(args[0])?;
                if found != kind {
                    return Err(wrong_kind(args[0], found, kind));
                }
                r.delete(args[0]).map(|_| Value::None)
            })
        };
        let r = &self.registry;
        let value = match function {
            "CreateAGSet" => r.write(|r| r.create_agset(args[0])).map(id),
            "ExistsAGSet" => Ok(exists(ObjectKind::AgSet)),
            "DeleteAGSet" => delete(ObjectKind::AgSet),
            "CreateTimeline" => r.write(|r| r.create_timeline(args[0])).map(id),
            "ExistsTimeline" => Ok(exists(ObjectKind::Timeline)),
            "DeleteTimeline" => delete(ObjectKind::Timeline),
            "CreateSignal" => {
                let field = |i| a(i).unwrap_or("").to_string();
                let info = SignalInfo {
                    uri: field(1),
                    mime_class: field(2),
                    mime_type: field(3),
                    encoding: field(4),
                    unit: field(5),
                    track: field(6),
                };
                r.write(|r| r.create_signal(args[0], info)).map(id)
            }
            "ExistsSignal" => Ok(exists(ObjectKind::Signal)),
            "DeleteSignal" => delete(ObjectKind::Signal),
            "GetSignals" => r.read(|r| r.get_signals(args[0])).map(join),
            "CreateAG" => r
                .write(|r| r.create_ag(args[0], a(1).filter(|t| !t.is_empty())))
                .map(id),
            "ExistsAG" => Ok(exists(ObjectKind::Ag)),
            "DeleteAG" => delete(ObjectKind::Ag),
            "CreateAnchor" => r.write(|r| r.create_anchor(args[0])).map(id),
            "ExistsAnchor" => Ok(exists(ObjectKind::Anchor)),
            "DeleteAnchor" => delete(ObjectKind::Anchor),
            "SetAnchorOffset" => offset(args[1])
                .and_then(|o| r.write(|r| r.set_anchor_offset(args[0], o)))
                .map(|_| Value::None),
            "UnsetAnchorOffset" => r
                .write(|r| r.unset_anchor_offset(args[0]))
                .map(|_| Value::None),
            "GetAnchorOffset" => r
                .read(|r| r.get_anchor_offset(args[0]))
                .map(|o| o.map_or(Value::None, |o| Value::Str(o.to_string()))),
            "SetAnchorUnit" => r
                .write(|r| r.set_anchor_unit(args[0], args[1]))
                .map(|_| Value::None),
            "GetAnchorUnit" => {
                r.read(|r| r.anchor(args[0]).map(|a| Value::Str(a.unit().to_string())))
            }
            "CreateAnnotation" => r
                .write(|r| r.create_annotation(args[0], args[1], args[2], args[3]))
                .map(id),
            "ExistsAnnotation" => Ok(exists(ObjectKind::Annotation)),
            "DeleteAnnotation" => delete(ObjectKind::Annotation),
            "CopyAnnotation" => r.write(|r| r.copy_annotation(args[0])).map(id),
            "SplitAnnotation" => r
                .write(|r| r.split_annotation(args[0]))
                .map(|(x, y)| join(vec![x, y])),
            "NSplitAnnotation" => args[1]
                .trim()
                .parse::<usize>()
                .map_err(|_| AgError::BadArgument(format!("bad count {:?}", args[1])))
                .and_then(|n| r.write(|r| r.nsplit_annotation(args[0], n)))
                .map(join),
            "GetAnnotationType" => r.read(|r| {
                r.annotation(args[0])
                    .map(|x| Value::Str(x.kind().to_string()))
            }),
            "GetStartAnchor" => r.read(|r| r.annotation(args[0]).map(|x| id(x.start().clone()))),
            "GetEndAnchor" => r.read(|r| r.annotation(args[0]).map(|x| id(x.end().clone()))),
            "SetFeature" => r
                .write(|r| r.set_feature(args[0], args[1], args[2]))
                .map(|_| Value::None),
            "GetFeature" => r.read(|r| r.get_feature(args[0], args[1])).map(Value::Str),
            "ExistsFeature" => r
                .read(|r| r.exists_feature(args[0], args[1]))
                .map(Value::Bool),
            "DeleteFeature" => r
                .write(|r| r.delete_feature(args[0], args[1]))
                .map(|_| Value::None),
            "GetAnchorSet" => r.read(|r| r.get_anchor_set(args[0])).map(join),
            "GetAnchorSetByOffset" => (|| {
                let at = offset(args[1])?;
                let eps = a(2).map(offset).transpose()?.unwrap_or(Offset::ZERO);
                r.read(|r| r.get_anchor_set_by_offset(args[0], at, eps))
            })()
            .map(join),
            "GetAnchorSetNearestOffset" => offset(args[1])
                .and_then(|o| r.read(|r| r.get_anchor_set_nearest_offset(args[0], o)))
                .map(join),
            "GetIncomingAnnotationSet" => {
                r.read(|r| r.get_incoming_annotation_set(args[0])).map(join)
            }
            "GetOutgoingAnnotationSet" => {
                r.read(|r| r.get_outgoing_annotation_set(args[0])).map(join)
            }
            "GetAnnotationSetByOffset" => offset(args[1])
                .and_then(|o| r.read(|r| r.get_annotation_set_by_offset(args[0], o)))
                .map(join),
            "GetAnnotationSeqByOffset" => (|| {
                let bound = |i: usize| a(i).filter(|s| !s.is_empty()).map(offset).transpose();
                let (begin, end) = (bound(1)?, bound(2)?);
                r.read(|r| r.get_annotation_seq_by_offset(args[0], begin, end))
            })()
            .map(join),
            "GetAnnotationsByFeature" => r
                .read(|r| r.get_annotations_by_feature(args[0], args[1], args[2]))
                .map(join),
            "GetAnnotationsByType" => r
                .read(|r| r.get_annotations_by_type(args[0], args[1]))
                .map(join),
            "toXML" => r.read(|r| r.to_xml(args[0])).map(Value::Str),
            _ => unreachable!("checked against FUNCTIONS"),
        };
        Ok(value?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: Result<Value, FlatError>) -> String {
        v.unwrap().as_str().to_string()
    }

    #[test]
    fn test_agset_script() {
        let ag = Flat::new();
        let set = s(ag.call("CreateAGSet", &["Test"]));
        let tl = s(ag.call("CreateTimeline", &[&set]));
        let g = s(ag.call("CreateAG", &[&set, &tl]));
        let a1 = s(ag.call("CreateAnchor", &[&g]));
        let a2 = s(ag.call("CreateAnchor", &[&g]));
        let ann = s(ag.call("CreateAnnotation", &[&g, &a1, &a2, "Word"]));
        ag.call("SetFeature", &[&ann, "English", "cat"]).unwrap();
        ag.call("SetFeature", &[&ann, "Japanese", "neko"]).unwrap();
        let xml = s(ag.call("toXML", &[&g]));
        assert!(
            xml.contains(r#"<Feature name="Japanese">neko</Feature>"#),
            "{xml}"
        );
        assert_eq!(xml, ag.registry().read(|r| r.to_xml(&g).unwrap()));
        assert_eq!(
            ag.call("ExistsAnnotation", &[&ann]).unwrap(),
            Value::Bool(true)
        );
        assert_eq!(
            ag.call("ExistsAnchor", &[&ann]).unwrap(),
            Value::Bool(false)
        );
        assert_eq!(ag.call("GetAnchorOffset", &[&a1]).unwrap(), Value::None);
    }

    #[test]
    fn signals_are_space_separated() {
        let ag = Flat::new();
        ag.call("CreateAGSet", &["Timit"]).unwrap();
        let tl = s(ag.call("CreateTimeline", &["Timit"]));
        ag.call(
            "CreateSignal",
            &[&tl, "a.wav", "audio", "wav", "pcm", "16kHz", "1"],
        )
        .unwrap();
        ag.call("CreateSignal", &[&tl, "b.wav"]).unwrap();
        assert_eq!(
            s(ag.call("GetSignals", &[&tl])),
            "Timit:Timeline1:Signal1 Timit:Timeline1:Signal2"
        );
    }

    #[test]
    fn errors_carry_api_names() {
        let ag = Flat::new();
        assert_eq!(
            ag.call("CreateTimeline", &["CallHome"]).unwrap_err().name,
            "NoSuchObject"
        );
        ag.call("CreateAGSet", &["X"]).unwrap();
        assert_eq!(
            ag.call("CreateAGSet", &["X"]).unwrap_err().name,
            "DuplicateId"
        );
        assert_eq!(
            ag.call("CreateAGSet", &["a b"]).unwrap_err().name,
            "MalformedId"
        );
        assert_eq!(ag.call("Teleport", &[]).unwrap_err().name, "BadArgument");
        assert_eq!(ag.call("CreateAGSet", &[]).unwrap_err().name, "BadArgument");
        assert_eq!(
            ag.call("DeleteTimeline", &["X"]).unwrap_err().name,
            "MalformedId"
        );
        let e = ag.call("GetFeature", &["X", "nope"]).unwrap_err();
        assert_eq!(e.to_string(), format!("NoSuchFeature: {}", e.message));
    }

    #[test]
    fn offsets_and_queries() {
        let ag = Flat::new();
        ag.call("CreateAGSet", &["Q"]).unwrap();
        let g = s(ag.call("CreateAG", &["Q"]));
        let a = s(ag.call("CreateAnchor", &[&g]));
        let b = s(ag.call("CreateAnchor", &[&g]));
        ag.call("SetAnchorOffset", &[&a, "0.0"]).unwrap();
        ag.call("SetAnchorOffset", &[&b, "1"]).unwrap();
        assert_eq!(s(ag.call("GetAnchorOffset", &[&b])), "1.0");
        assert_eq!(
            s(ag.call("GetAnchorSetNearestOffset", &[&g, "0.5"])),
            format!("{a} {b}")
        );
        assert_eq!(s(ag.call("GetAnchorSetByOffset", &[&g, "0.9", "0.1"])), b);
        let x = s(ag.call("CreateAnnotation", &[&g, &a, &b, "w"]));
        let parts = s(ag.call("NSplitAnnotation", &[&x, "4"]));
        assert_eq!(parts.split(' ').count(), 4);
        assert_eq!(
            s(ag.call("GetAnnotationSeqByOffset", &[&g, "", "0.3"]))
                .split(' ')
                .count(),
            2
        );
        assert_eq!(
            s(ag.call("GetAnnotationSetByOffset", &[&g, "0.25"]))
                .split(' ')
                .count(),
            2
        );
        assert_eq!(
            ag.call("SetAnchorOffset", &[&a, "early"]).unwrap_err().name,
            "BadArgument"
        );
    }
}
