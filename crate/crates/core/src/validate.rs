//! Structural checks over AIF documents.
//!
//! [`validate_document`] inspects a parsed document without building it, so
//! it can report every problem in a file that the loader would reject at the
//! first one. A document that passes the structural checks is also built in a
//! scratch registry and its indexes compared against a fresh rebuild.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::graph::strongly_connected_components;
use crate::id::{Identifier, ObjectKind};
use crate::io::aif::{AgElem, AifDocument};
use crate::io::IoError;
use crate::registry::Registry;

/// One violation, attributed to the object it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub id: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.message)
    }
}

#[derive(Default)]
struct Report(Vec<Diagnostic>);

impl Report {
    fn push(&mut self, id: &str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            id: id.to_string(),
            message: message.into(),
        });
    }

    /// Checks that `id` is well formed, names a `kind` and sits under `parent`.
    fn placed(&mut self, id: &str, kind: ObjectKind, parent: Option<&str>) -> bool {
        let parsed = match Identifier::parse(id) {
            Ok(p) => p,
            Err(e) => {
                self.push(id, e.to_string());
                return false;
            }
        };
        if parsed.depth() != kind.depth() {
            self.push(
                id,
                format!(
                    "has {} segment(s), a {} id needs {}",
                    parsed.depth(),
                    kind.name(),
                    kind.depth()
                ),
            );
            return false;
        }
        if parsed.parent() != parent {
            self.push(
                id,
                format!("is not a child of {}", parent.unwrap_or("the registry")),
            );
            return false;
        }
        true
    }
}

/// Parses `text` as AIF and validates it. Parse failures are returned as
/// errors rather than diagnostics.
pub fn validate_text(text: &str) -> Result<Vec<Diagnostic>, IoError> {
    Ok(validate_document(&AifDocument::parse(text)?))
}

/// Every violation in `doc`, in document order. Empty means the document is
/// sound.
pub fn validate_document(doc: &AifDocument) -> Vec<Diagnostic> {
    let mut r = Report::default();
    r.placed(&doc.id, ObjectKind::AgSet, None);

    let mut children = BTreeSet::new();
    let mut timelines = BTreeSet::new();
    for t in &doc.timelines {
        if !children.insert(t.id.as_str()) {
            r.push(&t.id, "duplicate identifier");
        }
        timelines.insert(t.id.as_str());
        r.placed(&t.id, ObjectKind::Timeline, Some(&doc.id));
        let mut signals = BTreeSet::new();
        for s in &t.signals {
            if !signals.insert(s.id.as_str()) {
                r.push(&s.id, "duplicate identifier");
            }
            r.placed(&s.id, ObjectKind::Signal, Some(&t.id));
        }
    }
    for g in &doc.graphs {
        if !children.insert(g.id.as_str()) {
            r.push(&g.id, "duplicate identifier");
        }
        r.placed(&g.id, ObjectKind::Ag, Some(&doc.id));
        if let Some(t) = &g.timeline {
            if !timelines.contains(t.as_str()) {
                r.push(&g.id, format!("refers to missing timeline {t}"));
            }
        }
        check_graph(&mut r, g);
    }

    if r.0.is_empty() {
        let mut scratch = Registry::new();
        match doc.apply(&mut scratch, None) {
            Ok(_) => {
                for id in scratch.inconsistent_indexes() {
                    r.push(id.as_str(), "indexes differ from a rebuild");
                }
            }
            Err(e) => r.push(&doc.id, format!("cannot be built: {e}")),
        }
    }
    r.0
}

fn check_graph(r: &mut Report, g: &AgElem) {
    let mut names = BTreeSet::new();
    let mut offsets = BTreeMap::new();
    for a in &g.anchors {
        if !names.insert(a.id.as_str()) {
            r.push(&a.id, "duplicate identifier");
        }
        r.placed(&a.id, ObjectKind::Anchor, Some(&g.id));
        offsets.insert(a.id.as_str(), a.offset);
        if let Some(o) = a.offset {
            if o.is_negative() {
                r.push(&a.id, format!("negative offset {o}"));
            }
        }
    }
    let mut edges = Vec::new();
    for ann in &g.annotations {
        if !names.insert(ann.id.as_str()) {
            r.push(&ann.id, "duplicate identifier");
        }
        r.placed(&ann.id, ObjectKind::Annotation, Some(&g.id));
        if ann.kind.is_empty() {
            r.push(&ann.id, "empty annotation type");
        }
        let mut resolved = true;
        for (end, anchor) in [("start", &ann.start), ("end", &ann.end)] {
            if !offsets.contains_key(anchor.as_str()) {
                r.push(&ann.id, format!("dangling {end} anchor reference {anchor}"));
                resolved = false;
            }
        }
        if !resolved {
            continue;
        }
        if let (Some(Some(s)), Some(Some(e))) = (
            offsets.get(ann.start.as_str()),
            offsets.get(ann.end.as_str()),
        ) {
            if e < s {
                r.push(&ann.id, format!("end offset {e} precedes start offset {s}"));
            }
        }
        edges.push((ann.start.as_str(), ann.end.as_str()));
    }

    let components = strongly_connected_components(offsets.keys().copied(), edges.iter().copied());
    let mut component_of = BTreeMap::new();
    for (i, comp) in components.iter().enumerate() {
        for node in comp {
            component_of.insert(*node, i);
        }
    }
    for ann in &g.annotations {
        let (Some(&cs), Some(&ce)) = (
            component_of.get(ann.start.as_str()),
            component_of.get(ann.end.as_str()),
        ) else {
            continue;
        };
        if cs == ce && (components[cs].len() > 1 || ann.start == ann.end) {
            r.push(
                &ann.id,
                format!("lies on a cycle through {}", components[cs].join(" ")),
            );
        }
    }
}
