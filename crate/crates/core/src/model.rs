//! The object model: AGSets own timelines and graphs, timelines own signals,
//! graphs own anchors and annotations.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::feature::FeatureMap;
use crate::id::{Identifier, ObjectKind};
use crate::index::{AgIndex, AnnotationSortKey};
use crate::offset::Offset;

/// Unit recorded on anchors created without an explicit one.
pub const DEFAULT_ANCHOR_UNIT: &str = "sec";

/// Per-parent, per-kind generation counters.
#[derive(Debug, Clone, Default)]
pub(crate) struct Counters(BTreeMap<ObjectKind, u64>);

impl Counters {
    /// Advances the counter for `kind` until `taken` rejects the candidate
    /// segment, returning that segment.
    pub(crate) fn next(&mut self, kind: ObjectKind, mut taken: impl FnMut(&str) -> bool) -> String {
        let counter = self.0.entry(kind).or_insert(0);
        loop {
            *counter += 1;
            let segment = format!("{}{}", kind.name(), counter);
            if !taken(&segment) {
                return segment;
            }
        }
    }
}

/// A corpus-level container of timelines and annotation graphs.
#[derive(Debug, Clone)]
pub struct AgSet {
    pub(crate) id: Identifier,
    pub(crate) metadata: FeatureMap,
    pub(crate) timelines: IndexMap<String, Timeline>,
    pub(crate) graphs: IndexMap<String, Ag>,
    pub(crate) counters: Counters,
}

impl AgSet {
    pub(crate) fn new(id: Identifier) -> Self {
        AgSet {
            id,
            metadata: FeatureMap::new(),
            timelines: IndexMap::new(),
            graphs: IndexMap::new(),
            counters: Counters::default(),
        }
    }

    pub fn id(&self) -> &Identifier {
        &self.id
    }

    pub fn metadata(&self) -> &FeatureMap {
        &self.metadata
    }

    /// Timelines in creation order.
    pub fn timelines(&self) -> impl Iterator<Item = &Timeline> {
        self.timelines.values()
    }

    /// Graphs in creation order.
    pub fn graphs(&self) -> impl Iterator<Item = &Ag> {
        self.graphs.values()
    }

    pub fn timeline(&self, id: &str) -> Option<&Timeline> {
        self.timelines.get(id)
    }

    pub fn graph(&self, id: &str) -> Option<&Ag> {
        self.graphs.get(id)
    }

    pub(crate) fn generate(&mut self, kind: ObjectKind) -> Identifier {
        let AgSet {
            id,
            timelines,
            graphs,
            counters,
            ..
        } = self;
        let segment = counters.next(kind, |seg| {
            let full = format!("{id}:{seg}");
            timelines.contains_key(&full) || graphs.contains_key(&full)
        });
        id.child(&segment)
    }
}

/// A set of synchronized signals sharing one time axis.
#[derive(Debug, Clone)]
pub struct Timeline {
    pub(crate) id: Identifier,
    pub(crate) metadata: FeatureMap,
    pub(crate) signals: IndexMap<String, Signal>,
    pub(crate) counters: Counters,
}

impl Timeline {
    pub(crate) fn new(id: Identifier) -> Self {
        Timeline {
            id,
            metadata: FeatureMap::new(),
            signals: IndexMap::new(),
            counters: Counters::default(),
        }
    }

    pub fn id(&self) -> &Identifier {
        &self.id
    }

    pub fn metadata(&self) -> &FeatureMap {
        &self.metadata
    }

    /// Signals in creation order.
    pub fn signals(&self) -> impl Iterator<Item = &Signal> {
        self.signals.values()
    }

    pub(crate) fn generate(&mut self) -> Identifier {
        let Timeline {
            id,
            signals,
            counters,
            ..
        } = self;
        let segment = counters.next(ObjectKind::Signal, |seg| {
            signals.contains_key(&format!("{id}:{seg}"))
        });
        id.child(&segment)
    }
}

/// Description of a recorded medium. The medium itself is never decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub(crate) id: Identifier,
    pub(crate) info: SignalInfo,
    pub(crate) metadata: FeatureMap,
}

/// The descriptive fields of a signal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SignalInfo {
    pub uri: String,
    pub mime_class: String,
    pub mime_type: String,
    pub encoding: String,
    /// Sample rate or time unit, e.g. `16kHz`.
    pub unit: String,
    /// Track within the signal file; empty for single-track media.
    pub track: String,
}

impl SignalInfo {
    pub fn new(uri: impl Into<String>) -> Self {
        SignalInfo {
            uri: uri.into(),
            ..Default::default()
        }
    }
}

impl Signal {
    pub fn id(&self) -> &Identifier {
        &self.id
    }

    pub fn info(&self) -> &SignalInfo {
        &self.info
    }

    pub fn metadata(&self) -> &FeatureMap {
        &self.metadata
    }
}

/// A graph node, optionally tied to a time offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub(crate) id: Identifier,
    pub(crate) offset: Option<Offset>,
    pub(crate) unit: String,
}

impl Anchor {
    pub fn id(&self) -> &Identifier {
        &self.id
    }

    pub fn offset(&self) -> Option<Offset> {
        self.offset
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }
}

/// A labeled edge between two anchors of the same graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub(crate) id: Identifier,
    pub(crate) start: Identifier,
    pub(crate) end: Identifier,
    pub(crate) kind: String,
    pub(crate) features: FeatureMap,
}

impl Annotation {
    pub fn id(&self) -> &Identifier {
        &self.id
    }

    pub fn start(&self) -> &Identifier {
        &self.start
    }

    pub fn end(&self) -> &Identifier {
        &self.end
    }

    /// The annotation type, e.g. `word`.
    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }
}

/// An annotation graph.
#[derive(Debug, Clone)]
pub struct Ag {
    pub(crate) id: Identifier,
    pub(crate) timeline: Option<Identifier>,
    pub(crate) metadata: FeatureMap,
    pub(crate) anchors: BTreeMap<String, Anchor>,
    pub(crate) annotations: BTreeMap<String, Annotation>,
    pub(crate) index: AgIndex,
    pub(crate) counters: Counters,
}

impl Ag {
    pub(crate) fn new(id: Identifier, timeline: Option<Identifier>) -> Self {
        Ag {
            id,
            timeline,
            metadata: FeatureMap::new(),
            anchors: BTreeMap::new(),
            annotations: BTreeMap::new(),
            index: AgIndex::default(),
            counters: Counters::default(),
        }
    }

    pub fn id(&self) -> &Identifier {
        &self.id
    }

    pub fn timeline(&self) -> Option<&Identifier> {
        self.timeline.as_ref()
    }

    pub fn metadata(&self) -> &FeatureMap {
        &self.metadata
    }

    /// Anchors in identifier order.
    pub fn anchors(&self) -> impl Iterator<Item = &Anchor> {
        self.anchors.values()
    }

    /// Annotations in identifier order.
    pub fn annotations(&self) -> impl Iterator<Item = &Annotation> {
        self.annotations.values()
    }

    pub fn anchor(&self, id: &str) -> Option<&Anchor> {
        self.anchors.get(id)
    }

    pub fn annotation(&self, id: &str) -> Option<&Annotation> {
        self.annotations.get(id)
    }

    pub(crate) fn generate(&mut self, kind: ObjectKind) -> Identifier {
        let Ag {
            id,
            anchors,
            annotations,
            counters,
            ..
        } = self;
        let segment = counters.next(kind, |seg| {
            let full = format!("{id}:{seg}");
            anchors.contains_key(&full) || annotations.contains_key(&full)
        });
        id.child(&segment)
    }

    pub(crate) fn offset_of(&self, anchor: &str) -> Option<Offset> {
        self.anchors.get(anchor).and_then(|a| a.offset)
    }

    pub fn sort_key(&self, ann: &Annotation) -> AnnotationSortKey {
        AnnotationSortKey {
            start: self.offset_of(ann.start.as_str()),
            end: self.offset_of(ann.end.as_str()),
            id: ann.id.as_str().to_string(),
        }
    }

    /// Anchors in (offset, id) order, unanchored last.
    pub fn anchors_by_offset(&self) -> impl Iterator<Item = &Anchor> {
        self.index.anchors_ordered().map(|id| &self.anchors[id])
    }

    /// Annotations in sort-key order (start offset, end offset, id; missing offsets last).
    pub fn annotations_by_offset(&self) -> Vec<&Annotation> {
        let mut anns: Vec<_> = self.annotations.values().collect();
        anns.sort_by_cached_key(|a| self.sort_key(a));
        anns
    }

    pub(crate) fn insert_anchor(&mut self, anchor: Anchor) {
        self.index.insert_anchor(&anchor);
        self.anchors.insert(anchor.id.as_str().to_string(), anchor);
    }

    pub(crate) fn remove_anchor(&mut self, id: &str) -> Option<Anchor> {
        let anchor = self.anchors.remove(id)?;
        self.index.remove_anchor(&anchor);
        Some(anchor)
    }

    /// Changes an anchor's offset and re-keys every attached annotation.
    pub(crate) fn set_anchor_offset(&mut self, id: &str, offset: Option<Offset>) {
        let attached: Vec<String> = self
            .index
            .incoming(id)
            .chain(self.index.outgoing(id))
            .map(str::to_string)
            .collect();
        for ann_id in &attached {
            let ann = &self.annotations[ann_id];
            let (s, e) = (
                self.offset_of(ann.start.as_str()),
                self.offset_of(ann.end.as_str()),
            );
            self.index.remove_offsets(ann_id, s, e);
        }
        let anchor = self.anchors.get_mut(id).expect("anchor exists");
        self.index.remove_anchor(anchor);
        anchor.offset = offset;
        self.index.insert_anchor(anchor);
        for ann_id in &attached {
            let ann = &self.annotations[ann_id];
            let (s, e) = (
                self.offset_of(ann.start.as_str()),
                self.offset_of(ann.end.as_str()),
            );
            self.index.insert_offsets(ann_id, s, e);
        }
    }

    pub(crate) fn insert_annotation(&mut self, ann: Annotation) {
        let (s, e) = (
            self.offset_of(ann.start.as_str()),
            self.offset_of(ann.end.as_str()),
        );
        self.index.insert_annotation(&ann, s, e);
        self.annotations.insert(ann.id.as_str().to_string(), ann);
    }

    pub(crate) fn remove_annotation(&mut self, id: &str) -> Option<Annotation> {
        let ann = self.annotations.remove(id)?;
        let (s, e) = (
            self.offset_of(ann.start.as_str()),
            self.offset_of(ann.end.as_str()),
        );
        self.index.remove_annotation(&ann, s, e);
        Some(ann)
    }

    pub(crate) fn set_annotation_end(&mut self, id: &str, new_end: Identifier) {
        let ann = &self.annotations[id];
        let s = self.offset_of(ann.start.as_str());
        let old_end = ann.end.clone();
        self.index
            .remove_offsets(id, s, self.offset_of(old_end.as_str()));
        self.index.move_end(id, old_end.as_str(), new_end.as_str());
        self.index
            .insert_offsets(id, s, self.offset_of(new_end.as_str()));
        self.annotations.get_mut(id).expect("annotation exists").end = new_end;
    }

    pub(crate) fn set_annotation_feature(&mut self, id: &str, name: &str, value: &str) {
        let ann = self.annotations.get_mut(id).expect("annotation exists");
        if let Some(old) = ann.features.set(name, value) {
            self.index.remove_feature(id, name, &old);
        }
        self.index.insert_feature(id, name, value);
    }

    pub(crate) fn remove_annotation_feature(&mut self, id: &str, name: &str) -> Option<String> {
        let ann = self.annotations.get_mut(id).expect("annotation exists");
        let old = ann.features.remove(name)?;
        self.index.remove_feature(id, name, &old);
        Some(old)
    }

    /// True when every index equals a from-scratch rebuild.
    pub fn indexes_consistent(&self) -> bool {
        self.index == AgIndex::rebuild(self.anchors.values(), self.annotations.values())
    }
}
