//! The annotation graph API: lifecycle, anchor and annotation editing,
//! feature access, offset queries and XML export, all keyed by identifier
//! strings.
//!
//! Creation functions accept either the parent's identifier (a fresh child
//! identifier is generated) or a full child identifier, which is used when free
//! and replaced by a generated one otherwise.

use std::collections::{BTreeSet, HashSet};

use crate::error::{AgError, Result};
use crate::id::{parse_at_depth, Identifier, ObjectKind};
use crate::model::{
    Ag, AgSet, Anchor, Annotation, Signal, SignalInfo, Timeline, DEFAULT_ANCHOR_UNIT,
};
use crate::offset::Offset;
use crate::registry::{wrong_kind, ObjectRef, Registry};
use crate::FeatureMap;

fn ids<'a>(it: impl IntoIterator<Item = &'a str>) -> Vec<Identifier> {
    it.into_iter()
        .map(|s| Identifier::parse(s).expect("stored ids are valid"))
        .collect()
}

impl Registry {
    /// Splits a creation argument into (parent, requested child id).
    fn creation_target(
        &self,
        id: &str,
        kind: ObjectKind,
    ) -> Result<(Identifier, Option<Identifier>)> {
        let ident = Identifier::parse(id)?;
        let (parent, requested) = if ident.depth() == kind.depth() {
            let parent = Identifier::parse(ident.parent().expect("child ids have a parent"))?;
            (parent, Some(ident))
        } else if ident.depth() + 1 == kind.depth() {
            (ident, None)
        } else {
            return Err(AgError::malformed(
                id,
                format!("expected a {kind} id or its parent's id"),
            ));
        };
        Ok((parent, requested))
    }

    /// Resolves the final identifier for a new child: the requested one if
    /// free, a generated one otherwise.
    fn place(
        &mut self,
        parent: &Identifier,
        requested: Option<Identifier>,
        kind: ObjectKind,
    ) -> Result<Identifier> {
        let taken = |reg: &Registry, id: &Identifier| reg.resolve(id.as_str()).is_ok();
        match requested {
            Some(id) if !taken(self, &id) => Ok(id),
            _ => self.generate_child_id(parent.as_str(), kind),
        }
    }

    // ---- AGSet, AG, Timeline, Signal -------------------------------------

    pub fn create_agset(&mut self, id: &str) -> Result<Identifier> {
        let id = parse_at_depth(id, 1, "an AGSet id")?;
        if self.agsets.contains_key(id.as_str()) {
            return Err(AgError::DuplicateId(id.into_string()));
        }
        self.agsets
            .insert(id.as_str().to_string(), AgSet::new(id.clone()));
        Ok(id)
    }

    pub fn create_ag(&mut self, id: &str, timeline: Option<&str>) -> Result<Identifier> {
        let (parent, requested) = self.creation_target(id, ObjectKind::Ag)?;
        self.agset(parent.as_str())
            .ok_or_else(|| AgError::NoSuchObject(parent.to_string()))?;
        let timeline = match timeline {
            Some(t) => {
                let tl = self.timeline(t)?;
                if tl.id().agset() != parent.as_str() {
                    return Err(AgError::BadArgument(format!(
                        "timeline {t} belongs to another AGSet"
                    )));
                }
                Some(tl.id().clone())
            }
            None => None,
        };
        let id = self.place(&parent, requested, ObjectKind::Ag)?;
        self.agset_mut(parent.as_str())?
            .graphs
            .insert(id.as_str().to_string(), Ag::new(id.clone(), timeline));
        Ok(id)
    }

    pub fn create_timeline(&mut self, id: &str) -> Result<Identifier> {
        let (parent, requested) = self.creation_target(id, ObjectKind::Timeline)?;
        self.agset(parent.as_str())
            .ok_or_else(|| AgError::NoSuchObject(parent.to_string()))?;
        let id = self.place(&parent, requested, ObjectKind::Timeline)?;
        self.agset_mut(parent.as_str())?
            .timelines
            .insert(id.as_str().to_string(), Timeline::new(id.clone()));
        Ok(id)
    }

    pub fn create_signal(&mut self, id: &str, info: SignalInfo) -> Result<Identifier> {
        let (parent, requested) = self.creation_target(id, ObjectKind::Signal)?;
        self.timeline(parent.as_str())?;
        if info.uri.is_empty() {
            return Err(AgError::BadArgument("signal uri must not be empty".into()));
        }
        let id = self.place(&parent, requested, ObjectKind::Signal)?;
        let signal = Signal {
            id: id.clone(),
            info,
            metadata: FeatureMap::new(),
        };
        self.timeline_mut(parent.as_str())?
            .signals
            .insert(id.as_str().to_string(), signal);
        Ok(id)
    }

    /// Signal ids of a timeline, in creation order.
    pub fn get_signals(&self, timeline: &str) -> Result<Vec<Identifier>> {
        Ok(self
            .timeline(timeline)?
            .signals()
            .map(|s| s.id().clone())
            .collect())
    }

    // ---- Anchors ---------------------------------------------------------

    /// Creates an anchor with no offset.
    pub fn create_anchor(&mut self, id: &str) -> Result<Identifier> {
        let (parent, requested) = self.creation_target(id, ObjectKind::Anchor)?;
        self.ag(parent.as_str())?;
        let id = self.place(&parent, requested, ObjectKind::Anchor)?;
        self.ag_mut(parent.as_str())?.insert_anchor(Anchor {
            id: id.clone(),
            offset: None,
            unit: DEFAULT_ANCHOR_UNIT.to_string(),
        });
        Ok(id)
    }

    /// Sets an anchor's offset. Fails with `OrderViolation` if an attached
    /// annotation whose other end is anchored would then end before it starts.
    pub fn set_anchor_offset(&mut self, anchor: &str, offset: Offset) -> Result<()> {
        if offset.is_negative() {
            return Err(AgError::BadArgument(format!("negative offset {offset}")));
        }
        self.anchor(anchor)?;
        let ag = self.owner_of(anchor)?;
        for ann_id in ag.index.incoming(anchor) {
            let ann = &ag.annotations[ann_id];
            if let Some(start) = ag.offset_of(ann.start.as_str()) {
                if start > offset {
                    return Err(AgError::OrderViolation(format!(
                        "annotation {ann_id} would end at {offset}, before its start {start}"
                    )));
                }
            }
        }
        for ann_id in ag.index.outgoing(anchor) {
            let ann = &ag.annotations[ann_id];
            if let Some(end) = ag.offset_of(ann.end.as_str()) {
                if end < offset {
                    return Err(AgError::OrderViolation(format!(
                        "annotation {ann_id} would start at {offset}, after its end {end}"
                    )));
                }
            }
        }
        let graph = ag.id.clone();
        self.ag_mut(graph.as_str())?
            .set_anchor_offset(anchor, Some(offset));
        Ok(())
    }

    /// Removes an anchor's offset, leaving it ordered only by graph structure.
    pub fn unset_anchor_offset(&mut self, anchor: &str) -> Result<()> {
        self.anchor(anchor)?;
        let graph = self.owner_of(anchor)?.id.clone();
        self.ag_mut(graph.as_str())?.set_anchor_offset(anchor, None);
        Ok(())
    }

    pub fn get_anchor_offset(&self, anchor: &str) -> Result<Option<Offset>> {
        Ok(self.anchor(anchor)?.offset())
    }

    pub fn set_anchor_unit(&mut self, anchor: &str, unit: &str) -> Result<()> {
        self.anchor(anchor)?;
        let graph = self.owner_of(anchor)?.id.clone();
        let ag = self.ag_mut(graph.as_str())?;
        ag.anchors.get_mut(anchor).expect("anchor exists").unit = unit.to_string();
        Ok(())
    }

    // ---- Annotations -----------------------------------------------------

    /// Checks that `anchor` is an anchor of graph `ag`.
    fn check_member(&self, ag: &Ag, anchor: &str, start: &str, end: &str) -> Result<()> {
        if ag.anchors.contains_key(anchor) {
            return Ok(());
        }
        match self.resolve(anchor) {
            Ok(ObjectRef::Anchor(_)) => Err(AgError::CrossGraphAnchors {
                graph: ag.id.to_string(),
                start: start.to_string(),
                end: end.to_string(),
            }),
            Ok(other) => Err(wrong_kind(anchor, other.kind(), ObjectKind::Anchor)),
            Err(e) => Err(e),
        }
    }

    pub fn create_annotation(
        &mut self,
        id: &str,
        start: &str,
        end: &str,
        kind: &str,
    ) -> Result<Identifier> {
        let (parent, requested) = self.creation_target(id, ObjectKind::Annotation)?;
        let ag = self.ag(parent.as_str())?;
        self.check_member(ag, start, start, end)?;
        self.check_member(ag, end, start, end)?;
        if kind.is_empty() {
            return Err(AgError::BadArgument(
                "annotation type must not be empty".into(),
            ));
        }
        if let (Some(s), Some(e)) = (ag.offset_of(start), ag.offset_of(end)) {
            if s > e {
                return Err(AgError::OrderViolation(format!(
                    "start anchor {start} at {s} is after end anchor {end} at {e}"
                )));
            }
        }
        if reaches(ag, end, start) {
            return Err(AgError::CycleError {
                start: start.to_string(),
                end: end.to_string(),
            });
        }
        let id = self.place(&parent, requested, ObjectKind::Annotation)?;
        let ann = Annotation {
            id: id.clone(),
            start: Identifier::parse(start)?,
            end: Identifier::parse(end)?,
            kind: kind.to_string(),
            features: FeatureMap::new(),
        };
        self.ag_mut(parent.as_str())?.insert_annotation(ann);
        Ok(id)
    }

    /// Copies an annotation under a fresh identifier: same anchors, same type,
    /// independent copy of the features.
    pub fn copy_annotation(&mut self, annotation: &str) -> Result<Identifier> {
        let original = self.annotation(annotation)?.clone();
        let graph = self.owner_of(annotation)?.id.clone();
        let ag = self.ag_mut(graph.as_str())?;
        let id = ag.generate(ObjectKind::Annotation);
        ag.insert_annotation(Annotation {
            id: id.clone(),
            ..original
        });
        Ok(id)
    }

    /// Splits an annotation in two at a fresh middle anchor; returns the
    /// original id followed by the new one.
    pub fn split_annotation(&mut self, annotation: &str) -> Result<(Identifier, Identifier)> {
        let mut parts = self.nsplit_annotation(annotation, 2)?;
        let second = parts.pop().expect("two parts");
        let first = parts.pop().expect("two parts");
        Ok((first, second))
    }

    /// Splits an annotation into `n` consecutive annotations carrying the same
    /// type and features. When both ends are anchored the `n - 1` new anchors
    /// subdivide the interval equally; otherwise they have no offset. Returns
    /// all `n` ids in order, the original first.
    pub fn nsplit_annotation(&mut self, annotation: &str, n: usize) -> Result<Vec<Identifier>> {
        if n < 2 {
            return Err(AgError::BadArgument(format!(
                "cannot split into {n} part(s)"
            )));
        }
        let original = self.annotation(annotation)?.clone();
        let graph = self.owner_of(annotation)?.id.clone();
        let ag = self.ag_mut(graph.as_str())?;
        let start = ag.anchors[original.start.as_str()].clone();
        let end = ag.anchors[original.end.as_str()].clone();
        let n = n as i64;

        let mut boundaries = Vec::with_capacity(n as usize + 1);
        boundaries.push(original.start.clone());
        for k in 1..n {
            let offset = match (start.offset, end.offset) {
                (Some(s), Some(e)) => Some(s.lerp(e, k, n)),
                _ => None,
            };
            let id = ag.generate(ObjectKind::Anchor);
            ag.insert_anchor(Anchor {
                id: id.clone(),
                offset,
                unit: end.unit.clone(),
            });
            boundaries.push(id);
        }
        boundaries.push(original.end.clone());

        ag.set_annotation_end(annotation, boundaries[1].clone());
        let mut result = vec![original.id.clone()];
        for pair in boundaries[1..].windows(2) {
            let id = ag.generate(ObjectKind::Annotation);
            ag.insert_annotation(Annotation {
                id: id.clone(),
                start: pair[0].clone(),
                end: pair[1].clone(),
                kind: original.kind.clone(),
                features: original.features.clone(),
            });
            result.push(id);
        }
        Ok(result)
    }

    // ---- Existence and deletion ------------------------------------------

    /// True iff `id` names a live object. Malformed ids simply do not exist.
    pub fn exists(&self, id: &str) -> bool {
        self.resolve(id).is_ok()
    }

    /// Deletes an object. AGSets take their timelines and graphs with them and
    /// graphs take their anchors and annotations; anchors that still carry
    /// annotations and timelines that graphs are bound to are refused.
    pub fn delete(&mut self, id: &str) -> Result<()> {
        let kind = self.kind_of(id)?;
        let ident = Identifier::parse(id)?;
        match kind {
            ObjectKind::AgSet => {
                self.agsets.shift_remove(id);
            }
            ObjectKind::Timeline => {
                let set = self.agset_mut(ident.agset())?;
                if let Some(ag) = set
                    .graphs
                    .values()
                    .find(|g| g.timeline.as_ref() == Some(&ident))
                {
                    return Err(AgError::TimelineInUse {
                        timeline: id.to_string(),
                        graph: ag.id.to_string(),
                    });
                }
                set.timelines.shift_remove(id);
            }
            ObjectKind::Ag => {
                self.agset_mut(ident.agset())?.graphs.shift_remove(id);
            }
            ObjectKind::Signal => {
                let parent = ident.parent().expect("signals have a parent");
                self.timeline_mut(parent)?.signals.shift_remove(id);
            }
            ObjectKind::Anchor => {
                let graph = self.owner_of(id)?.id.clone();
                let ag = self.ag_mut(graph.as_str())?;
                if let Some(ann) = ag.index.incoming(id).chain(ag.index.outgoing(id)).next() {
                    return Err(AgError::AnchorInUse {
                        anchor: id.to_string(),
                        annotation: ann.to_string(),
                    });
                }
                ag.remove_anchor(id);
            }
            ObjectKind::Annotation => {
                let graph = self.owner_of(id)?.id.clone();
                self.ag_mut(graph.as_str())?.remove_annotation(id);
            }
        }
        Ok(())
    }

    // ---- Features --------------------------------------------------------

    fn features_of(&self, id: &str) -> Result<&FeatureMap> {
        Ok(match self.resolve(id)? {
            ObjectRef::AgSet(s) => &s.metadata,
            ObjectRef::Timeline(t) => &t.metadata,
            ObjectRef::Signal(s) => &s.metadata,
            ObjectRef::Ag(ag) => &ag.metadata,
            ObjectRef::Annotation(a) => &a.features,
            ObjectRef::Anchor(_) => {
                return Err(AgError::malformed(id, "anchors carry no features"))
            }
        })
    }

    fn metadata_mut(&mut self, id: &str, kind: ObjectKind) -> Result<&mut FeatureMap> {
        let ident = Identifier::parse(id)?;
        Ok(match kind {
            ObjectKind::AgSet => &mut self.agset_mut(id)?.metadata,
            ObjectKind::Timeline => &mut self.timeline_mut(id)?.metadata,
            ObjectKind::Ag => &mut self.ag_mut(id)?.metadata,
            ObjectKind::Signal => {
                let parent = ident.parent().expect("signals have a parent");
                &mut self
                    .timeline_mut(parent)?
                    .signals
                    .get_mut(id)
                    .expect("signal exists")
                    .metadata
            }
            ObjectKind::Anchor | ObjectKind::Annotation => {
                unreachable!("not a metadata carrier")
            }
        })
    }

    /// Sets a feature of an annotation, or a metadata feature of an AGSet,
    /// AG, timeline or signal.
    pub fn set_feature(&mut self, id: &str, name: &str, value: &str) -> Result<()> {
        if name.is_empty() {
            return Err(AgError::BadArgument(
                "feature name must not be empty".into(),
            ));
        }
        self.features_of(id)?;
        match self.kind_of(id)? {
            ObjectKind::Annotation => {
                let graph = self.owner_of(id)?.id.clone();
                self.ag_mut(graph.as_str())?
                    .set_annotation_feature(id, name, value);
            }
            kind => {
                self.metadata_mut(id, kind)?.set(name, value);
            }
        }
        Ok(())
    }

    pub fn get_feature(&self, id: &str, name: &str) -> Result<String> {
        self.features_of(id)?
            .get(name)
            .map(str::to_string)
            .ok_or_else(|| AgError::NoSuchFeature {
                id: id.to_string(),
                name: name.to_string(),
            })
    }

    pub fn exists_feature(&self, id: &str, name: &str) -> Result<bool> {
        Ok(self.features_of(id)?.contains(name))
    }

    pub fn delete_feature(&mut self, id: &str, name: &str) -> Result<()> {
        if !self.exists_feature(id, name)? {
            return Err(AgError::NoSuchFeature {
                id: id.to_string(),
                name: name.to_string(),
            });
        }
        match self.kind_of(id)? {
            ObjectKind::Annotation => {
                let graph = self.owner_of(id)?.id.clone();
                self.ag_mut(graph.as_str())?
                    .remove_annotation_feature(id, name);
            }
            kind => {
                self.metadata_mut(id, kind)?.remove(name);
            }
        }
        Ok(())
    }

    /// All features of an object, by name.
    pub fn get_features(&self, id: &str) -> Result<FeatureMap> {
        self.features_of(id).cloned()
    }

    // ---- Queries ---------------------------------------------------------

    /// All anchors of a graph, by offset then id, unanchored ones last.
    pub fn get_anchor_set(&self, ag: &str) -> Result<Vec<Identifier>> {
        Ok(ids(self.ag(ag)?.index.anchors_ordered()))
    }

    /// Anchors whose offset lies in `[offset - epsilon, offset + epsilon]`.
    pub fn get_anchor_set_by_offset(
        &self,
        ag: &str,
        offset: Offset,
        epsilon: Offset,
    ) -> Result<Vec<Identifier>> {
        if epsilon.is_negative() {
            return Err(AgError::BadArgument(format!("negative epsilon {epsilon}")));
        }
        let graph = self.ag(ag)?;
        let lo = offset.saturating_sub(epsilon);
        let hi = offset.saturating_add(epsilon);
        Ok(ids(graph.index.anchors_between(lo, hi).map(|(_, id)| id)))
    }

    /// All anchors at the minimal distance from `offset`. When the nearest
    /// offsets below and above are equally far, anchors at both are returned.
    pub fn get_anchor_set_nearest_offset(
        &self,
        ag: &str,
        offset: Offset,
    ) -> Result<Vec<Identifier>> {
        let graph = self.ag(ag)?;
        if !graph.index.has_anchored() {
            return Err(AgError::EmptyDomain(ag.to_string()));
        }
        let (below, above) = graph.index.neighbours(offset);
        let best = [below, above]
            .into_iter()
            .flatten()
            .map(|o| o.distance(offset))
            .min()
            .expect("at least one anchored anchor");
        let mut targets: Vec<Offset> = [below, above]
            .into_iter()
            .flatten()
            .filter(|o| o.distance(offset) == best)
            .collect();
        targets.dedup();
        Ok(ids(targets.into_iter().flat_map(|o| {
            graph.index.anchors_between(o, o).map(|(_, id)| id)
        })))
    }

    /// Annotations ending at `anchor`, by id.
    pub fn get_incoming_annotation_set(&self, anchor: &str) -> Result<Vec<Identifier>> {
        self.anchor(anchor)?;
        Ok(ids(self.owner_of(anchor)?.index.incoming(anchor)))
    }

    /// Annotations starting at `anchor`, by id.
    pub fn get_outgoing_annotation_set(&self, anchor: &str) -> Result<Vec<Identifier>> {
        self.anchor(anchor)?;
        Ok(ids(self.owner_of(anchor)?.index.outgoing(anchor)))
    }

    /// Fully anchored annotations with `start <= offset <= end`, in sort-key order.
    pub fn get_annotation_set_by_offset(
        &self,
        ag: &str,
        offset: Offset,
    ) -> Result<Vec<Identifier>> {
        let graph = self.ag(ag)?;
        Ok(ids(graph.index.stabbing(offset).map(|k| k.id.as_str())))
    }

    /// Annotations with an anchored start, optionally restricted to
    /// `begin <= start` and `start <= end` (both inclusive), sorted by start
    /// offset, end offset and id.
    pub fn get_annotation_seq_by_offset(
        &self,
        ag: &str,
        begin: Option<Offset>,
        end: Option<Offset>,
    ) -> Result<Vec<Identifier>> {
        if let (Some(b), Some(e)) = (begin, end) {
            if b > e {
                return Err(AgError::BadArgument(format!("begin {b} is after end {e}")));
            }
        }
        let graph = self.ag(ag)?;
        Ok(ids(graph
            .index
            .starting_between(begin, end)
            .map(|k| k.id.as_str())))
    }

    /// Annotations whose feature `name` equals `value`, by id.
    pub fn get_annotations_by_feature(
        &self,
        ag: &str,
        name: &str,
        value: &str,
    ) -> Result<Vec<Identifier>> {
        Ok(ids(self.ag(ag)?.index.with_feature(name, value)))
    }

    /// Annotations of the given type, by id. Types are not indexed.
    pub fn get_annotations_by_type(&self, ag: &str, kind: &str) -> Result<Vec<Identifier>> {
        Ok(self
            .ag(ag)?
            .annotations()
            .filter(|a| a.kind == kind)
            .map(|a| a.id.clone())
            .collect())
    }

    /// The XML interchange serialization of an AGSet, or of one graph wrapped
    /// in its AGSet.
    pub fn to_xml(&self, id: &str) -> Result<String> {
        crate::io::aif::to_xml(self, id)
    }
}

/// True when `to` is reachable from `from` along annotation edges.
fn reaches(ag: &Ag, from: &str, to: &str) -> bool {
    if from == to {
        return true;
    }
    let mut seen: HashSet<&str> = HashSet::new();
    let mut stack = vec![from];
    while let Some(anchor) = stack.pop() {
        for ann in ag.index.outgoing(anchor) {
            let next = ag.annotations[ann].end.as_str();
            if next == to {
                return true;
            }
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    false
}

/// Anchors of a graph that lie on a directed cycle, found by topological sort.
/// Empty for every graph built through the API.
pub fn cyclic_anchors(ag: &Ag) -> BTreeSet<String> {
    crate::graph::cyclic_nodes(
        ag.anchors.keys().map(String::as_str),
        ag.annotations
            .values()
            .map(|a| (a.start.as_str(), a.end.as_str())),
    )
}
