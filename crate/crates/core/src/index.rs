//! Per-graph indexes: anchors by offset, adjacency, annotations by start
//! offset, and an inverted feature index.
//!
//! Every index can be rebuilt from object state; [`AgIndex::rebuild`] is the
//! reference used by consistency checks.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Anchor, Annotation};
use crate::offset::Offset;

/// Sort key for annotations: start offset, then end offset, then identifier.
/// Missing offsets sort after every present one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotationSortKey {
    pub start: Option<Offset>,
    pub end: Option<Offset>,
    pub id: String,
}

fn cmp_present_first(a: Option<Offset>, b: Option<Offset>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

impl Ord for AnnotationSortKey {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_present_first(self.start, other.start)
            .then_with(|| cmp_present_first(self.end, other.end))
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl PartialOrd for AnnotationSortKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct AgIndex {
    anchors_by_offset: BTreeSet<(Offset, String)>,
    unanchored: BTreeSet<String>,
    incoming: BTreeMap<String, BTreeSet<String>>,
    outgoing: BTreeMap<String, BTreeSet<String>>,
    by_start: BTreeSet<AnnotationSortKey>,
    /// Multiset of spans (end - start) of fully anchored annotations, so that a
    /// stabbing query only has to look back as far as the longest one.
    spans: BTreeMap<i64, usize>,
    features: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
}

fn insert_multi(map: &mut BTreeMap<String, BTreeSet<String>>, key: &str, value: &str) {
    map.entry(key.to_string())
        .or_default()
        .insert(value.to_string());
}

fn remove_multi(map: &mut BTreeMap<String, BTreeSet<String>>, key: &str, value: &str) {
    if let Some(set) = map.get_mut(key) {
        set.remove(value);
        if set.is_empty() {
            map.remove(key);
        }
    }
}

impl AgIndex {
    pub(crate) fn rebuild<'a>(
        anchors: impl IntoIterator<Item = &'a Anchor>,
        annotations: impl IntoIterator<Item = &'a Annotation>,
    ) -> AgIndex {
        let mut index = AgIndex::default();
        let mut offsets = BTreeMap::new();
        for anchor in anchors {
            index.insert_anchor(anchor);
            offsets.insert(anchor.id().as_str(), anchor.offset());
        }
        for ann in annotations {
            let start = offsets.get(ann.start().as_str()).copied().flatten();
            let end = offsets.get(ann.end().as_str()).copied().flatten();
            index.insert_annotation(ann, start, end);
        }
        index
    }

    pub(crate) fn insert_anchor(&mut self, anchor: &Anchor) {
        let id = anchor.id().as_str().to_string();
        match anchor.offset() {
            Some(o) => self.anchors_by_offset.insert((o, id)),
            None => self.unanchored.insert(id),
        };
    }

    pub(crate) fn remove_anchor(&mut self, anchor: &Anchor) {
        let id = anchor.id().as_str();
        match anchor.offset() {
            Some(o) => self.anchors_by_offset.remove(&(o, id.to_string())),
            None => self.unanchored.remove(id),
        };
    }

    pub(crate) fn insert_annotation(
        &mut self,
        ann: &Annotation,
        start: Option<Offset>,
        end: Option<Offset>,
    ) {
        let id = ann.id().as_str();
        insert_multi(&mut self.outgoing, ann.start().as_str(), id);
        insert_multi(&mut self.incoming, ann.end().as_str(), id);
        self.insert_offsets(id, start, end);
        for (name, value) in ann.features().iter() {
            self.insert_feature(id, name, value);
        }
    }

    pub(crate) fn remove_annotation(
        &mut self,
        ann: &Annotation,
        start: Option<Offset>,
        end: Option<Offset>,
    ) {
        let id = ann.id().as_str();
        remove_multi(&mut self.outgoing, ann.start().as_str(), id);
        remove_multi(&mut self.incoming, ann.end().as_str(), id);
        self.remove_offsets(id, start, end);
        for (name, value) in ann.features().iter() {
            self.remove_feature(id, name, value);
        }
    }

    /// Offset-keyed entries only; adjacency and features are untouched.
    pub(crate) fn insert_offsets(&mut self, id: &str, start: Option<Offset>, end: Option<Offset>) {
        if start.is_some() {
            self.by_start.insert(AnnotationSortKey {
                start,
                end,
                id: id.to_string(),
            });
        }
        if let (Some(s), Some(e)) = (start, end) {
            *self.spans.entry(span(s, e)).or_default() += 1;
        }
    }

    pub(crate) fn remove_offsets(&mut self, id: &str, start: Option<Offset>, end: Option<Offset>) {
        if start.is_some() {
            self.by_start.remove(&AnnotationSortKey {
                start,
                end,
                id: id.to_string(),
            });
        }
        if let (Some(s), Some(e)) = (start, end) {
            let len = span(s, e);
            if let Some(count) = self.spans.get_mut(&len) {
                *count -= 1;
                if *count == 0 {
                    self.spans.remove(&len);
                }
            }
        }
    }

    pub(crate) fn insert_feature(&mut self, id: &str, name: &str, value: &str) {
        self.features
            .entry(name.to_string())
            .or_default()
            .entry(value.to_string())
            .or_default()
            .insert(id.to_string());
    }

    pub(crate) fn remove_feature(&mut self, id: &str, name: &str, value: &str) {
        if let Some(values) = self.features.get_mut(name) {
            remove_multi(values, value, id);
            if values.is_empty() {
                self.features.remove(name);
            }
        }
    }

    /// Re-points adjacency when an annotation's end anchor changes.
    pub(crate) fn move_end(&mut self, id: &str, old_end: &str, new_end: &str) {
        remove_multi(&mut self.incoming, old_end, id);
        insert_multi(&mut self.incoming, new_end, id);
    }

    /// Anchors ordered by offset, then id; unanchored anchors last, by id.
    pub(crate) fn anchors_ordered(&self) -> impl Iterator<Item = &str> {
        self.anchors_by_offset
            .iter()
            .map(|(_, id)| id.as_str())
            .chain(self.unanchored.iter().map(String::as_str))
    }

    /// Anchored anchors with `lo <= offset <= hi`, in (offset, id) order.
    pub(crate) fn anchors_between(
        &self,
        lo: Offset,
        hi: Offset,
    ) -> impl Iterator<Item = (Offset, &str)> {
        self.anchors_by_offset
            .range((lo, String::new())..)
            .take_while(move |(o, _)| *o <= hi)
            .map(|(o, id)| (*o, id.as_str()))
    }

    /// The anchored offset(s) closest to `query`: the greatest offset at or
    /// below it and the least offset at or above it.
    pub(crate) fn neighbours(&self, query: Offset) -> (Option<Offset>, Option<Offset>) {
        let below = self
            .anchors_by_offset
            .range(..(query.saturating_add(Offset::EPSILON), String::new()))
            .next_back()
            .map(|(o, _)| *o);
        let above = self
            .anchors_by_offset
            .range((query, String::new())..)
            .next()
            .map(|(o, _)| *o);
        (below, above)
    }

    pub(crate) fn has_anchored(&self) -> bool {
        !self.anchors_by_offset.is_empty()
    }

    pub(crate) fn incoming(&self, anchor: &str) -> impl Iterator<Item = &str> {
        self.incoming
            .get(anchor)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub(crate) fn outgoing(&self, anchor: &str) -> impl Iterator<Item = &str> {
        self.outgoing
            .get(anchor)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// Annotations with an anchored start in `[begin, end]`, in sort-key order.
    pub(crate) fn starting_between(
        &self,
        begin: Option<Offset>,
        end: Option<Offset>,
    ) -> impl Iterator<Item = &AnnotationSortKey> {
        let lower = AnnotationSortKey {
            start: Some(begin.unwrap_or(Offset::MIN)),
            end: Some(Offset::MIN),
            id: String::new(),
        };
        let upper = end.unwrap_or(Offset::MAX);
        self.by_start
            .range(lower..)
            .take_while(move |k| k.start.is_some_and(|s| s <= upper))
    }

    /// Fully anchored annotations with `start <= t <= end`, in sort-key order.
    pub(crate) fn stabbing(&self, t: Offset) -> impl Iterator<Item = &AnnotationSortKey> {
        let longest = self.spans.keys().next_back().copied().unwrap_or(0);
        let from = t.saturating_sub(Offset::from_nanos(longest));
        self.starting_between(Some(from), Some(t))
            .filter(move |k| k.end.is_some_and(|e| e >= t))
    }

    pub(crate) fn with_feature(&self, name: &str, value: &str) -> impl Iterator<Item = &str> {
        self.features
            .get(name)
            .and_then(|values| values.get(value))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }
}

fn span(start: Offset, end: Offset) -> i64 {
    end.as_nanos().saturating_sub(start.as_nanos())
}
