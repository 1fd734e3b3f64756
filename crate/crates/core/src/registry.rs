//! The in-memory registry mapping identifiers to live objects.

use std::sync::{Arc, RwLock};

use indexmap::IndexMap;

use crate::error::{AgError, Result};
use crate::id::{Identifier, ObjectKind};
use crate::model::{Ag, AgSet, Anchor, Annotation, Signal, Timeline};

/// A resolved object.
#[derive(Debug, Clone, Copy)]
pub enum ObjectRef<'a> {
    AgSet(&'a AgSet),
    Timeline(&'a Timeline),
    Signal(&'a Signal),
    Ag(&'a Ag),
    Anchor(&'a Anchor),
    Annotation(&'a Annotation),
}

impl ObjectRef<'_> {
    pub fn kind(&self) -> ObjectKind {
        match self {
            ObjectRef::AgSet(_) => ObjectKind::AgSet,
            ObjectRef::Timeline(_) => ObjectKind::Timeline,
            ObjectRef::Signal(_) => ObjectKind::Signal,
            ObjectRef::Ag(_) => ObjectKind::Ag,
            ObjectRef::Anchor(_) => ObjectKind::Anchor,
            ObjectRef::Annotation(_) => ObjectKind::Annotation,
        }
    }
}

/// Owner of every AGSet and, transitively, every object.
///
/// All mutation goes through `&mut self`; wrap in [`SharedRegistry`] to share
/// one registry between threads.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub(crate) agsets: IndexMap<String, AgSet>,
}

fn missing(id: &str) -> AgError {
    AgError::NoSuchObject(id.to_string())
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// AGSets in creation order.
    pub fn agsets(&self) -> impl Iterator<Item = &AgSet> {
        self.agsets.values()
    }

    pub fn agset(&self, id: &str) -> Option<&AgSet> {
        self.agsets.get(id)
    }

    pub fn resolve(&self, id: &str) -> Result<ObjectRef<'_>> {
        let ident = Identifier::parse(id)?;
        let agset = self.agsets.get(ident.agset()).ok_or_else(|| missing(id))?;
        match ident.depth() {
            1 => Ok(ObjectRef::AgSet(agset)),
            2 => {
                if let Some(t) = agset.timelines.get(id) {
                    Ok(ObjectRef::Timeline(t))
                } else {
                    agset
                        .graphs
                        .get(id)
                        .map(ObjectRef::Ag)
                        .ok_or_else(|| missing(id))
                }
            }
            _ => {
                let parent = ident.parent().expect("depth 3 has a parent");
                if let Some(t) = agset.timelines.get(parent) {
                    t.signals
                        .get(id)
                        .map(ObjectRef::Signal)
                        .ok_or_else(|| missing(id))
                } else if let Some(ag) = agset.graphs.get(parent) {
                    if let Some(a) = ag.anchors.get(id) {
                        Ok(ObjectRef::Anchor(a))
                    } else {
                        ag.annotations
                            .get(id)
                            .map(ObjectRef::Annotation)
                            .ok_or_else(|| missing(id))
                    }
                } else {
                    Err(missing(id))
                }
            }
        }
    }

    pub fn kind_of(&self, id: &str) -> Result<ObjectKind> {
        self.resolve(id).map(|o| o.kind())
    }

    /// Generates a fresh identifier `parent:<Kind><N>` for a child of `parent`.
    ///
    /// `N` comes from a per-parent, per-kind counter starting at 1 which skips
    /// identifiers already in use, so the result never names a live object.
    pub fn generate_child_id(&mut self, parent: &str, kind: ObjectKind) -> Result<Identifier> {
        let parent_kind = self.kind_of(parent)?;
        let expected = match kind {
            ObjectKind::AgSet => return Err(AgError::BadArgument("AGSets have no parent".into())),
            ObjectKind::Timeline | ObjectKind::Ag => ObjectKind::AgSet,
            ObjectKind::Signal => ObjectKind::Timeline,
            ObjectKind::Anchor | ObjectKind::Annotation => ObjectKind::Ag,
        };
        if parent_kind != expected {
            return Err(AgError::malformed(
                parent,
                format!("a {kind} must be created under a {expected}, not a {parent_kind}"),
            ));
        }
        Ok(match kind {
            ObjectKind::Timeline | ObjectKind::Ag => self.agset_mut(parent)?.generate(kind),
            ObjectKind::Signal => self.timeline_mut(parent)?.generate(),
            _ => self.ag_mut(parent)?.generate(kind),
        })
    }

    pub fn ag(&self, id: &str) -> Result<&Ag> {
        match self.resolve(id)? {
            ObjectRef::Ag(ag) => Ok(ag),
            other => Err(wrong_kind(id, other.kind(), ObjectKind::Ag)),
        }
    }

    pub fn timeline(&self, id: &str) -> Result<&Timeline> {
        match self.resolve(id)? {
            ObjectRef::Timeline(t) => Ok(t),
            other => Err(wrong_kind(id, other.kind(), ObjectKind::Timeline)),
        }
    }

    pub fn anchor(&self, id: &str) -> Result<&Anchor> {
        match self.resolve(id)? {
            ObjectRef::Anchor(a) => Ok(a),
            other => Err(wrong_kind(id, other.kind(), ObjectKind::Anchor)),
        }
    }

    pub fn annotation(&self, id: &str) -> Result<&Annotation> {
        match self.resolve(id)? {
            ObjectRef::Annotation(a) => Ok(a),
            other => Err(wrong_kind(id, other.kind(), ObjectKind::Annotation)),
        }
    }

    /// The graph owning anchor or annotation `id`.
    pub(crate) fn owner_of(&self, id: &str) -> Result<&Ag> {
        let parent = Identifier::parse(id)?
            .parent()
            .map(str::to_string)
            .ok_or_else(|| missing(id))?;
        self.agsets
            .get(Identifier::parse(&parent)?.agset())
            .and_then(|s| s.graphs.get(&parent))
            .ok_or_else(|| missing(id))
    }

    pub(crate) fn agset_mut(&mut self, id: &str) -> Result<&mut AgSet> {
        self.agsets.get_mut(id).ok_or_else(|| missing(id))
    }

    pub(crate) fn timeline_mut(&mut self, id: &str) -> Result<&mut Timeline> {
        let ident = Identifier::parse(id)?;
        self.agsets
            .get_mut(ident.agset())
            .and_then(|s| s.timelines.get_mut(id))
            .ok_or_else(|| missing(id))
    }

    pub(crate) fn ag_mut(&mut self, id: &str) -> Result<&mut Ag> {
        let ident = Identifier::parse(id)?;
        self.agsets
            .get_mut(ident.agset())
            .and_then(|s| s.graphs.get_mut(id))
            .ok_or_else(|| missing(id))
    }

    /// Graph ids whose indexes differ from a rebuild from object state.
    pub fn inconsistent_indexes(&self) -> Vec<Identifier> {
        self.agsets
            .values()
            .flat_map(|s| s.graphs.values())
            .filter(|ag| !ag.indexes_consistent())
            .map(|ag| ag.id.clone())
            .collect()
    }

    /// Runs `f`, restoring AGSet `agset` to its prior state (or removing it if
    /// it did not exist) when `f` fails. `f` must only touch that AGSet.
    pub(crate) fn atomically<T, E>(
        &mut self,
        agset: &str,
        f: impl FnOnce(&mut Registry) -> std::result::Result<T, E>,
    ) -> std::result::Result<T, E> {
        let saved = self
            .agsets
            .get_full(agset)
            .map(|(i, _, set)| (i, set.clone()));
        let result = f(self);
        if result.is_err() {
            match saved {
                Some((i, set)) => {
                    self.agsets.shift_insert(i, agset.to_string(), set);
                }
                None => {
                    self.agsets.shift_remove(agset);
                }
            }
        }
        result
    }
}

pub(crate) fn wrong_kind(id: &str, found: ObjectKind, expected: ObjectKind) -> AgError {
    AgError::malformed(id, format!("names a {found}, expected a {expected}"))
}

/// A registry shared between threads. Each closure runs under the lock, so
/// every call is linearizable and never observes partially-applied state.
#[derive(Debug, Clone, Default)]
pub struct SharedRegistry(Arc<RwLock<Registry>>);

impl SharedRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_registry(registry: Registry) -> Self {
        SharedRegistry(Arc::new(RwLock::new(registry)))
    }

    pub fn read<R>(&self, f: impl FnOnce(&Registry) -> R) -> R {
        let guard = self.0.read().unwrap_or_else(|e| e.into_inner());
        f(&guard)
    }

    pub fn write<R>(&self, f: impl FnOnce(&mut Registry) -> R) -> R {
        let mut guard = self.0.write().unwrap_or_else(|e| e.into_inner());
        f(&mut guard)
    }
}
