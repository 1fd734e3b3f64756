//! A headless spreadsheet-style transcription session.
//!
//! [`TableTrans`] is the main program: it owns the graph and turns table and
//! waveform events into API calls. The `table`, `waveform` and
//! `transcription` widgets are stood in for by [`Recorder`]s that keep every
//! event they receive.
//!
//! | event | effect | reply |
//! |---|---|---|
//! | `CreateAnnotation{start,end}` | two anchors and an annotation; the new annotation becomes current | `AnnotationCreated{AnnotationId,start,end}` |
//! | `DeleteAnnotation{AnnotationId}` | deletes the annotation | `AnnotationDeleted{AnnotationId}` |
//! | `SetCurrentAnnotation{AnnotationId}` | selects the annotation | |
//! | `SetFeature{feature,value}` | sets a feature on `AnnotationId` if given, else on the current annotation | |
//! | `SetRegion{start,end}` | moves the region and the current annotation's anchors | `SetRegion` forwarded to `transcription` |
//! | `GetRegion{}` | | `SetRegion{start,end}` with the current region |
//! | `Play`, `Stop` | none | |
//!
//! A failed request leaves the graph unchanged and is answered with
//! `Error{error,message}`, where `error` is the API error name.

use std::cell::RefCell;
use std::rc::Rc;

use crate::error::AgError;
use crate::events::{EventError, EventLog, EventMessage, Hub, Outbox};
use crate::id::{Identifier, ObjectKind};
use crate::offset::Offset;
use crate::registry::SharedRegistry;

/// Graph used by sessions that are not given one.
pub const DEFAULT_SESSION_AG: &str = "Session:AG1";

pub const MAIN: &str = "main";
pub const TABLE: &str = "table";
pub const WAVEFORM: &str = "waveform";
pub const TRANSCRIPTION: &str = "transcription";

/// The main program's state.
pub struct TableTrans {
    registry: SharedRegistry,
    ag: Identifier,
    kind: String,
    region: (Offset, Offset),
    current: Option<String>,
}

fn offset(e: &EventMessage, key: &str) -> Result<Offset, AgError> {
    let text = e
        .param(key)
        .ok_or_else(|| AgError::BadArgument(format!("{} lacks {key}", e.name)))?;
    Ok(text.parse()?)
}

fn ordered(start: Offset, end: Offset) -> Result<(Offset, Offset), AgError> {
    if start > end {
        return Err(AgError::OrderViolation(format!(
            "region end {end} precedes start {start}"
        )));
    }
    Ok((start, end))
}

impl TableTrans {
    /// Creates graph `ag`, and its AGSet, if they do not exist yet.
    pub fn new(registry: SharedRegistry, ag: &str) -> Result<Self, AgError> {
        let ag = crate::id::parse_at_depth(ag, ObjectKind::Ag.depth(), "an AG id")?;
        registry.write(|reg| -> Result<(), AgError> {
            if reg.agset(ag.agset()).is_none() {
                reg.create_agset(ag.agset())?;
            }
            if !reg.exists(ag.as_str()) {
                reg.create_ag(ag.as_str(), None)?;
            }
            reg.ag(ag.as_str()).map(|_| ())
        })?;
        Ok(TableTrans {
            registry,
            ag,
            kind: "segment".to_string(),
            region: (Offset::ZERO, Offset::ZERO),
            current: None,
        })
    }

    /// Sets the type given to new annotations (default `segment`).
    pub fn with_annotation_type(mut self, kind: &str) -> Self {
        self.kind = kind.to_string();
        self
    }

    pub fn ag(&self) -> &Identifier {
        &self.ag
    }

    pub fn current(&self) -> Option<&str> {
        self.current.as_deref()
    }

    pub fn region(&self) -> (Offset, Offset) {
        self.region
    }

    /// Event callback.
    pub fn handle(&mut self, e: &EventMessage, out: &mut Outbox) {
        let result = match e.name.as_str() {
            "CreateAnnotation" => self.create(e, out),
            "DeleteAnnotation" => self.delete(e, out),
            "SetCurrentAnnotation" => self.select(e),
            "SetFeature" => self.set_feature(e),
            "SetRegion" => self.set_region(e, out),
            "GetRegion" => {
                let reply = out.reply(e, "SetRegion");
                reply.set("start", self.region.0.to_string());
                reply.set("end", self.region.1.to_string());
                Ok(())
            }
            _ => Ok(()),
        };
        if let Err(err) = result {
            let reply = out.reply(e, "Error");
            reply.set("error", err.name());
            reply.set("message", err.to_string());
            reply.set("event", e.name.clone());
        }
    }

    fn annotation_param(&self, e: &EventMessage) -> Result<String, AgError> {
        let id = e
            .param("AnnotationId")
            .ok_or_else(|| AgError::BadArgument(format!("{} lacks AnnotationId", e.name)))?;
        self.registry.read(|reg| reg.annotation(id).map(|_| ()))?;
        if Identifier::parse(id)?.parent() != Some(self.ag.as_str()) {
            return Err(AgError::NoSuchObject(format!("{id} in {}", self.ag)));
        }
        Ok(id.to_string())
    }

    fn create(&mut self, e: &EventMessage, out: &mut Outbox) -> Result<(), AgError> {
        let (start, end) = (offset(e, "start")?, offset(e, "end")?);
        let kind = e.param("type").unwrap_or(&self.kind).to_string();
        let ag = self.ag.as_str();
        let id = self.registry.write(|reg| {
            reg.atomically(self.ag.agset(), |reg| {
                let a1 = reg.create_anchor(ag)?;
                reg.set_anchor_offset(a1.as_str(), start)?;
                let a2 = reg.create_anchor(ag)?;
                reg.set_anchor_offset(a2.as_str(), end)?;
                reg.create_annotation(ag, a1.as_str(), a2.as_str(), &kind)
            })
        })?;
        self.current = Some(id.as_str().to_string());
        let reply = out.reply(e, "AnnotationCreated");
        reply.set("AnnotationId", id.as_str());
        reply.set("start", start.to_string());
        reply.set("end", end.to_string());
        Ok(())
    }

    fn delete(&mut self, e: &EventMessage, out: &mut Outbox) -> Result<(), AgError> {
        let id = self.annotation_param(e)?;
        self.registry.write(|reg| reg.delete(&id))?;
        if self.current.as_deref() == Some(id.as_str()) {
            self.current = None;
        }
        out.reply(e, "AnnotationDeleted").set("AnnotationId", id);
        Ok(())
    }

    fn select(&mut self, e: &EventMessage) -> Result<(), AgError> {
        self.current = Some(self.annotation_param(e)?);
        Ok(())
    }

    fn set_feature(&mut self, e: &EventMessage) -> Result<(), AgError> {
        let id = match e.param("AnnotationId") {
            Some(_) => self.annotation_param(e)?,
            None => self
                .current
                .clone()
                .ok_or_else(|| AgError::BadArgument("no current annotation".to_string()))?,
        };
        let (name, value) = (
            e.param("feature").unwrap_or(""),
            e.param("value").unwrap_or(""),
        );
        self.registry.write(|reg| reg.set_feature(&id, name, value))
    }

    fn set_region(&mut self, e: &EventMessage, out: &mut Outbox) -> Result<(), AgError> {
        let (start, end) = ordered(offset(e, "start")?, offset(e, "end")?)?;
        if let Some(current) = &self.current {
            self.registry.write(|reg| {
                reg.atomically(self.ag.agset(), |reg| {
                    let ann = reg.annotation(current)?;
                    let (a1, a2) = (ann.start().clone(), ann.end().clone());
                    let old_end = reg.get_anchor_offset(a2.as_str())?;
                    // Move the end first when the region jumps past it.
                    if old_end.is_some_and(|o| start > o) {
                        reg.set_anchor_offset(a2.as_str(), end)?;
                        reg.set_anchor_offset(a1.as_str(), start)
                    } else {
                        reg.set_anchor_offset(a1.as_str(), start)?;
                        reg.set_anchor_offset(a2.as_str(), end)
                    }
                })
            })?;
        }
        self.region = (start, end);
        if e.source != TRANSCRIPTION {
            out.send(
                EventMessage::new("", TRANSCRIPTION, "SetRegion")
                    .with("start", start.to_string())
                    .with("end", end.to_string()),
            );
        }
        Ok(())
    }
}

/// A stand-in widget that keeps the events delivered to it.
#[derive(Clone, Default)]
pub struct Recorder(Rc<RefCell<Vec<EventMessage>>>);

impl Recorder {
    pub fn new() -> Self {
        Recorder::default()
    }

    pub fn events(&self) -> Vec<EventMessage> {
        self.0.borrow().clone()
    }

    pub fn last(&self) -> Option<EventMessage> {
        self.0.borrow().last().cloned()
    }

    pub fn len(&self) -> usize {
        self.0.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.borrow().is_empty()
    }

    fn record(&self, e: &EventMessage) {
        self.0.borrow_mut().push(e.clone());
    }
}

/// A hub wired with the main program and the three widget stand-ins, in the
/// order `main`, `table`, `waveform`, `transcription`.
pub struct Session {
    pub hub: Hub,
    pub main: Rc<RefCell<TableTrans>>,
    pub table: Recorder,
    pub waveform: Recorder,
    pub transcription: Recorder,
}

impl Session {
    pub fn new(registry: SharedRegistry, ag: &str) -> Result<Self, EventError> {
        Session::with_hub(registry, ag, Hub::new())
    }

    /// Builds the session on `hub`, which must have no components yet.
    pub fn with_hub(registry: SharedRegistry, ag: &str, mut hub: Hub) -> Result<Self, EventError> {
        let main = Rc::new(RefCell::new(TableTrans::new(registry, ag)?));
        let schema = hub.schema_mut();
        schema.register_extension("AnnotationCreated", &["AnnotationId", "start", "end"]);
        schema.register_extension("AnnotationDeleted", &["AnnotationId"]);
        schema.register_extension("Error", &["error", "message"]);

        let handler = main.clone();
        let subscriptions = [
            "CreateAnnotation",
            "DeleteAnnotation",
            "SetFeature",
            "SetRegion",
            "GetRegion",
            "SetCurrentAnnotation",
            "Play",
            "Stop",
        ];
        let (table, waveform, transcription) = (Recorder::new(), Recorder::new(), Recorder::new());
        hub.register_component(MAIN, subscriptions, move |e, out| {
            handler.borrow_mut().handle(e, out)
        })?;
        for (name, recorder, subs) in [
            (TABLE, &table, &[][..]),
            (WAVEFORM, &waveform, &["Play", "Stop"][..]),
            (TRANSCRIPTION, &transcription, &["SetCurrentAnnotation"][..]),
        ] {
            let r = recorder.clone();
            hub.register_component(name, subs.iter().copied(), move |e, _| r.record(e))?;
        }
        Ok(Session {
            hub,
            main,
            table,
            waveform,
            transcription,
        })
    }

    /// Builds a fresh session over `registry` and replays `log` through it.
    pub fn replay(registry: SharedRegistry, ag: &str, log: &EventLog) -> Result<Self, EventError> {
        let mut session = Session::with_hub(registry, ag, Hub::with_clock(|| Offset::ZERO))?;
        session.hub.replay(log)?;
        Ok(session)
    }

    /// Sends an event from `source` to the hub.
    pub fn send(
        &mut self,
        source: &str,
        name: &str,
        params: &[(&str, &str)],
    ) -> Result<usize, EventError> {
        let mut e = EventMessage::new(source, crate::events::HUB, name);
        for (k, v) in params {
            e.set(*k, *v);
        }
        self.hub.dispatch(e)
    }
}
