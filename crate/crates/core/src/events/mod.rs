//! Named key/value events passed between loosely coupled components.
//!
//! An [`EventMessage`] travels through a [`Hub`], which logs it and hands it
//! to the components that asked for it. The log is a text file with one
//! record per line:
//!
//! ```text
//! seq TAB timestamp TAB source TAB target TAB name TAB k1=v1 TAB k2=v2 ...
//! ```
//!
//! Text fields are percent-escaped (`%25`, `%09`, `%0A`, `%0D`, `%3D`), so
//! every record fits on one line and decodes to exactly the event that was
//! encoded. Replaying a log through freshly built components reproduces the
//! session.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::io::text::{escape, unescape};
use crate::offset::Offset;

pub mod hub;
pub mod tabletrans;

pub use hub::{Handler, Hub, Outbox};
pub use tabletrans::{Recorder, Session, TableTrans, DEFAULT_SESSION_AG};

/// Component name that routes an event to every subscriber.
pub const HUB: &str = "hub";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventError {
    #[error("line {line}: {message}")]
    Decode { line: usize, message: String },
    #[error("{0}")]
    Schema(String),
    #[error("component {0} is already registered")]
    DuplicateComponent(String),
    #[error(transparent)]
    Ag(#[from] crate::error::AgError),
}

impl EventError {
    pub fn name(&self) -> &'static str {
        match self {
            EventError::Decode { .. } => "DecodeError",
            EventError::Schema(_) => "SchemaError",
            EventError::DuplicateComponent(_) => "DuplicateComponent",
            EventError::Ag(e) => e.name(),
        }
    }

    fn decode(line: usize, message: impl Into<String>) -> Self {
        EventError::Decode {
            line,
            message: message.into(),
        }
    }
}

/// One event. Parameters keep their insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventMessage {
    pub seq: u64,
    pub timestamp: Offset,
    pub source: String,
    pub target: String,
    pub name: String,
    pub params: Vec<(String, String)>,
}

impl EventMessage {
    /// An unstamped event; the hub assigns `seq` and `timestamp`.
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        name: impl Into<String>,
    ) -> Self {
        EventMessage {
            seq: 0,
            timestamp: Offset::ZERO,
            source: source.into(),
            target: target.into(),
            name: name.into(),
            params: Vec::new(),
        }
    }

    /// Sets `key`, replacing an earlier value in place.
    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let (key, value) = (key.into(), value.into());
        match self.params.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.params.push((key, value)),
        }
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Encodes one log record, without the trailing newline.
pub fn encode_event(e: &EventMessage) -> String {
    let mut out = format!(
        "{}\t{}\t{}\t{}\t{}",
        e.seq,
        e.timestamp,
        escape(&e.source),
        escape(&e.target),
        escape(&e.name)
    );
    for (k, v) in &e.params {
        out.push('\t');
        out.push_str(&escape(k));
        out.push('=');
        out.push_str(&escape(v));
    }
    out
}

/// Decodes one record. Errors report line 1; [`EventLog::parse`] reports the
/// real line.
pub fn decode_event(line: &str) -> Result<EventMessage, EventError> {
    decode_at(line, 1)
}

fn decode_at(line: &str, n: usize) -> Result<EventMessage, EventError> {
    if line.contains(['\n', '\r']) {
        return Err(EventError::decode(n, "record spans lines"));
    }
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 5 {
        return Err(EventError::decode(
            n,
            format!("expected at least 5 fields, found {}", fields.len()),
        ));
    }
    let seq = fields[0]
        .parse::<u64>()
        .map_err(|_| EventError::decode(n, format!("bad sequence number {:?}", fields[0])))?;
    let timestamp = fields[1]
        .parse::<Offset>()
        .map_err(|e| EventError::decode(n, format!("bad timestamp: {e}")))?;
    let text = |f: &str| unescape(f).map_err(|e| EventError::decode(n, e));
    let mut event = EventMessage {
        seq,
        timestamp,
        source: text(fields[2])?,
        target: text(fields[3])?,
        name: text(fields[4])?,
        params: Vec::new(),
    };
    for field in &fields[5..] {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| EventError::decode(n, format!("parameter {field:?} lacks '='")))?;
        let k = text(k)?;
        if event.param(&k).is_some() {
            return Err(EventError::decode(n, format!("duplicate parameter {k:?}")));
        }
        event.params.push((k, text(v)?));
    }
    Ok(event)
}

/// Known event names and the parameters each one requires.
#[derive(Debug, Clone)]
pub struct Schema {
    required: BTreeMap<String, Vec<String>>,
}

impl Schema {
    /// The common events: creating, deleting and selecting annotations,
    /// editing features, moving the region and playback.
    pub fn standard() -> Self {
        let mut s = Schema {
            required: BTreeMap::new(),
        };
        for (name, params) in [
            ("CreateAnnotation", &["start", "end"][..]),
            ("DeleteAnnotation", &["AnnotationId"]),
            ("SetFeature", &["feature", "value"]),
            ("SetRegion", &["start", "end"]),
            ("GetRegion", &[]),
            ("SetCurrentAnnotation", &["AnnotationId"]),
            ("Play", &["start", "end"]),
            ("Stop", &[]),
        ] {
            s.register_extension(name, params);
        }
        s
    }

    /// Accepts events called `name`, or changes the parameters an existing
    /// name requires.
    pub fn register_extension(&mut self, name: &str, required: &[&str]) {
        self.required.insert(
            name.to_string(),
            required.iter().map(|p| p.to_string()).collect(),
        );
    }

    pub fn knows(&self, name: &str) -> bool {
        self.required.contains_key(name)
    }

    pub fn check(&self, e: &EventMessage) -> Result<(), EventError> {
        let required = self
            .required
            .get(&e.name)
            .ok_or_else(|| EventError::Schema(format!("unknown event {:?}", e.name)))?;
        match required.iter().find(|p| e.param(p).is_none()) {
            Some(p) => Err(EventError::Schema(format!(
                "{} lacks parameter {p:?}",
                e.name
            ))),
            None => Ok(()),
        }
    }
}

impl Default for Schema {
    fn default() -> Self {
        Schema::standard()
    }
}

/// An ordered, append-only record of events with strictly increasing `seq`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    events: Vec<EventMessage>,
}

impl EventLog {
    pub fn new() -> Self {
        EventLog::default()
    }

    /// Decodes a log file. Blank lines are not allowed except for the final
    /// newline.
    pub fn parse(text: &str) -> Result<EventLog, EventError> {
        let mut log = EventLog::new();
        let body = text.strip_suffix('\n').unwrap_or(text);
        if body.is_empty() {
            return Ok(log);
        }
        for (i, line) in body.split('\n').enumerate() {
            let e = decode_at(line, i + 1)?;
            if let Some(last) = log.last_seq() {
                if e.seq <= last {
                    return Err(EventError::decode(
                        i + 1,
                        format!("sequence {} does not follow {last}", e.seq),
                    ));
                }
            }
            log.events.push(e);
        }
        Ok(log)
    }

    pub(crate) fn push(&mut self, e: EventMessage) {
        debug_assert!(self.last_seq().is_none_or(|s| e.seq > s));
        self.events.push(e);
    }

    pub fn last_seq(&self) -> Option<u64> {
        self.events.last().map(|e| e.seq)
    }

    pub fn events(&self) -> &[EventMessage] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The log file text: one record per line, each ending in a newline.
    pub fn encode(&self) -> String {
        self.events.iter().map(|e| encode_event(e) + "\n").collect()
    }
}

impl fmt::Display for EventLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}
