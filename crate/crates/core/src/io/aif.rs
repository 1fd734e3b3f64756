//! The XML interchange format.
//!
//! ```text
//! <?xml version="1.0" encoding="UTF-8"?>
//! <AGSet id="Test">
//!   <Metadata>
//!     <Feature name="corpus">demo</Feature>
//!   </Metadata>
//!   <Timeline id="Test:Timeline1">
//!     <Signal id="Test:Timeline1:Signal1" uri="file:a.wav" mimeClass="audio" mimeType="wav" encoding="pcm" unit="16kHz" track=""/>
//!   </Timeline>
//!   <AG id="Test:AG1" timeline="Test:Timeline1">
//!     <Anchor id="Test:AG1:Anchor1" offset="0.0" unit="sec"/>
//!     <Anchor id="Test:AG1:Anchor2" unit="sec"/>
//!     <Annotation id="Test:AG1:Annotation1" type="Word" start="Test:AG1:Anchor1" end="Test:AG1:Anchor2">
//!       <Feature name="English">cat</Feature>
//!     </Annotation>
//!   </AG>
//! </AGSet>
//! ```
//!
//! `Metadata` may appear first inside `AGSet`, `Timeline`, `Signal` and `AG`.
//! The writer emits anchors by (offset, id), annotations by start offset, end
//! offset and id, and features by name; elements without children are
//! self-closing except `Feature`. Indentation is two spaces and every line
//! ends with LF.

use std::collections::BTreeMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use crate::error::AgError;
use crate::id::{parse_at_depth, Identifier};
use crate::io::text::line_col;
use crate::io::{Capabilities, Codec, IoError, Options};
use crate::model::{SignalInfo, DEFAULT_ANCHOR_UNIT};
use crate::offset::Offset;
use crate::registry::{ObjectRef, Registry};

pub struct Aif;

impl Codec for Aif {
    fn name(&self) -> &'static str {
        "AIF"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            load: true,
            store: true,
        }
    }

    fn load(
        &self,
        registry: &mut Registry,
        text: &str,
        options: &Options,
    ) -> Result<Vec<Identifier>, IoError> {
        AifDocument::parse(text)?.apply(registry, options.target.as_deref())
    }

    fn store(&self, registry: &Registry, id: &str, _options: &Options) -> Result<String, IoError> {
        Ok(to_xml(registry, id)?)
    }
}

/// Serializes an AGSet, or a single graph inside its AGSet wrapper together
/// with the AGSet metadata and the graph's timeline.
pub fn to_xml(registry: &Registry, id: &str) -> Result<String, AgError> {
    Ok(AifDocument::from_registry(registry, id)?.write())
}

pub type Features = Vec<(String, String)>;

/// An interchange document, element for element. Parsing keeps document
/// order; [`AifDocument::from_registry`] produces canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AifDocument {
    pub id: String,
    pub metadata: Features,
    pub timelines: Vec<TimelineElem>,
    pub graphs: Vec<AgElem>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TimelineElem {
    pub id: String,
    pub metadata: Features,
    pub signals: Vec<SignalElem>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SignalElem {
    pub id: String,
    pub info: SignalInfo,
    pub metadata: Features,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgElem {
    pub id: String,
    pub timeline: Option<String>,
    pub metadata: Features,
    pub anchors: Vec<AnchorElem>,
    pub annotations: Vec<AnnotationElem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorElem {
    pub id: String,
    pub offset: Option<Offset>,
    pub unit: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationElem {
    pub id: String,
    pub kind: String,
    pub start: String,
    pub end: String,
    pub features: Features,
}

fn features(map: &crate::FeatureMap) -> Features {
    map.iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

impl AifDocument {
    /// Snapshot of an AGSet, or of one graph wrapped in its AGSet.
    pub fn from_registry(registry: &Registry, id: &str) -> Result<AifDocument, AgError> {
        let (set, only) = match registry.resolve(id)? {
            ObjectRef::AgSet(set) => (set, None),
            ObjectRef::Ag(ag) => (
                registry.agset(ag.id().agset()).expect("graph has an AGSet"),
                Some(ag),
            ),
            other => {
                return Err(AgError::malformed(
                    id,
                    format!("names a {}, expected an AGSet or AG", other.kind()),
                ))
            }
        };
        let timeline_elem = |t: &crate::model::Timeline| TimelineElem {
            id: t.id().to_string(),
            metadata: features(t.metadata()),
            signals: t
                .signals()
                .map(|s| SignalElem {
                    id: s.id().to_string(),
                    info: s.info().clone(),
                    metadata: features(s.metadata()),
                })
                .collect(),
        };
        let ag_elem = |ag: &crate::model::Ag| AgElem {
            id: ag.id().to_string(),
            timeline: ag.timeline().map(Identifier::to_string),
            metadata: features(ag.metadata()),
            anchors: ag
                .anchors_by_offset()
                .map(|a| AnchorElem {
                    id: a.id().to_string(),
                    offset: a.offset(),
                    unit: a.unit().to_string(),
                })
                .collect(),
            annotations: ag
                .annotations_by_offset()
                .into_iter()
                .map(|a| AnnotationElem {
                    id: a.id().to_string(),
                    kind: a.kind().to_string(),
                    start: a.start().to_string(),
                    end: a.end().to_string(),
                    features: features(a.features()),
                })
                .collect(),
        };
        let (timelines, graphs) = match only {
            None => (
                set.timelines().map(timeline_elem).collect(),
                set.graphs().map(ag_elem).collect(),
            ),
            Some(ag) => (
                ag.timeline()
                    .and_then(|t| set.timeline(t.as_str()))
                    .map(timeline_elem)
                    .into_iter()
                    .collect(),
                vec![ag_elem(ag)],
            ),
        };
        Ok(AifDocument {
            id: set.id().to_string(),
            metadata: features(set.metadata()),
            timelines,
            graphs,
        })
    }

    /// Canonical serialization.
    pub fn write(&self) -> String {
        let mut w = Writer::default();
        w.out
            .push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let empty = self.metadata.is_empty() && self.timelines.is_empty() && self.graphs.is_empty();
        w.open("AGSet", &[("id", &self.id)], empty);
        if !empty {
            w.metadata(&self.metadata);
            for t in &self.timelines {
                let empty = t.metadata.is_empty() && t.signals.is_empty();
                w.open("Timeline", &[("id", &t.id)], empty);
                if !empty {
                    w.metadata(&t.metadata);
                    for s in &t.signals {
                        let i = &s.info;
                        let attrs = [
                            ("id", s.id.as_str()),
                            ("uri", &i.uri),
                            ("mimeClass", &i.mime_class),
                            ("mimeType", &i.mime_type),
                            ("encoding", &i.encoding),
                            ("unit", &i.unit),
                            ("track", &i.track),
                        ];
                        w.open("Signal", &attrs, s.metadata.is_empty());
                        if !s.metadata.is_empty() {
                            w.metadata(&s.metadata);
                            w.close("Signal");
                        }
                    }
                    w.close("Timeline");
                }
            }
            for ag in &self.graphs {
                let mut attrs = vec![("id", ag.id.as_str())];
                if let Some(t) = &ag.timeline {
                    attrs.push(("timeline", t));
                }
                let empty =
                    ag.metadata.is_empty() && ag.anchors.is_empty() && ag.annotations.is_empty();
                w.open("AG", &attrs, empty);
                if empty {
                    continue;
                }
                w.metadata(&ag.metadata);
                for a in &ag.anchors {
                    let offset = a.offset.map(|o| o.to_string());
                    let mut attrs = vec![("id", a.id.as_str())];
                    if let Some(o) = &offset {
                        attrs.push(("offset", o));
                    }
                    attrs.push(("unit", &a.unit));
                    w.open("Anchor", &attrs, true);
                }
                for a in &ag.annotations {
                    let attrs = [
                        ("id", a.id.as_str()),
                        ("type", &a.kind),
                        ("start", &a.start),
                        ("end", &a.end),
                    ];
                    w.open("Annotation", &attrs, a.features.is_empty());
                    if !a.features.is_empty() {
                        w.features(&a.features);
                        w.close("Annotation");
                    }
                }
                w.close("AG");
            }
            w.close("AGSet");
        }
        w.out
    }

    /// Parses a document without touching any registry.
    pub fn parse(text: &str) -> Result<AifDocument, IoError> {
        Parser::new(text).run()
    }

    /// Creates the document's objects through the API, inside AGSet `target`
    /// (the document's own AGSet by default), which is created if missing.
    /// Identifiers are kept where free and regenerated otherwise; references
    /// follow the renaming. Returns the new graph ids. On error the target
    /// AGSet is left as it was.
    pub fn apply(
        &self,
        registry: &mut Registry,
        target: Option<&str>,
    ) -> Result<Vec<Identifier>, IoError> {
        let target = parse_at_depth(target.unwrap_or(&self.id), 1, "an AGSet id")?;
        registry.atomically(target.as_str(), |reg| {
            self.apply_into(reg, &target).map_err(IoError::from)
        })
    }

    fn apply_into(
        &self,
        reg: &mut Registry,
        target: &Identifier,
    ) -> Result<Vec<Identifier>, AgError> {
        parse_at_depth(&self.id, 1, "an AGSet id")?;
        if reg.agset(target.as_str()).is_none() {
            reg.create_agset(target.as_str())?;
        }
        for (k, v) in &self.metadata {
            reg.set_feature(target.as_str(), k, v)?;
        }
        let mut timelines = BTreeMap::new();
        for t in &self.timelines {
            let tl = reg.create_timeline(renamed(&self.id, target, &t.id)?.as_str())?;
            for (k, v) in &t.metadata {
                reg.set_feature(tl.as_str(), k, v)?;
            }
            for s in &t.signals {
                let sig =
                    reg.create_signal(renamed(&t.id, &tl, &s.id)?.as_str(), s.info.clone())?;
                for (k, v) in &s.metadata {
                    reg.set_feature(sig.as_str(), k, v)?;
                }
            }
            timelines.insert(t.id.as_str(), tl);
        }
        let mut created = Vec::new();
        let mut anchors = BTreeMap::new();
        for g in &self.graphs {
            let timeline = match &g.timeline {
                Some(t) => Some(
                    timelines
                        .get(t.as_str())
                        .ok_or_else(|| AgError::NoSuchObject(t.clone()))?
                        .as_str(),
                ),
                None => None,
            };
            let ag = reg.create_ag(renamed(&self.id, target, &g.id)?.as_str(), timeline)?;
            for (k, v) in &g.metadata {
                reg.set_feature(ag.as_str(), k, v)?;
            }
            for a in &g.anchors {
                let anchor = reg.create_anchor(renamed(&g.id, &ag, &a.id)?.as_str())?;
                if a.unit != DEFAULT_ANCHOR_UNIT {
                    reg.set_anchor_unit(anchor.as_str(), &a.unit)?;
                }
                if let Some(o) = a.offset {
                    reg.set_anchor_offset(anchor.as_str(), o)?;
                }
                anchors.insert(a.id.as_str(), anchor);
            }
            let lookup = |id: &str| {
                anchors
                    .get(id)
                    .map(|a: &Identifier| a.as_str().to_string())
                    .ok_or_else(|| AgError::NoSuchObject(id.to_string()))
            };
            for a in &g.annotations {
                let start = lookup(&a.start)?;
                let end = lookup(&a.end)?;
                let ann = reg.create_annotation(
                    renamed(&g.id, &ag, &a.id)?.as_str(),
                    &start,
                    &end,
                    &a.kind,
                )?;
                for (k, v) in &a.features {
                    reg.set_feature(ann.as_str(), k, v)?;
                }
            }
            created.push(ag);
        }
        Ok(created)
    }
}

/// Maps `id`, a child of `file_parent` in the document, to the same local
/// name under `parent`.
fn renamed(file_parent: &str, parent: &Identifier, id: &str) -> Result<Identifier, AgError> {
    let parsed = Identifier::parse(id)?;
    if parsed.parent() != Some(file_parent) {
        return Err(AgError::malformed(
            id,
            format!("is not a child of {file_parent}"),
        ));
    }
    Ok(parent.child(parsed.local()))
}

#[derive(Default)]
struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn open(&mut self, name: &str, attrs: &[(&str, &str)], empty: bool) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            escape_into(&mut self.out, v, true);
            self.out.push('"');
        }
        if empty {
            self.out.push_str("/>\n");
        } else {
            self.out.push_str(">\n");
            self.depth += 1;
        }
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    fn features(&mut self, features: &Features) {
        for (name, value) in features {
            self.indent();
            self.out.push_str("<Feature name=\"");
            escape_into(&mut self.out, name, true);
            self.out.push_str("\">");
            escape_into(&mut self.out, value, false);
            self.out.push_str("</Feature>\n");
        }
    }

    fn metadata(&mut self, features: &Features) {
        if features.is_empty() {
            return;
        }
        self.open("Metadata", &[], false);
        self.features(features);
        self.close("Metadata");
    }
}

fn escape_into(out: &mut String, s: &str, attribute: bool) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attribute => out.push_str("&quot;"),
            '\t' if attribute => out.push_str("&#9;"),
            '\n' if attribute => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => {
                out.push_str(&format!("&#{};", c as u32));
            }
            c => out.push(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Owner {
    AgSet,
    Timeline,
    Signal,
    Ag,
    Annotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elem {
    AgSet,
    Metadata(Owner),
    Feature(Owner),
    Timeline,
    Signal,
    Ag,
    Anchor,
    Annotation,
}

impl Elem {
    fn name(self) -> &'static str {
        match self {
            Elem::AgSet => "AGSet",
            Elem::Metadata(_) => "Metadata",
            Elem::Feature(_) => "Feature",
            Elem::Timeline => "Timeline",
            Elem::Signal => "Signal",
            Elem::Ag => "AG",
            Elem::Anchor => "Anchor",
            Elem::Annotation => "Annotation",
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    reader: Reader<&'a [u8]>,
    doc: Option<AifDocument>,
    stack: Vec<Elem>,
    feature: Option<(String, String)>,
    /// Byte position of the event being handled.
    at: usize,
}

type Attrs = BTreeMap<String, String>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            reader: Reader::from_str(text),
            doc: None,
            stack: Vec::new(),
            feature: None,
            at: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> IoError {
        let (line, column) = line_col(self.text, self.at);
        IoError::parse(line, column, message)
    }

    fn run(mut self) -> Result<AifDocument, IoError> {
        loop {
            self.at = self.reader.buffer_position() as usize;
            let event = match self.reader.read_event() {
                Ok(e) => e,
                Err(e) => {
                    self.at = self.reader.error_position() as usize;
                    return Err(self.error(e.to_string()));
                }
            };
            match event {
                Event::Start(e) => self.start(&e)?,
                Event::Empty(e) => {
                    self.start(&e)?;
                    self.end()?;
                }
                Event::End(_) => self.end()?,
                Event::Text(t) => {
                    let content = t.xml_content(XmlVersion::Implicit1_0);
                    self.text_content(&content)?;
                }
                Event::CData(t) => {
                    let content = t.xml_content(XmlVersion::Implicit1_0);
                    self.text_content(&content)?;
                }
                Event::GeneralRef(r) => {
                    let resolved = match r.resolve_char_ref() {
                        Ok(Some(c)) => c.to_string(),
                        Ok(None) => quick_xml::escape::resolve_predefined_entity(&r)
                            .ok_or_else(|| self.error(format!("unknown entity &{};", &*r)))?
                            .to_string(),
                        Err(e) => return Err(self.error(e.to_string())),
                    };
                    self.text_content(&resolved)?;
                }
                Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
                Event::Eof => break,
            }
        }
        if let Some(open) = self.stack.last() {
            return Err(self.error(format!("unclosed <{}>", open.name())));
        }
        self.doc
            .take()
            .ok_or_else(|| self.error("no AGSet element"))
    }

    fn attrs(&self, e: &BytesStart, allowed: &[&str], required: &[&str]) -> Result<Attrs, IoError> {
        let mut out = Attrs::new();
        let element = e.name().as_ref().to_string();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.error(err.to_string()))?;
            let key = attr.key.as_ref().to_string();
            if !allowed.contains(&key.as_str()) {
                return Err(self.error(format!("unexpected attribute {key:?} on <{element}>")));
            }
            let value = attr
                .normalized_value(XmlVersion::Implicit1_0)
                .map_err(|err| self.error(err.to_string()))?;
            out.insert(key, value.into_owned());
        }
        for r in required {
            if !out.contains_key(*r) {
                return Err(self.error(format!("<{element}> lacks attribute {r:?}")));
            }
        }
        Ok(out)
    }

    fn doc(&mut self) -> &mut AifDocument {
        self.doc.as_mut().expect("inside AGSet")
    }

    fn start(&mut self, e: &BytesStart) -> Result<(), IoError> {
        let name = e.name().as_ref().to_string();
        let parent = self.stack.last().copied();
        let elem = match (name.as_str(), parent) {
            ("AGSet", None) if self.doc.is_none() => {
                let mut a = self.attrs(e, &["id"], &["id"])?;
                self.doc = Some(AifDocument {
                    id: a.remove("id").expect("required"),
                    ..Default::default()
                });
                Elem::AgSet
            }
            ("Metadata", Some(p)) => {
                let owner = match p {
                    Elem::AgSet => Owner::AgSet,
                    Elem::Timeline => Owner::Timeline,
                    Elem::Signal => Owner::Signal,
                    Elem::Ag => Owner::Ag,
                    _ => {
                        return Err(self.error(format!("<Metadata> not allowed in <{}>", p.name())))
                    }
                };
                self.attrs(e, &[], &[])?;
                Elem::Metadata(owner)
            }
            ("Feature", Some(p @ (Elem::Metadata(_) | Elem::Annotation))) => {
                let owner = match p {
                    Elem::Metadata(o) => o,
                    _ => Owner::Annotation,
                };
                let mut a = self.attrs(e, &["name"], &["name"])?;
                self.feature = Some((a.remove("name").expect("required"), String::new()));
                Elem::Feature(owner)
            }
            ("Timeline", Some(Elem::AgSet)) => {
                let mut a = self.attrs(e, &["id"], &["id"])?;
                self.doc().timelines.push(TimelineElem {
                    id: a.remove("id").expect("required"),
                    ..Default::default()
                });
                Elem::Timeline
            }
            ("Signal", Some(Elem::Timeline)) => {
                let keys = [
                    "id",
                    "uri",
                    "mimeClass",
                    "mimeType",
                    "encoding",
                    "unit",
                    "track",
                ];
                let mut a = self.attrs(e, &keys, &["id", "uri"])?;
                let mut take = |k: &str| a.remove(k).unwrap_or_default();
                let signal = SignalElem {
                    id: take("id"),
                    info: SignalInfo {
                        uri: take("uri"),
                        mime_class: take("mimeClass"),
                        mime_type: take("mimeType"),
                        encoding: take("encoding"),
                        unit: take("unit"),
                        track: take("track"),
                    },
                    metadata: Vec::new(),
                };
                self.doc()
                    .timelines
                    .last_mut()
                    .expect("inside Timeline")
                    .signals
                    .push(signal);
                Elem::Signal
            }
            ("AG", Some(Elem::AgSet)) => {
                let mut a = self.attrs(e, &["id", "timeline"], &["id"])?;
                self.doc().graphs.push(AgElem {
                    id: a.remove("id").expect("required"),
                    timeline: a.remove("timeline"),
                    ..Default::default()
                });
                Elem::Ag
            }
            ("Anchor", Some(Elem::Ag)) => {
                let mut a = self.attrs(e, &["id", "offset", "unit"], &["id"])?;
                let offset = match a.remove("offset") {
                    Some(text) => Some(
                        text.trim()
                            .parse::<Offset>()
                            .map_err(|err| self.error(err.to_string()))?,
                    ),
                    None => None,
                };
                let anchor = AnchorElem {
                    id: a.remove("id").expect("required"),
                    offset,
                    unit: a
                        .remove("unit")
                        .unwrap_or_else(|| DEFAULT_ANCHOR_UNIT.to_string()),
                };
                self.current_ag().anchors.push(anchor);
                Elem::Anchor
            }
            ("Annotation", Some(Elem::Ag)) => {
                let mut a = self.attrs(
                    e,
                    &["id", "type", "start", "end"],
                    &["id", "type", "start", "end"],
                )?;
                let mut take = |k: &str| a.remove(k).expect("required");
                let ann = AnnotationElem {
                    id: take("id"),
                    kind: take("type"),
                    start: take("start"),
                    end: take("end"),
                    features: Vec::new(),
                };
                self.current_ag().annotations.push(ann);
                Elem::Annotation
            }
            (other, Some(p)) => {
                return Err(self.error(format!("unexpected <{other}> inside <{}>", p.name())))
            }
            (other, None) => return Err(self.error(format!("unexpected root element <{other}>"))),
        };
        self.stack.push(elem);
        Ok(())
    }

    fn current_ag(&mut self) -> &mut AgElem {
        self.doc().graphs.last_mut().expect("inside AG")
    }

    fn end(&mut self) -> Result<(), IoError> {
        let elem = self
            .stack
            .pop()
            .ok_or_else(|| self.error("unbalanced end tag"))?;
        if let Elem::Feature(owner) = elem {
            let feature = self.feature.take().expect("feature open");
            let doc = self.doc();
            let list = match owner {
                Owner::AgSet => &mut doc.metadata,
                Owner::Timeline => &mut doc.timelines.last_mut().expect("open").metadata,
                Owner::Signal => {
                    &mut doc
                        .timelines
                        .last_mut()
                        .expect("open")
                        .signals
                        .last_mut()
                        .expect("open")
                        .metadata
                }
                Owner::Ag => &mut doc.graphs.last_mut().expect("open").metadata,
                Owner::Annotation => {
                    &mut doc
                        .graphs
                        .last_mut()
                        .expect("open")
                        .annotations
                        .last_mut()
                        .expect("open")
                        .features
                }
            };
            list.push(feature);
        }
        Ok(())
    }

    fn text_content(&mut self, content: &str) -> Result<(), IoError> {
        match (&mut self.feature, self.stack.last()) {
            (Some((_, value)), Some(Elem::Feature(_))) => {
                value.push_str(content);
                Ok(())
            }
            _ if content.trim().is_empty() => Ok(()),
            (_, Some(p)) => Err(self.error(format!("unexpected text inside <{}>", p.name()))),
            (_, None) => Err(self.error("text outside the root element")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_set() -> Registry {
        let mut reg = Registry::new();
        let set = reg.create_agset("Test").unwrap();
        let tl = reg.create_timeline(set.as_str()).unwrap();
        let ag = reg.create_ag(set.as_str(), Some(tl.as_str())).unwrap();
        let a1 = reg.create_anchor(ag.as_str()).unwrap();
        let a2 = reg.create_anchor(ag.as_str()).unwrap();
        let ann = reg
            .create_annotation(ag.as_str(), a1.as_str(), a2.as_str(), "Word")
            .unwrap();
        reg.set_feature(ann.as_str(), "English", "cat").unwrap();
        reg.set_feature(ann.as_str(), "Japanese", "neko").unwrap();
        reg
    }

    #[test]
    fn exact_bytes() {
        let reg = test_set();
        let expected = "\
<?xml version=\"1.0\" encoding=\"UTF-8\"?>
<AGSet id=\"Test\">
  <Timeline id=\"Test:Timeline1\"/>
  <AG id=\"Test:AG1\" timeline=\"Test:Timeline1\">
    <Anchor id=\"Test:AG1:Anchor1\" unit=\"sec\"/>
    <Anchor id=\"Test:AG1:Anchor2\" unit=\"sec\"/>
    <Annotation id=\"Test:AG1:Annotation1\" type=\"Word\" start=\"Test:AG1:Anchor1\" end=\"Test:AG1:Anchor2\">
      <Feature name=\"English\">cat</Feature>
      <Feature name=\"Japanese\">neko</Feature>
    </Annotation>
  </AG>
</AGSet>
";
        assert_eq!(to_xml(&reg, "Test").unwrap(), expected);
        assert_eq!(to_xml(&reg, "Test:AG1").unwrap(), expected);
    }

    #[test]
    fn empty_agset() {
        let mut reg = Registry::new();
        reg.create_agset("E").unwrap();
        let xml = to_xml(&reg, "E").unwrap();
        assert!(xml.ends_with("<AGSet id=\"E\"/>\n"));
        let doc = AifDocument::parse(&xml).unwrap();
        assert!(doc.graphs.is_empty());
    }

    #[test]
    fn to_xml_kinds() {
        let reg = test_set();
        assert_eq!(
            to_xml(&reg, "Test:AG1:Anchor1").unwrap_err().name(),
            "MalformedId"
        );
        assert_eq!(to_xml(&reg, "Nope").unwrap_err().name(), "NoSuchObject");
    }

    #[test]
    fn awkward_text_survives() {
        let mut reg = test_set();
        let nasty = "a<b>&\"c\"\td\ne\r\nf ";
        reg.set_feature("Test:AG1:Annotation1", nasty, nasty)
            .unwrap();
        reg.set_feature("Test", "note", "  leading and trailing  ")
            .unwrap();
        let xml = to_xml(&reg, "Test").unwrap();
        let mut fresh = Registry::new();
        AifDocument::parse(&xml)
            .unwrap()
            .apply(&mut fresh, None)
            .unwrap();
        assert_eq!(
            fresh.get_feature("Test:AG1:Annotation1", nasty).unwrap(),
            nasty
        );
        assert_eq!(to_xml(&fresh, "Test").unwrap(), xml);
    }

    #[test]
    fn reload_is_a_fixed_point() {
        let mut reg = test_set();
        reg.set_anchor_offset("Test:AG1:Anchor2", "2.5".parse().unwrap())
            .unwrap();
        reg.set_anchor_unit("Test:AG1:Anchor2", "tokens").unwrap();
        reg.create_signal("Test:Timeline1", SignalInfo::new("file:x.wav"))
            .unwrap();
        reg.set_feature("Test:Timeline1:Signal1", "channel", "left")
            .unwrap();
        reg.set_feature("Test:AG1", "speaker", "A").unwrap();
        let first = to_xml(&reg, "Test").unwrap();
        let mut fresh = Registry::new();
        let ags = AifDocument::parse(&first)
            .unwrap()
            .apply(&mut fresh, None)
            .unwrap();
        assert_eq!(ags.len(), 1);
        assert_eq!(to_xml(&fresh, "Test").unwrap(), first);
    }

    #[test]
    fn retargeting_renames_every_id() {
        let reg = test_set();
        let xml = to_xml(&reg, "Test").unwrap();
        let mut fresh = Registry::new();
        let ags = AifDocument::parse(&xml)
            .unwrap()
            .apply(&mut fresh, Some("Copy"))
            .unwrap();
        assert_eq!(ags[0].as_str(), "Copy:AG1");
        assert_eq!(
            fresh
                .get_feature("Copy:AG1:Annotation1", "English")
                .unwrap(),
            "cat"
        );
        assert_eq!(
            fresh.ag("Copy:AG1").unwrap().timeline().unwrap().as_str(),
            "Copy:Timeline1"
        );
    }

    #[test]
    fn merging_into_an_existing_agset_regenerates_taken_ids() {
        let mut reg = test_set();
        let xml = to_xml(&reg, "Test").unwrap();
        let ags = AifDocument::parse(&xml)
            .unwrap()
            .apply(&mut reg, None)
            .unwrap();
        assert_eq!(ags[0].as_str(), "Test:AG2");
        let ann = reg
            .get_annotation_seq_by_offset("Test:AG2", None, None)
            .unwrap();
        assert!(ann.is_empty());
        assert_eq!(reg.get_anchor_set("Test:AG2").unwrap().len(), 2);
        assert_eq!(
            reg.ag("Test:AG2").unwrap().timeline().unwrap().as_str(),
            "Test:Timeline2"
        );
    }

    #[test]
    fn parse_errors_have_positions() {
        let bad = "<?xml version=\"1.0\"?>\n<AGSet id=\"T\">\n  <Bogus/>\n</AGSet>\n";
        match AifDocument::parse(bad).unwrap_err() {
            IoError::Parse { line, message, .. } => {
                assert_eq!(line, 3, "{message}");
                assert!(message.contains("Bogus"));
            }
            other => panic!("{other}"),
        }
        assert!(AifDocument::parse("<AGSet id=\"T\">")
            .unwrap_err()
            .is_parse());
        assert!(AifDocument::parse("<AGSet id=\"T\"></AG>")
            .unwrap_err()
            .is_parse());
        assert!(AifDocument::parse("").unwrap_err().is_parse());
        let bad_offset =
            "<AGSet id=\"T\"><AG id=\"T:AG1\"><Anchor id=\"T:AG1:A\" offset=\"x\"/></AG></AGSet>";
        assert!(AifDocument::parse(bad_offset).unwrap_err().is_parse());
    }

    #[test]
    fn failed_apply_leaves_registry_untouched() {
        let mut reg = test_set();
        let before = to_xml(&reg, "Test").unwrap();
        let dangling = "<AGSet id=\"Test\"><AG id=\"Test:AG1\"><Anchor id=\"Test:AG1:A\" offset=\"1\"/>\
<Annotation id=\"Test:AG1:X\" type=\"w\" start=\"Test:AG1:A\" end=\"Test:AG1:Missing\"/></AG></AGSet>";
        let err = AifDocument::parse(dangling)
            .unwrap()
            .apply(&mut reg, None)
            .unwrap_err();
        assert!(matches!(err, IoError::Ag(AgError::NoSuchObject(_))));
        assert_eq!(to_xml(&reg, "Test").unwrap(), before);
        let err = AifDocument::parse(dangling)
            .unwrap()
            .apply(&mut reg, Some("Fresh"))
            .unwrap_err();
        assert!(matches!(err, IoError::Ag(_)));
        assert!(!reg.exists("Fresh"));
    }
}
