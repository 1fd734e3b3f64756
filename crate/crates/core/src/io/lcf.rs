//! Callhome-style transcripts: `start end speaker: text`, one utterance per line.
//!
//! ```text
//! 0.25 1.5 A: hello there
//! 1.5 2.75 B: hi
//! ```
//!
//! Offsets are decimal seconds. Each line becomes an annotation of type
//! `utterance` with features `speaker` and `text`; utterances meeting at the
//! same offset share an anchor. Blank lines and lines starting with `#` are
//! skipped.

use crate::id::Identifier;
use crate::io::text::{ensure_agset, single_graph, SharedAnchors};
use crate::io::{Capabilities, Codec, IoError, Options, DEFAULT_AGSET};
use crate::model::DEFAULT_ANCHOR_UNIT;
use crate::offset::Offset;
use crate::registry::Registry;

pub const UTTERANCE: &str = "utterance";

pub struct Lcf;

struct Line {
    start: Offset,
    end: Offset,
    speaker: String,
    text: String,
}

fn parse(text: &str) -> Result<Vec<Line>, IoError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut rest = raw;
        let mut offsets = [Offset::ZERO; 2];
        for slot in &mut offsets {
            let trimmed = rest.trim_start();
            let column = raw.len() - trimmed.len() + 1;
            let (token, tail) = trimmed
                .split_once(char::is_whitespace)
                .unwrap_or((trimmed, ""));
            *slot = token
                .parse()
                .map_err(|e: crate::offset::ParseOffsetError| {
                    IoError::parse(n, column, e.to_string())
                })?;
            if slot.is_negative() {
                return Err(IoError::parse(
                    n,
                    column,
                    format!("negative offset {token}"),
                ));
            }
            rest = tail;
        }
        let [start, end] = offsets;
        if start > end {
            return Err(IoError::parse(
                n,
                1,
                format!("end {end} precedes start {start}"),
            ));
        }
        let (speaker, utterance) = rest.split_once(':').ok_or_else(|| {
            IoError::parse(n, raw.len() - rest.len() + 1, "expected 'speaker: text'")
        })?;
        let speaker = speaker.trim();
        if speaker.is_empty() || speaker.contains(char::is_whitespace) {
            return Err(IoError::parse(
                n,
                raw.len() - rest.len() + 1,
                format!("bad speaker {speaker:?}"),
            ));
        }
        out.push(Line {
            start,
            end,
            speaker: speaker.to_string(),
            text: utterance.strip_prefix(' ').unwrap_or(utterance).to_string(),
        });
    }
    Ok(out)
}

impl Codec for Lcf {
    fn name(&self) -> &'static str {
        "LCF"
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
        let lines = parse(text)?;
        let agset = crate::id::parse_at_depth(
            options.target.as_deref().unwrap_or(DEFAULT_AGSET),
            1,
            "an AGSet id",
        )?;
        registry.atomically(agset.as_str(), |reg| -> Result<_, IoError> {
            ensure_agset(reg, agset.as_str())?;
            let ag = reg.create_ag(agset.as_str(), None)?;
            let mut anchors = SharedAnchors::new(ag.clone(), DEFAULT_ANCHOR_UNIT);
            for line in &lines {
                let (start, end) = anchors.span(reg, Some(line.start), Some(line.end))?;
                let ann =
                    reg.create_annotation(ag.as_str(), start.as_str(), end.as_str(), UTTERANCE)?;
                reg.set_feature(ann.as_str(), "speaker", &line.speaker)?;
                reg.set_feature(ann.as_str(), "text", &line.text)?;
            }
            Ok(vec![ag])
        })
    }

    /// Fails with `Unrepresentable` unless every annotation is a fully
    /// anchored utterance carrying exactly a one-token speaker and a
    /// single-line text.
    fn store(&self, registry: &Registry, id: &str, _options: &Options) -> Result<String, IoError> {
        let ag = single_graph(registry, id)?;
        let mut out = String::new();
        for ann in ag.annotations_by_offset() {
            let bad = |why: &str| IoError::Unrepresentable(format!("{}: {why}", ann.id()));
            let key = ag.sort_key(ann);
            let (Some(start), Some(end)) = (key.start, key.end) else {
                return Err(bad("endpoint without an offset"));
            };
            if ann.kind() != UTTERANCE {
                return Err(bad("type is not utterance"));
            }
            let f = ann.features();
            let (Some(speaker), Some(text)) = (f.get("speaker"), f.get("text")) else {
                return Err(bad("needs features speaker and text"));
            };
            if f.len() != 2 {
                return Err(bad("features other than speaker and text"));
            }
            if speaker.is_empty() || speaker.contains(|c: char| c.is_whitespace() || c == ':') {
                return Err(bad("speaker must be one token without ':'"));
            }
            if text.contains(['\n', '\r']) {
                return Err(bad("text spans lines"));
            }
            out.push_str(&format!("{start} {end} {speaker}: {text}\n"));
        }
        Ok(out)
    }
}
