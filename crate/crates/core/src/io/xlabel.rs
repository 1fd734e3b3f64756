//! ESPS xlabel files.
//!
//! ```text
//! signal sw02001
//! nfields 1
//! #
//!     0.52  121 h#
//!     0.71  121 sh
//! ```
//!
//! Everything up to a line holding only `#` is header. Each following line
//! `time color label` ends a segment at `time` that starts at the previous
//! line's time (0 for the first). Segments get type `segment` (option `type`)
//! and features `label` and `color`.

use crate::id::Identifier;
use crate::io::text::{ensure_agset, SharedAnchors};
use crate::io::{Capabilities, Codec, IoError, Options, DEFAULT_AGSET};
use crate::offset::Offset;
use crate::registry::Registry;

pub struct Xlabel;

struct Mark {
    time: Offset,
    color: String,
    label: String,
}

fn parse(text: &str) -> Result<Vec<Mark>, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    if !lines.by_ref().any(|(_, l)| l.trim() == "#") {
        let last = text.lines().count().max(1);
        return Err(IoError::parse(
            last,
            1,
            "header is not terminated by a '#' line",
        ));
    }
    let mut marks: Vec<Mark> = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let time_text = fields.next().expect("non-blank line");
        let column = line.len() - line.trim_start().len() + 1;
        let time: Offset = time_text
            .parse()
            .map_err(|e: crate::offset::ParseOffsetError| {
                IoError::parse(n, column, e.to_string())
            })?;
        if time.is_negative() {
            return Err(IoError::parse(
                n,
                column,
                format!("negative time {time_text}"),
            ));
        }
        let previous = marks.last().map_or(Offset::ZERO, |m| m.time);
        if time < previous {
            return Err(IoError::parse(
                n,
                column,
                format!("time {time} precedes {previous}"),
            ));
        }
        let color = fields
            .next()
            .ok_or_else(|| IoError::parse(n, line.len() + 1, "missing color"))?
            .to_string();
        let label = fields.collect::<Vec<_>>().join(" ");
        marks.push(Mark { time, color, label });
    }
    Ok(marks)
}

impl Codec for Xlabel {
    fn name(&self) -> &'static str {
        "xlabel"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            load: true,
            store: false,
        }
    }

    fn load(
        &self,
        registry: &mut Registry,
        text: &str,
        options: &Options,
    ) -> Result<Vec<Identifier>, IoError> {
        let marks = parse(text)?;
        let kind = options.get("type").unwrap_or("segment").to_string();
        let agset = crate::id::parse_at_depth(
            options.target.as_deref().unwrap_or(DEFAULT_AGSET),
            1,
            "an AGSet id",
        )?;
        registry.atomically(agset.as_str(), |reg| -> Result<_, IoError> {
            ensure_agset(reg, agset.as_str())?;
            let ag = reg.create_ag(agset.as_str(), None)?;
            let mut anchors = SharedAnchors::new(ag.clone(), crate::model::DEFAULT_ANCHOR_UNIT);
            let mut start: Option<Identifier> = None;
            for mark in &marks {
                let a = match start.take() {
                    Some(a) => a,
                    None => anchors.fresh(reg, Some(Offset::ZERO))?,
                };
                let b = anchors.fresh(reg, Some(mark.time))?;
                let ann = reg.create_annotation(ag.as_str(), a.as_str(), b.as_str(), &kind)?;
                reg.set_feature(ann.as_str(), "label", &mark.label)?;
                reg.set_feature(ann.as_str(), "color", &mark.color)?;
                start = Some(b);
            }
            Ok(vec![ag])
        })
    }
}
