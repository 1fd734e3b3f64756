//! TIMIT label files (`.wrd`, `.phn`): `begin end label` with sample numbers.
//!
//! Options: `sampleRate` (default 16000) converts samples to seconds, `type`
//! (default `word`) sets the annotation type. The label is stored as feature
//! `label`. When a line begins at the sample where the previous one ended the
//! two share an anchor, so a contiguous file loads as a chain.

use crate::id::Identifier;
use crate::io::text::{ensure_agset, SharedAnchors};
use crate::io::{Capabilities, Codec, IoError, Options, DEFAULT_AGSET};
use crate::offset::Offset;
use crate::registry::Registry;

pub const DEFAULT_SAMPLE_RATE: i64 = 16_000;

pub struct Timit;

struct Segment {
    begin: i64,
    end: i64,
    label: String,
}

fn parse(text: &str) -> Result<Vec<Segment>, IoError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut sample = |what: &str| -> Result<i64, IoError> {
            let token = fields.next().ok_or_else(|| {
                IoError::parse(n, line.len() + 1, format!("missing {what} sample"))
            })?;
            let column = token.as_ptr() as usize - line.as_ptr() as usize + 1;
            token
                .parse::<i64>()
                .ok()
                .filter(|s| *s >= 0)
                .ok_or_else(|| IoError::parse(n, column, format!("bad {what} sample {token:?}")))
        };
        let begin = sample("begin")?;
        let end = sample("end")?;
        let label = fields.collect::<Vec<_>>().join(" ");
        if label.is_empty() {
            return Err(IoError::parse(n, line.len() + 1, "missing label"));
        }
        if begin > end {
            return Err(IoError::parse(
                n,
                1,
                format!("end sample {end} precedes begin sample {begin}"),
            ));
        }
        out.push(Segment { begin, end, label });
    }
    Ok(out)
}

pub(crate) fn sample_rate(options: &Options) -> Result<i64, IoError> {
    match options.get("sampleRate") {
        None => Ok(DEFAULT_SAMPLE_RATE),
        Some(text) => text
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|r| *r > 0)
            .ok_or_else(|| crate::AgError::BadArgument(format!("bad sample rate {text:?}")).into()),
    }
}

impl Codec for Timit {
    fn name(&self) -> &'static str {
        "TIMIT"
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
        let rate = sample_rate(options)?;
        let kind = options.get("type").unwrap_or("word").to_string();
        let segments = parse(text)?;
        let agset = crate::id::parse_at_depth(
            options.target.as_deref().unwrap_or(DEFAULT_AGSET),
            1,
            "an AGSet id",
        )?;
        registry.atomically(agset.as_str(), |reg| -> Result<_, IoError> {
            ensure_agset(reg, agset.as_str())?;
            let ag = reg.create_ag(agset.as_str(), None)?;
            let mut anchors = SharedAnchors::new(ag.clone(), crate::model::DEFAULT_ANCHOR_UNIT);
            let mut previous: Option<(i64, Identifier)> = None;
            for seg in &segments {
                let start = match &previous {
                    Some((sample, id)) if *sample == seg.begin => id.clone(),
                    _ => anchors.fresh(reg, Some(Offset::from_ratio(seg.begin, rate)?))?,
                };
                let end = anchors.fresh(reg, Some(Offset::from_ratio(seg.end, rate)?))?;
                let ann =
                    reg.create_annotation(ag.as_str(), start.as_str(), end.as_str(), &kind)?;
                reg.set_feature(ann.as_str(), "label", &seg.label)?;
                previous = Some((seg.end, end));
            }
            Ok(vec![ag])
        })
    }
}
