//! Table format: one tab-separated row per annotation.
//!
//! ```text
//! #AGTK-TF 1
//! Test:AG1:Annotation1	word	0.0	0.5	label=hello	speaker=A
//! Test:AG1:Annotation2	word	0.5	-
//! ```
//!
//! Columns are the annotation id, type, start offset, end offset and then one
//! `name=value` column per feature in name order. `-` marks an endpoint
//! without an offset. Type, names and values are percent-escaped (`%25`,
//! `%09`, `%0A`, `%0D`, `%3D`).
//!
//! Loading shares one anchor between all endpoints at the same offset and
//! gives every `-` endpoint an anchor of its own, so a graph survives a round
//! trip up to isomorphism when its anchored anchors have distinct offsets,
//! its unanchored anchors each touch one annotation and no anchor is isolated.

use std::fmt::Write as _;

use crate::id::{Identifier, ObjectKind};
use crate::io::text::{ensure_agset, escape, single_graph, unescape, SharedAnchors};
use crate::io::{Capabilities, Codec, IoError, Options, DEFAULT_AGSET};
use crate::model::DEFAULT_ANCHOR_UNIT;
use crate::offset::Offset;
use crate::registry::Registry;

pub const HEADER: &str = "#AGTK-TF 1";

pub struct Tf;

struct Row {
    id: Identifier,
    kind: String,
    start: Option<Offset>,
    end: Option<Offset>,
    features: Vec<(String, String)>,
}

fn parse_offset(field: &str, line: usize, column: usize) -> Result<Option<Offset>, IoError> {
    if field == "-" {
        return Ok(None);
    }
    let offset: Offset = field
        .parse()
        .map_err(|e: crate::offset::ParseOffsetError| {
            IoError::parse(line, column, e.to_string())
        })?;
    if offset.is_negative() {
        return Err(IoError::parse(
            line,
            column,
            format!("negative offset {field}"),
        ));
    }
    Ok(Some(offset))
}

fn parse(text: &str) -> Result<Vec<Row>, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim_end() == HEADER => {}
        _ => return Err(IoError::parse(1, 1, format!("expected header {HEADER:?}"))),
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let column = |i: usize| {
            fields[..i]
                .iter()
                .map(|f| f.chars().count() + 1)
                .sum::<usize>()
                + 1
        };
        if fields.len() < 4 {
            return Err(IoError::parse(
                n,
                1,
                format!("expected at least 4 columns, found {}", fields.len()),
            ));
        }
        let id = Identifier::parse(fields[0]).map_err(|e| IoError::parse(n, 1, e.to_string()))?;
        if id.depth() != ObjectKind::Annotation.depth() {
            return Err(IoError::parse(
                n,
                1,
                format!("{id} is not an annotation id"),
            ));
        }
        let kind = unescape(fields[1]).map_err(|e| IoError::parse(n, column(1), e))?;
        if kind.is_empty() {
            return Err(IoError::parse(n, column(1), "empty annotation type"));
        }
        let start = parse_offset(fields[2], n, column(2))?;
        let end = parse_offset(fields[3], n, column(3))?;
        if let (Some(s), Some(e)) = (start, end) {
            if s > e {
                return Err(IoError::parse(
                    n,
                    column(3),
                    format!("end {e} precedes start {s}"),
                ));
            }
        }
        let mut features: Vec<(String, String)> = Vec::new();
        for (i, field) in fields.iter().enumerate().skip(4) {
            let (name, value) = field
                .split_once('=')
                .ok_or_else(|| IoError::parse(n, column(i), "feature column lacks '='"))?;
            let name = unescape(name).map_err(|e| IoError::parse(n, column(i), e))?;
            let value = unescape(value).map_err(|e| IoError::parse(n, column(i), e))?;
            if name.is_empty() {
                return Err(IoError::parse(n, column(i), "empty feature name"));
            }
            if features.iter().any(|(k, _)| *k == name) {
                return Err(IoError::parse(
                    n,
                    column(i),
                    format!("duplicate feature {name:?}"),
                ));
            }
            features.push((name, value));
        }
        if let Some(first) = rows.first() {
            let first: &Row = first;
            if first.id.parent() != id.parent() {
                return Err(IoError::parse(
                    n,
                    1,
                    format!("{id} is not in graph {}", first.id.parent().unwrap_or("")),
                ));
            }
        }
        rows.push(Row {
            id,
            kind,
            start,
            end,
            features,
        });
    }
    Ok(rows)
}

impl Codec for Tf {
    fn name(&self) -> &'static str {
        "TF"
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
        let rows = parse(text)?;
        let file_ag = rows
            .first()
            .map(|r| Identifier::parse(r.id.parent().expect("depth 3")).expect("valid prefix"));
        let agset = match (&options.target, &file_ag) {
            (Some(t), _) => t.clone(),
            (None, Some(ag)) => ag.agset().to_string(),
            (None, None) => DEFAULT_AGSET.to_string(),
        };
        let agset = crate::id::parse_at_depth(&agset, 1, "an AGSet id")?;
        registry.atomically(agset.as_str(), |reg| -> Result<_, IoError> {
            ensure_agset(reg, agset.as_str())?;
            let requested = match &file_ag {
                Some(ag) => agset.child(ag.local()),
                None => agset.clone(),
            };
            let ag = reg.create_ag(requested.as_str(), None)?;
            let mut anchors = SharedAnchors::new(ag.clone(), DEFAULT_ANCHOR_UNIT);
            for row in &rows {
                let (start, end) = anchors.span(reg, row.start, row.end)?;
                let ann = reg.create_annotation(
                    ag.child(row.id.local()).as_str(),
                    start.as_str(),
                    end.as_str(),
                    &row.kind,
                )?;
                for (k, v) in &row.features {
                    reg.set_feature(ann.as_str(), k, v)?;
                }
            }
            Ok(vec![ag])
        })
    }

    fn store(&self, registry: &Registry, id: &str, _options: &Options) -> Result<String, IoError> {
        let ag = single_graph(registry, id)?;
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        let show = |o: Option<Offset>| o.map_or_else(|| "-".to_string(), |o| o.to_string());
        for ann in ag.annotations_by_offset() {
            let key = ag.sort_key(ann);
            write!(
                out,
                "{}\t{}\t{}\t{}",
                ann.id(),
                escape(ann.kind()),
                show(key.start),
                show(key.end)
            )
            .expect("string write");
            for (k, v) in ann.features().iter() {
                write!(out, "\t{}={}", escape(k), escape(v)).expect("string write");
            }
            out.push('\n');
        }
        Ok(out)
    }
}
