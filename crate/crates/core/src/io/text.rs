//! Helpers shared by the line-oriented codecs and the event log.

use std::collections::BTreeMap;

use crate::error::AgError;
use crate::id::{parse_at_depth, Identifier};
use crate::offset::Offset;
use crate::registry::Registry;

/// 1-based line and column (in characters) of byte offset `pos`.
pub(crate) fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let pos = pos.min(text.len());
    let before = &text[..floor_char_boundary(text, pos)];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
    (line, column)
}

fn floor_char_boundary(text: &str, mut pos: usize) -> usize {
    while !text.is_char_boundary(pos) {
        pos -= 1;
    }
    pos
}

/// Percent-escapes `%`, TAB, LF, CR and `=`.
pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            '=' => out.push_str("%3D"),
            c => out.push(c),
        }
    }
    out
}

/// Inverts [`escape`]. Any `%XX` byte escape is accepted as long as the result
/// is UTF-8.
pub(crate) fn unescape(s: &str) -> Result<String, String> {
    if !s.contains('%') {
        return Ok(s.to_string());
    }
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s
                .get(i + 1..i + 3)
                .filter(|h| h.bytes().all(|b| b.is_ascii_hexdigit()))
                .ok_or_else(|| format!("bad escape at byte {i} in {s:?}"))?;
            out.push(u8::from_str_radix(hex, 16).expect("hex digits"));
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| format!("escapes in {s:?} are not UTF-8"))
}

/// Makes sure AGSet `id` exists, creating it if needed.
pub(crate) fn ensure_agset(registry: &mut Registry, id: &str) -> Result<Identifier, AgError> {
    let id = parse_at_depth(id, 1, "an AGSet id")?;
    if registry.agset(id.as_str()).is_none() {
        registry.create_agset(id.as_str())?;
    }
    Ok(id)
}

/// Creates anchors on demand, sharing one anchor per distinct offset.
pub(crate) struct SharedAnchors {
    ag: Identifier,
    unit: String,
    by_offset: BTreeMap<Offset, Identifier>,
}

impl SharedAnchors {
    pub(crate) fn new(ag: Identifier, unit: &str) -> Self {
        SharedAnchors {
            ag,
            unit: unit.to_string(),
            by_offset: BTreeMap::new(),
        }
    }

    /// The anchor at `offset`, or a fresh unshared unanchored one for `None`.
    pub(crate) fn at(
        &mut self,
        registry: &mut Registry,
        offset: Option<Offset>,
    ) -> Result<Identifier, AgError> {
        let Some(offset) = offset else {
            return self.fresh(registry, None);
        };
        if let Some(id) = self.by_offset.get(&offset) {
            return Ok(id.clone());
        }
        let id = self.fresh(registry, Some(offset))?;
        self.by_offset.insert(offset, id.clone());
        Ok(id)
    }

    /// Anchors for an annotation from `start` to `end`. A zero-length span
    /// gets a second, unshared anchor for its end.
    pub(crate) fn span(
        &mut self,
        registry: &mut Registry,
        start: Option<Offset>,
        end: Option<Offset>,
    ) -> Result<(Identifier, Identifier), AgError> {
        let a = self.at(registry, start)?;
        let b = if start.is_some() && start == end {
            self.fresh(registry, end)?
        } else {
            self.at(registry, end)?
        };
        Ok((a, b))
    }

    pub(crate) fn fresh(
        &mut self,
        registry: &mut Registry,
        offset: Option<Offset>,
    ) -> Result<Identifier, AgError> {
        let id = registry.create_anchor(self.ag.as_str())?;
        if self.unit != crate::model::DEFAULT_ANCHOR_UNIT {
            registry.set_anchor_unit(id.as_str(), &self.unit)?;
        }
        if let Some(o) = offset {
            registry.set_anchor_offset(id.as_str(), o)?;
        }
        Ok(id)
    }
}

/// The graph a single-graph format stores. An AGSet is accepted when it holds
/// exactly one graph.
pub(crate) fn single_graph<'r>(
    registry: &'r Registry,
    id: &str,
) -> Result<&'r crate::model::Ag, crate::io::IoError> {
    use crate::registry::ObjectRef;
    match registry.resolve(id)? {
        ObjectRef::Ag(ag) => Ok(ag),
        ObjectRef::AgSet(set) => {
            let mut graphs = set.graphs();
            match (graphs.next(), graphs.next()) {
                (Some(ag), None) => Ok(ag),
                _ => Err(crate::io::IoError::Unrepresentable(format!(
                    "AGSet {id} must hold exactly one graph"
                ))),
            }
        }
        other => {
            Err(AgError::malformed(id, format!("names a {}, expected an AG", other.kind())).into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escape_round_trip() {
        for s in [
            "",
            "plain",
            "a=b",
            "100%",
            "tab\there",
            "multi\nline\r\n",
            "ünï=cödé%",
        ] {
            let e = escape(s);
            assert!(!e.contains(['\t', '\n', '\r', '=']));
            assert_eq!(unescape(&e).unwrap(), s);
        }
        assert!(unescape("%zz").is_err());
        assert!(unescape("%4").is_err());
        assert!(unescape("%FF").is_err());
    }

    #[test]
    fn positions() {
        let text = "ab\ncdé\nf";
        assert_eq!(line_col(text, 0), (1, 1));
        assert_eq!(line_col(text, 3), (2, 1));
        assert_eq!(line_col(text, 7), (2, 4));
        assert_eq!(line_col(text, 8), (3, 1));
    }
}
