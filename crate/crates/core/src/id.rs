//! Fully-qualified identifiers.
//!
//! Every object is named by a colon-separated string whose proper prefixes are
//! the identifiers of its ancestors: `Timit:AG1:Anchor2` is an anchor of the
//! graph `Timit:AG1`, which belongs to the AGSet `Timit`. Parsing an identifier
//! therefore recovers the whole ancestry chain without touching a registry.

use std::fmt;
use std::str::FromStr;

use crate::error::{AgError, Result};

/// Maximum number of segments: AGSet, then Timeline/AG, then Signal/Anchor/Annotation.
pub const MAX_DEPTH: usize = 3;

/// The kind of object an identifier resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectKind {
    AgSet,
    Timeline,
    Signal,
    Ag,
    Anchor,
    Annotation,
}

impl ObjectKind {
    /// Number of segments an identifier of this kind has.
    pub fn depth(self) -> usize {
        match self {
            ObjectKind::AgSet => 1,
            ObjectKind::Timeline | ObjectKind::Ag => 2,
            ObjectKind::Signal | ObjectKind::Anchor | ObjectKind::Annotation => 3,
        }
    }

    /// Prefix used for generated identifier segments (`AG1`, `Anchor7`, ...).
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::AgSet => "AGSet",
            ObjectKind::Timeline => "Timeline",
            ObjectKind::Signal => "Signal",
            ObjectKind::Ag => "AG",
            ObjectKind::Anchor => "Anchor",
            ObjectKind::Annotation => "Annotation",
        }
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A syntactically valid identifier.
///
/// Segments match `[A-Za-z0-9_.-]+`; there are between one and three of them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identifier(String);

impl Identifier {
    pub fn parse(text: &str) -> Result<Identifier> {
        if text.is_empty() {
            return Err(AgError::malformed(text, "zero segments"));
        }
        let mut depth = 0;
        for segment in text.split(':') {
            depth += 1;
            if segment.is_empty() {
                return Err(AgError::malformed(text, "empty segment"));
            }
            if let Some(c) = segment.chars().find(|c| !is_segment_char(*c)) {
                let reason = if c.is_whitespace() {
                    "embedded whitespace".to_string()
                } else {
                    format!("character {c:?} not allowed in a segment")
                };
                return Err(AgError::malformed(text, reason));
            }
        }
        if depth > MAX_DEPTH {
            return Err(AgError::malformed(text, "more than three segments"));
        }
        Ok(Identifier(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.0.split(':')
    }

    pub fn depth(&self) -> usize {
        self.0.bytes().filter(|b| *b == b':').count() + 1
    }

    /// The final segment.
    pub fn local(&self) -> &str {
        self.0.rsplit(':').next().unwrap_or(&self.0)
    }

    /// The identifier of the immediate parent, if any.
    pub fn parent(&self) -> Option<&str> {
        self.0.rfind(':').map(|i| &self.0[..i])
    }

    /// The identifier of the owning AGSet (the first segment).
    pub fn agset(&self) -> &str {
        self.0.split(':').next().unwrap_or(&self.0)
    }

    /// Every proper prefix, outermost first.
    pub fn ancestors(&self) -> Vec<&str> {
        self.0
            .match_indices(':')
            .map(|(i, _)| &self.0[..i])
            .collect()
    }

    /// Builds `self:segment`. The caller guarantees `segment` is a valid segment
    /// and that the result does not exceed [`MAX_DEPTH`].
    pub(crate) fn child(&self, segment: &str) -> Identifier {
        debug_assert!(is_valid_segment(segment));
        debug_assert!(self.depth() < MAX_DEPTH);
        Identifier(format!("{}:{}", self.0, segment))
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Identifier {
    type Err = AgError;

    fn from_str(s: &str) -> Result<Self> {
        Identifier::parse(s)
    }
}

impl AsRef<str> for Identifier {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn is_segment_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

pub fn is_valid_segment(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_segment_char)
}

/// Parses `text` and checks that it has exactly `depth` segments.
pub(crate) fn parse_at_depth(text: &str, depth: usize, what: &str) -> Result<Identifier> {
    let id = Identifier::parse(text)?;
    if id.depth() != depth {
        return Err(AgError::malformed(
            text,
            format!("expected {what} ({depth} segment(s))"),
        ));
    }
    Ok(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_id_exposes_its_ancestry() {
        let id = Identifier::parse("Timit:AG1:Anchor2").unwrap();
        assert_eq!(
            id.segments().collect::<Vec<_>>(),
            ["Timit", "AG1", "Anchor2"]
        );
        assert_eq!(id.ancestors(), ["Timit", "Timit:AG1"]);
        assert_eq!(id.parent(), Some("Timit:AG1"));
        assert_eq!(id.agset(), "Timit");
        assert_eq!(id.local(), "Anchor2");
        assert_eq!(id.depth(), 3);
    }

    #[test]
    fn single_segment_root() {
        let id = Identifier::parse("Timit").unwrap();
        assert_eq!(id.segments().collect::<Vec<_>>(), ["Timit"]);
        assert!(id.ancestors().is_empty());
        assert_eq!(id.parent(), None);
    }

    #[test]
    fn malformed_ids() {
        for bad in [
            "", "A::B", ":A", "A:", "A B", "A:\tB", "a:b:c:d", "é", "x/y",
        ] {
            let err = Identifier::parse(bad).unwrap_err();
            assert_eq!(err.name(), "MalformedId", "{bad:?}");
        }
    }
}
