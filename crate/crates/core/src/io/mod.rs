//! File formats and the codec registry.
//!
//! Every codec parses its whole input before touching the registry, then
//! materializes graphs through the public API inside
//! [`Registry::atomically`], so a failed load leaves the registry as it was.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::error::AgError;
use crate::id::Identifier;
use crate::registry::Registry;

pub mod aif;
pub mod lcf;
pub mod tf;
pub mod timit;
pub mod treebank;
pub mod xlabel;

pub(crate) mod text;

pub use aif::AifDocument;

/// AGSet used by formats that carry no identifiers when no target is given.
pub const DEFAULT_AGSET: &str = "Corpus";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("format {format} cannot {operation}")]
    Capability {
        format: &'static str,
        operation: &'static str,
    },
    #[error("cannot represent in this format: {0}")]
    Unrepresentable(String),
    #[error(transparent)]
    Ag(#[from] AgError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IoError {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        IoError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for errors in the input text itself.
    pub fn is_parse(&self) -> bool {
        matches!(self, IoError::Parse { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            IoError::UnknownFormat(_) => "UnknownFormat",
            IoError::Parse { .. } => "ParseError",
            IoError::Capability { .. } => "CapabilityError",
            IoError::Unrepresentable(_) => "Unrepresentable",
            IoError::Ag(e) => e.name(),
            IoError::Io(_) => "IoError",
        }
    }
}

/// Load and store support of a codec.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub load: bool,
    pub store: bool,
}

impl fmt::Display for Capabilities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.load, self.store) {
            (true, true) => "input/output",
            (true, false) => "input",
            (false, true) => "output",
            (false, false) => "none",
        })
    }
}

/// Target AGSet and format-specific options such as `sampleRate`.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub target: Option<String>,
    pub params: BTreeMap<String, String>,
}

impl Options {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn target(mut self, agset: impl Into<String>) -> Self {
        self.target = Some(agset.into());
        self
    }

    pub fn param(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.params.insert(name.into(), value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.params.get(name).map(String::as_str)
    }
}

/// A file format handler.
pub trait Codec: Send + Sync {
    /// Canonical format name.
    fn name(&self) -> &'static str;

    fn capabilities(&self) -> Capabilities;

    /// Parses `text` and creates its graphs, returning the new AG ids.
    fn load(
        &self,
        registry: &mut Registry,
        text: &str,
        options: &Options,
    ) -> Result<Vec<Identifier>, IoError> {
        let _ = (registry, text, options);
        Err(IoError::Capability {
            format: self.name(),
            operation: "load",
        })
    }

    /// Serializes the object named by `id`.
    fn store(&self, registry: &Registry, id: &str, options: &Options) -> Result<String, IoError> {
        let _ = (registry, id, options);
        Err(IoError::Capability {
            format: self.name(),
            operation: "store",
        })
    }
}

static CODECS: [&dyn Codec; 6] = [
    &aif::Aif,
    &lcf::Lcf,
    &tf::Tf,
    &timit::Timit,
    &treebank::Treebank,
    &xlabel::Xlabel,
];

/// Looks a codec up by case-insensitive name.
pub fn codec(name: &str) -> Result<&'static dyn Codec, IoError> {
    CODECS
        .iter()
        .copied()
        .find(|c| c.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| IoError::UnknownFormat(name.to_string()))
}

/// Every format with its capabilities, alphabetically.
pub fn list_formats() -> Vec<(&'static str, Capabilities)> {
    let mut all: Vec<_> = CODECS
        .iter()
        .map(|c| (c.name(), c.capabilities()))
        .collect();
    all.sort_by_key(|(name, _)| name.to_ascii_lowercase());
    all
}

/// Loads `text` in the named format.
pub fn load(
    registry: &mut Registry,
    format: &str,
    text: &str,
    options: &Options,
) -> Result<Vec<Identifier>, IoError> {
    let codec = codec(format)?;
    if !codec.capabilities().load {
        return Err(IoError::Capability {
            format: codec.name(),
            operation: "load",
        });
    }
    codec.load(registry, text, options)
}

/// Serializes object `id` in the named format.
pub fn store(
    registry: &Registry,
    format: &str,
    id: &str,
    options: &Options,
) -> Result<String, IoError> {
    let codec = codec(format)?;
    if !codec.capabilities().store {
        return Err(IoError::Capability {
            format: codec.name(),
            operation: "store",
        });
    }
    codec.store(registry, id, options)
}

/// Reads the whole stream, then loads it.
pub fn load_from(
    registry: &mut Registry,
    format: &str,
    mut source: impl std::io::Read,
    options: &Options,
) -> Result<Vec<Identifier>, IoError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    load(registry, format, &text, options)
}

pub fn store_into(
    registry: &Registry,
    format: &str,
    id: &str,
    mut sink: impl std::io::Write,
    options: &Options,
) -> Result<(), IoError> {
    let text = store(registry, format, id, options)?;
    sink.write_all(text.as_bytes())?;
    Ok(())
}
