//! The `agtk` command line.
//!
//! Exit codes: 0 success, 1 usage (bad flags, unreadable or unwritable
//! files, unknown formats), 2 malformed input, 3 semantic errors such as
//! unsupported conversions, missing objects, bad bounds or validation
//! failures. Results go to standard output, errors to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::AgError;
use crate::events::{EventError, EventLog, Session, DEFAULT_SESSION_AG};
use crate::id::Identifier;
use crate::io::{self, AifDocument, IoError, Options};
use crate::offset::Offset;
use crate::registry::{Registry, SharedRegistry};
use crate::validate::validate_text;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;

/// Environment variable supplying the TIMIT sample rate when `--samplerate`
/// is absent.
pub const SAMPLERATE_ENV: &str = "AGTK_SAMPLERATE";

#[derive(Debug, Parser)]
#[command(name = "agtk", version, about = "Annotation graph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert between annotation file formats.
    Convert {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// AGSet to load into.
        #[arg(long)]
        agset: Option<String>,
        /// TIMIT samples per second.
        #[arg(long)]
        samplerate: Option<String>,
    },
    /// Query a graph stored as AIF.
    #[command(subcommand)]
    Query(Query),
    /// Check an AIF file for structural violations.
    Validate {
        #[arg(long)]
        aif: PathBuf,
    },
    /// Count the objects in an AIF file.
    Info {
        #[arg(long)]
        aif: PathBuf,
    },
    /// List the registered formats.
    Formats,
    /// Replay an event log and write the resulting AGSet as AIF.
    EventsReplay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = DEFAULT_SESSION_AG)]
        ag: String,
    },
}

#[derive(Debug, Args)]
struct Source {
    #[arg(long)]
    aif: PathBuf,
    /// Graph to query; may be omitted when the file holds one.
    #[arg(long)]
    ag: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Query {
    /// Annotations whose span contains an offset.
    Overlap {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        offset: String,
    },
    /// Annotations by start offset, optionally bounded.
    Seq {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        begin: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        end: Option<String>,
    },
    /// Anchors at the offset nearest to the given one.
    AnchorsNear {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        offset: String,
    },
    /// Anchors within epsilon of an offset.
    Anchors {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        offset: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        epsilon: String,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match &e {
            IoError::Parse { .. } => EXIT_PARSE,
            IoError::UnknownFormat(_) | IoError::Io(_) => EXIT_USAGE,
            IoError::Capability { .. } | IoError::Unrepresentable(_) | IoError::Ag(_) => {
                EXIT_SEMANTIC
            }
        };
        Failure::new(code, format!("{}: {e}", e.name()))
    }
}

impl From<AgError> for Failure {
    fn from(e: AgError) -> Self {
        Failure::new(EXIT_SEMANTIC, format!("{}: {e}", e.name()))
    }
}

impl From<EventError> for Failure {
    fn from(e: EventError) -> Self {
        let code = match e {
            EventError::Decode { .. } => EXIT_PARSE,
            EventError::Ag(e) => return e.into(),
            EventError::Schema(_) | EventError::DuplicateComponent(_) => EXIT_SEMANTIC,
        };
        Failure::new(code, format!("{}: {e}", e.name()))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::new(
            EXIT_USAGE,
            format!(
                "cannot read {}: {e}\n\nFor more information, try '--help'.",
                path.display()
            ),
        )
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))
}

fn offset(flag: &str, text: &str) -> Result<Offset, Failure> {
    text.trim()
        .parse()
        .map_err(|e| Failure::new(EXIT_SEMANTIC, format!("--{flag}: {e}")))
}

fn load_aif(path: &Path) -> Result<Registry, Failure> {
    let doc = AifDocument::parse(&read(path)?)?;
    let mut registry = Registry::new();
    doc.apply(&mut registry, None)?;
    Ok(registry)
}

fn pick_graph(registry: &Registry, wanted: Option<&str>) -> Result<String, Failure> {
    if let Some(ag) = wanted {
        registry.ag(ag)?;
        return Ok(ag.to_string());
    }
    let all: Vec<&Identifier> = registry
        .agsets()
        .flat_map(|s| s.graphs().map(|g| g.id()))
        .collect();
    match all.as_slice() {
        [one] => Ok(one.as_str().to_string()),
        _ => Err(Failure::new(
            EXIT_SEMANTIC,
            format!("the file holds {} graphs; choose one with --ag", all.len()),
        )),
    }
}

fn lines(ids: &[Identifier]) -> String {
    ids.iter().map(|i| format!("{i}\n")).collect()
}

fn convert(
    from: &str,
    to: &str,
    input: &Path,
    output: &Path,
    agset: Option<String>,
    samplerate: Option<String>,
) -> Result<String, Failure> {
    let (source, sink) = (io::codec(from)?, io::codec(to)?);
    for (codec, operation, ok) in [
        (source, "load", source.capabilities().load),
        (sink, "store", sink.capabilities().store),
    ] {
        if !ok {
            return Err(IoError::Capability {
                format: codec.name(),
                operation,
            }
            .into());
        }
    }
    let text = read(input)?;
    let mut options = Options::new();
    options.target = agset;
    if let Some(rate) = samplerate.or_else(|| std::env::var(SAMPLERATE_ENV).ok()) {
        options = options.param("sampleRate", rate);
    }
    let mut registry = Registry::new();
    let created = source.load(&mut registry, &text, &options)?;
    let id = match created.as_slice() {
        [one] => one.as_str().to_string(),
        _ => registry
            .agsets()
            .next()
            .map(|s| s.id().as_str().to_string())
            .ok_or_else(|| Failure::new(EXIT_SEMANTIC, "the input holds no AGSet"))?,
    };
    let out = sink.store(&registry, &id, &Options::new())?;
    write(output, &out)?;
    Ok(lines(&created))
}

type QueryFn = Box<dyn FnOnce(&Registry, &str) -> Result<Vec<Identifier>, Failure>>;

fn query(q: Query) -> Result<String, Failure> {
    let (source, run): (Source, QueryFn) = match q {
        Query::Overlap { source, offset: o } => (
            source,
            Box::new(move |r, ag| Ok(r.get_annotation_set_by_offset(ag, offset("offset", &o)?)?)),
        ),
        Query::Seq { source, begin, end } => (
            source,
            Box::new(move |r, ag| {
                let begin = begin.map(|b| offset("begin", &b)).transpose()?;
                let end = end.map(|e| offset("end", &e)).transpose()?;
                Ok(r.get_annotation_seq_by_offset(ag, begin, end)?)
            }),
        ),
        Query::AnchorsNear { source, offset: o } => (
            source,
            Box::new(move |r, ag| Ok(r.get_anchor_set_nearest_offset(ag, offset("offset", &o)?)?)),
        ),
        Query::Anchors {
            source,
            offset: o,
            epsilon,
        } => (
            source,
            Box::new(move |r, ag| {
                let at = offset("offset", &o)?;
                let eps = offset("epsilon", &epsilon)?;
                Ok(r.get_anchor_set_by_offset(ag, at, eps)?)
            }),
        ),
    };
    let registry = load_aif(&source.aif)?;
    let ag = pick_graph(&registry, source.ag.as_deref())?;
    Ok(lines(&run(&registry, &ag)?))
}

fn info(path: &Path) -> Result<String, Failure> {
    let registry = load_aif(path)?;
    let mut out = String::new();
    for set in registry.agsets() {
        let graphs: Vec<_> = set.graphs().collect();
        let anchors: usize = graphs.iter().map(|g| g.anchors().count()).sum();
        let annotations: usize = graphs.iter().map(|g| g.annotations().count()).sum();
        let features: usize = graphs
            .iter()
            .flat_map(|g| g.annotations())
            .map(|a| a.features().len())
            .sum();
        out.push_str(&format!(
            "agset: {}\ntimelines: {}\nsignals: {}\ngraphs: {}\nanchors: {anchors}\nannotations: {annotations}\nfeatures: {features}\n",
            set.id(),
            set.timelines().count(),
            set.timelines().map(|t| t.signals().count()).sum::<usize>(),
            graphs.len(),
        ));
    }
    Ok(out)
}

fn events_replay(log: &Path, out: &Path, ag: &str) -> Result<String, Failure> {
    let log = EventLog::parse(&read(log)?)?;
    let registry = SharedRegistry::new();
    let session = Session::replay(registry.clone(), ag, &log)?;
    let agset = Identifier::parse(ag)?.agset().to_string();
    let xml = registry.read(|r| r.to_xml(&agset))?;
    write(out, &xml)?;
    Ok(format!("replayed {} events\n", session.hub.log().len()))
}

fn dispatch(command: Command) -> Result<String, Failure> {
    match command {
        Command::Convert {
            from,
            to,
            input,
            output,
            agset,
            samplerate,
        } => convert(&from, &to, &input, &output, agset, samplerate),
        Command::Query(q) => query(q),
        Command::Validate { aif } => {
            let diagnostics = validate_text(&read(&aif)?)?;
            if diagnostics.is_empty() {
                return Ok("ok\n".to_string());
            }
            let report: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
            Err(Failure::new(EXIT_SEMANTIC, report.join("\n")))
        }
        Command::Info { aif } => info(&aif),
        Command::Formats => Ok(io::list_formats()
            .into_iter()
            .map(|(name, caps)| format!("{name} {caps}\n"))
            .collect()),
        Command::EventsReplay { log, out, ag } => events_replay(&log, &out, &ag),
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `stdout` and errors to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message);
            f.code
        }
    }
}
