//! Drive the transcription session through its event hub, save the log, and
//! rebuild the same graph by replaying it.

use agtk::events::{EventLog, Session, DEFAULT_SESSION_AG};
use agtk::SharedRegistry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = SharedRegistry::new();
    let mut session = Session::new(registry.clone(), DEFAULT_SESSION_AG)?;

    session.send(
        "table",
        "CreateAnnotation",
        &[("start", "0.5"), ("end", "1.75")],
    )?;
    let created = session.table.last().expect("a reply");
    println!("table got {} {:?}", created.name, created.params);
    session.send(
        "table",
        "SetFeature",
        &[("feature", "text"), ("value", "good morning")],
    )?;
    session.send(
        "waveform",
        "SetRegion",
        &[("start", "0.25"), ("end", "2.0")],
    )?;
    session.send("table", "GetRegion", &[])?;
    session.send(
        "table",
        "DeleteAnnotation",
        &[("AnnotationId", "Session:AG1:Annotation7")],
    )?;
    println!("error reply: {:?}", session.table.last().map(|e| e.params));

    let text = session.hub.log().encode();
    print!("{text}");

    let log = EventLog::parse(&text)?;
    let replayed = SharedRegistry::new();
    Session::replay(replayed.clone(), DEFAULT_SESSION_AG, &log)?;
    let live = registry.read(|r| r.to_xml("Session"))?;
    let again = replayed.read(|r| r.to_xml("Session"))?;
    assert_eq!(live, again);
    print!("{again}");
    Ok(())
}
