//! Build a small annotation graph by hand and print it as AIF.

use agtk::{Offset, Registry, SignalInfo};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    let corpus = reg.create_agset("Timit")?;
    let timeline = reg.create_timeline(corpus.as_str())?;
    let mut info = SignalInfo::new("file:/corpus/timit/train/dr1/fcjf0/sa1.wav");
    info.mime_class = "audio".into();
    info.mime_type = "wav".into();
    info.unit = "16kHz".into();
    reg.create_signal(timeline.as_str(), info)?;

    let ag = reg.create_ag(corpus.as_str(), Some(timeline.as_str()))?;
    let start = reg.create_anchor(ag.as_str())?;
    let end = reg.create_anchor(ag.as_str())?;
    reg.set_anchor_offset(start.as_str(), "0.25".parse()?)?;
    reg.set_anchor_offset(end.as_str(), Offset::from_secs(1))?;

    let word = reg.create_annotation(ag.as_str(), start.as_str(), end.as_str(), "word")?;
    reg.set_feature(word.as_str(), "English", "cat")?;
    reg.set_feature(word.as_str(), "Japanese", "neko")?;

    println!("created {word} from {start} to {end}");
    println!("{}", reg.to_xml(corpus.as_str())?);
    Ok(())
}
