//! Serialize to AIF, load the text back, and load it again under a new name.

use agtk::io::{self, AifDocument, Options};
use agtk::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    reg.create_agset("Orig")?;
    let ag = reg.create_ag("Orig", None)?;
    let (a, b) = (
        reg.create_anchor(ag.as_str())?,
        reg.create_anchor(ag.as_str())?,
    );
    reg.set_anchor_offset(a.as_str(), "0.5".parse()?)?;
    let ann = reg.create_annotation(ag.as_str(), a.as_str(), b.as_str(), "note")?;
    reg.set_feature(ann.as_str(), "text", "x < y & \"quoted\"\ttabbed")?;

    let xml = io::store(&reg, "aif", "Orig", &Options::new())?;
    print!("{xml}");

    let mut fresh = Registry::new();
    io::load(&mut fresh, "aif", &xml, &Options::new())?;
    assert_eq!(fresh.to_xml("Orig")?, xml);
    println!("reloaded byte for byte");

    let doc = AifDocument::parse(&xml)?;
    let graphs = doc.apply(&mut fresh, Some("Copy"))?;
    println!(
        "loaded again as {}: {}",
        graphs[0],
        fresh.get_feature("Copy:AG1:Annotation1", "text")?
    );
    Ok(())
}
