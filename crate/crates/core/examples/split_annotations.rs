//! Splitting keeps the type and features on every piece and tiles the span.

use agtk::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    reg.create_agset("S")?;
    let ag = reg.create_ag("S", None)?;
    let (a, b) = (
        reg.create_anchor(ag.as_str())?,
        reg.create_anchor(ag.as_str())?,
    );
    reg.set_anchor_offset(a.as_str(), "1.0".parse()?)?;
    reg.set_anchor_offset(b.as_str(), "2.0".parse()?)?;
    let phrase = reg.create_annotation(ag.as_str(), a.as_str(), b.as_str(), "phrase")?;
    reg.set_feature(phrase.as_str(), "label", "hello world")?;

    let (left, right) = reg.split_annotation(phrase.as_str())?;
    println!("split: {left} + {right}");

    for piece in reg.nsplit_annotation(right.as_str(), 4)? {
        let ann = reg.annotation(piece.as_str())?;
        let at = |x: &str| {
            reg.get_anchor_offset(x)
                .ok()
                .flatten()
                .map_or("-".into(), |o| o.to_string())
        };
        println!(
            "{piece}: {} .. {} {} label={}",
            at(ann.start().as_str()),
            at(ann.end().as_str()),
            ann.kind(),
            ann.features().get("label").unwrap_or("")
        );
    }
    Ok(())
}
