//! Structural checks on AIF text that the loader would reject.

use agtk::validate::validate_text;
use agtk::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    reg.create_agset("V")?;
    let ag = reg.create_ag("V", None)?;
    let anchors: Vec<_> = (0..3)
        .map(|_| reg.create_anchor(ag.as_str()))
        .collect::<Result<_, _>>()?;
    reg.set_anchor_offset(anchors[0].as_str(), "0.5".parse()?)?;
    reg.set_anchor_offset(anchors[1].as_str(), "1.5".parse()?)?;
    reg.create_annotation(ag.as_str(), anchors[0].as_str(), anchors[1].as_str(), "w")?;
    reg.create_annotation(ag.as_str(), anchors[1].as_str(), anchors[2].as_str(), "w")?;
    let clean = reg.to_xml("V")?;
    println!("clean: {:?}", validate_text(&clean)?);

    let broken = clean
        .replace(r#"offset="1.5""#, r#"offset="0.25""#)
        .replace(
            "</AG>",
            r#"<Annotation id="V:AG1:Annotation3" type="w" start="V:AG1:Anchor3" end="V:AG1:Anchor2"/>
    <Annotation id="V:AG1:Annotation4" type="w" start="V:AG1:Anchor1" end="V:AG1:Anchor9"/></AG>"#,
        );
    for d in validate_text(&broken)? {
        println!("{d}");
    }
    Ok(())
}
