//! Feature maps, copies and lookups by feature value or type.

use agtk::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    reg.create_agset("F")?;
    let ag = reg.create_ag("F", None)?;
    let (a, b) = (
        reg.create_anchor(ag.as_str())?,
        reg.create_anchor(ag.as_str())?,
    );
    let w = reg.create_annotation(ag.as_str(), a.as_str(), b.as_str(), "word")?;
    reg.set_feature(w.as_str(), "pos", "NN")?;
    reg.set_feature(w.as_str(), "text", "dog")?;
    reg.set_feature(ag.as_str(), "speaker", "A")?;

    let copy = reg.copy_annotation(w.as_str())?;
    reg.set_feature(copy.as_str(), "text", "hound")?;
    println!(
        "{w}: {:?}",
        reg.get_features(w.as_str())?.iter().collect::<Vec<_>>()
    );
    println!(
        "{copy}: {:?}",
        reg.get_features(copy.as_str())?.iter().collect::<Vec<_>>()
    );

    println!(
        "pos=NN: {}",
        ids(&reg.get_annotations_by_feature(ag.as_str(), "pos", "NN")?)
    );
    reg.delete_feature(copy.as_str(), "pos")?;
    println!(
        "after delete: {}",
        ids(&reg.get_annotations_by_feature(ag.as_str(), "pos", "NN")?)
    );
    println!(
        "words: {}",
        ids(&reg.get_annotations_by_type(ag.as_str(), "word")?)
    );
    match reg.get_feature(copy.as_str(), "pos") {
        Ok(v) => println!("pos = {v}"),
        Err(e) => println!("{}: {e}", e.name()),
    }
    Ok(())
}

fn ids(v: &[agtk::Identifier]) -> String {
    v.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(" ")
}
