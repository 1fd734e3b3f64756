//! The four offset queries over a short two-speaker exchange.

use agtk::{Offset, Registry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    reg.create_agset("Call")?;
    let ag = reg.create_ag("Call", None)?;
    let mut at = |o: &str| -> Result<String, Box<dyn std::error::Error>> {
        let a = reg.create_anchor(ag.as_str())?;
        reg.set_anchor_offset(a.as_str(), o.parse()?)?;
        Ok(a.into_string())
    };
    let t: Vec<String> = ["0.0", "1.2", "2.0", "2.8", "4.0"]
        .into_iter()
        .map(&mut at)
        .collect::<Result<_, _>>()?;
    for (s, e, speaker) in [(0, 2, "A"), (1, 3, "B"), (2, 4, "A")] {
        let turn = reg.create_annotation(ag.as_str(), &t[s], &t[e], "turn")?;
        reg.set_feature(turn.as_str(), "speaker", speaker)?;
    }
    for w in t.windows(2) {
        reg.create_annotation(ag.as_str(), &w[0], &w[1], "word")?;
    }

    let off = |s: &str| s.parse::<Offset>();
    println!(
        "anchors within 0.5 of 1.5: {}",
        ids(&reg.get_anchor_set_by_offset(ag.as_str(), off("1.5")?, off("0.5")?)?)
    );
    println!(
        "nearest to 1.6 (a tie): {}",
        ids(&reg.get_anchor_set_nearest_offset(ag.as_str(), off("1.6")?)?)
    );
    println!(
        "spans covering 2.0: {}",
        ids(&reg.get_annotation_set_by_offset(ag.as_str(), off("2.0")?)?)
    );
    println!(
        "starting in [1.0, 2.5]: {}",
        ids(&reg.get_annotation_seq_by_offset(
            ag.as_str(),
            Some(off("1.0")?),
            Some(off("2.5")?)
        )?)
    );
    println!(
        "speaker A: {}",
        ids(&reg.get_annotations_by_feature(ag.as_str(), "speaker", "A")?)
    );
    Ok(())
}

fn ids(v: &[agtk::Identifier]) -> String {
    v.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(" ")
}
