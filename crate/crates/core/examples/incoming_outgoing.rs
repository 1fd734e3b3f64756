//! Five annotations meet at an anchor that starts three more.

use agtk::Registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    reg.create_agset("Fig")?;
    let ag = reg.create_ag("Fig", None)?;
    let id = |local: &str| format!("{ag}:{local}");
    for n in ["n1", "n2", "n3"] {
        reg.create_anchor(&id(n))?;
    }
    for a in ["a", "b", "c", "d", "e"] {
        reg.create_annotation(&id(a), &id("n1"), &id("n2"), "tier1")?;
    }
    for a in ["f", "g", "h"] {
        reg.create_annotation(&id(a), &id("n2"), &id("n3"), "tier2")?;
    }
    println!(
        "into n2:   {}",
        ids(&reg.get_incoming_annotation_set(&id("n2"))?)
    );
    println!(
        "out of n2: {}",
        ids(&reg.get_outgoing_annotation_set(&id("n2"))?)
    );

    match reg.create_annotation(ag.as_str(), &id("n3"), &id("n1"), "loop") {
        Ok(_) => unreachable!("graphs stay acyclic"),
        Err(e) => println!("{}: {e}", e.name()),
    }
    Ok(())
}

fn ids(v: &[agtk::Identifier]) -> String {
    v.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(" ")
}
