//! Bracketed parses become graphs over token positions and back.

use agtk::io::treebank::{parse_trees, tree_of};
use agtk::io::{self, Options};
use agtk::Registry;

const PARSES: &str =
    "( (S (NP (DT The) (NN dog))\n      (VP (VBD barked))\n      (. .)) )\n(NP (NNP Kim))\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for tree in parse_trees(PARSES)? {
        println!("parsed: {tree}");
    }

    let mut reg = Registry::new();
    let graphs = io::load(&mut reg, "treebank", PARSES, &Options::new().target("Ptb"))?;
    for ag in &graphs {
        let g = reg.ag(ag.as_str())?;
        println!(
            "{ag}: {} anchors, {} annotations",
            g.anchors().count(),
            g.annotations().count()
        );
        for ann in reg.get_annotations_by_type(ag.as_str(), "syntax")? {
            let f = reg.get_features(ann.as_str())?;
            println!(
                "  {} tag={:?} depth={}",
                ann,
                f.get("tag").unwrap_or(""),
                f.get("depth").unwrap_or("")
            );
        }
        println!("  rebuilt: {}", tree_of(g)?);
    }
    print!("{}", io::store(&reg, "treebank", "Ptb", &Options::new())?);
    Ok(())
}
