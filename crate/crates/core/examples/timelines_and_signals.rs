//! Timelines group synchronized signals. Creating one under a missing AGSet
//! fails, and a timeline cannot be deleted while a graph is bound to it.

use agtk::{Registry, SignalInfo};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reg = Registry::new();
    let agset = reg.create_agset("Timit")?;

    println!("{}", reg.create_timeline(agset.as_str())?);
    println!("{}", reg.create_timeline("Timit:Timeline2")?);
    for id in ["CallHome", "CallHome:Timeline2"] {
        match reg.create_timeline(id) {
            Ok(t) => println!("{t}"),
            Err(e) => println!("{id}: {} ({e})", e.name()),
        }
    }

    // One stereo file, two tracks.
    for track in ["left", "right"] {
        let mut info = SignalInfo::new("file:/corpus/callhome/en_4065.sph");
        info.mime_class = "audio".into();
        info.encoding = "mu-law".into();
        info.track = track.into();
        let sig = reg.create_signal("Timit:Timeline1", info)?;
        reg.set_feature(sig.as_str(), "channel", track)?;
    }
    println!("signals: {}", ids(&reg.get_signals("Timit:Timeline1")?));

    let ag = reg.create_ag("Timit", Some("Timit:Timeline1"))?;
    if let Err(e) = reg.delete("Timit:Timeline1") {
        println!("delete refused: {e}");
    }
    reg.delete(ag.as_str())?;
    reg.delete("Timit:Timeline1")?;
    println!("timeline deleted: {}", !reg.exists("Timit:Timeline1"));
    println!(
        "signal gone too: {}",
        !reg.exists("Timit:Timeline1:Signal1")
    );
    Ok(())
}

fn ids(v: &[agtk::Identifier]) -> String {
    v.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(" ")
}
