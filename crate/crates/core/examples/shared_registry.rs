//! One registry shared by several threads.

use std::thread;

use agtk::{Offset, SharedRegistry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shared = SharedRegistry::new();
    let ag = shared.write(|r| -> agtk::Result<_> {
        r.create_agset("T")?;
        r.create_ag("T", None)
    })?;

    let workers: Vec<_> = (0..4)
        .map(|w| {
            let (shared, ag) = (shared.clone(), ag.clone());
            thread::spawn(move || {
                for i in 0..25 {
                    shared
                        .write(|r| -> agtk::Result<()> {
                            let a = r.create_anchor(ag.as_str())?;
                            r.set_anchor_offset(
                                a.as_str(),
                                Offset::from_nanos((w * 25 + i) * 10_000_000),
                            )
                        })
                        .expect("anchor");
                }
            })
        })
        .collect();
    for w in workers {
        w.join().expect("worker");
    }
    let (count, first) = shared.read(|r| {
        let ids = r.get_anchor_set(ag.as_str()).unwrap_or_default();
        (
            ids.len(),
            ids.first().map(|i| i.to_string()).unwrap_or_default(),
        )
    });
    println!("{count} anchors, earliest {first}");
    Ok(())
}
