//! Load corpus files in several formats and write them out as others.

use agtk::io::{self, list_formats, IoError, Options};
use agtk::Registry;

const WRD: &str = "0 2400 she\n2400 5120 had\n5120 9920 your\n";
const XLABEL: &str = "signal a.wav\ntype 0\n#\n0.42 121 h#\n0.61 121 sh\n0.75 121 iy\n";
const LCF: &str = "0.25 1.5 A: hello there\n1.5 2.75 B: hi\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, caps) in list_formats() {
        println!("{name:9} {caps}");
    }

    let mut reg = Registry::new();
    let timit = io::load(&mut reg, "timit", WRD, &Options::new().target("Timit"))?;
    print!(
        "{}",
        io::store(&reg, "tf", timit[0].as_str(), &Options::new())?
    );

    let slow = io::load(
        &mut reg,
        "timit",
        WRD,
        &Options::new().target("Slow").param("sampleRate", "8000"),
    )?;
    print!(
        "{}",
        io::store(&reg, "tf", slow[0].as_str(), &Options::new())?
    );

    let phones = io::load(&mut reg, "xlabel", XLABEL, &Options::new().target("Xl"))?;
    print!(
        "{}",
        io::store(&reg, "tf", phones[0].as_str(), &Options::new())?
    );

    let call = io::load(&mut reg, "lcf", LCF, &Options::new().target("Call"))?;
    print!(
        "{}",
        io::store(&reg, "lcf", call[0].as_str(), &Options::new())?
    );

    match io::store(&reg, "timit", timit[0].as_str(), &Options::new()) {
        Err(e @ IoError::Capability { .. }) => println!("{}: {e}", e.name()),
        other => unreachable!("{other:?}"),
    }
    match io::load(&mut reg, "timit", "0 10 a\n10 x b\n", &Options::new()) {
        Err(e) => println!("{}: {e}", e.name()),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
