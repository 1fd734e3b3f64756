//! A hub with two hand-written components and an extension event.

use std::cell::RefCell;
use std::rc::Rc;

use agtk::events::{EventMessage, Hub, HUB};
use agtk::Offset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut clock = 0;
    let mut hub = Hub::with_clock(move || {
        clock += 1;
        Offset::from_secs(clock)
    });
    hub.schema_mut().register_extension("Spell", &["word"]);
    hub.schema_mut().register_extension("Spelled", &["letters"]);

    hub.register_component("speller", ["Spell"], |e, out| {
        let word = e.param("word").unwrap_or_default();
        let letters: Vec<String> = word.chars().map(String::from).collect();
        out.reply(e, "Spelled").set("letters", letters.join(" "));
    })?;
    let heard = Rc::new(RefCell::new(Vec::new()));
    let sink = heard.clone();
    hub.register_component("ui", ["Stop"], move |e, _| {
        sink.borrow_mut().push(e.clone())
    })?;

    hub.dispatch(EventMessage::new("ui", HUB, "Spell").with("word", "neko"))?;
    if let Err(e) = hub.dispatch(EventMessage::new("ui", HUB, "Teleport")) {
        println!("{}: {e}", e.name());
    }
    print!("{}", hub.log());
    println!(
        "ui heard {:?}",
        heard.borrow().iter().map(|e| &e.params).collect::<Vec<_>>()
    );
    Ok(())
}
