//! The string-only call surface used by scripting bindings.

use agtk::flat::Flat;

fn main() {
    let ag = Flat::new();
    let script: &[(&str, &[&str])] = &[
        ("CreateAGSet", &["Timit"]),
        ("CreateTimeline", &["Timit"]),
        (
            "CreateSignal",
            &[
                "Timit:Timeline1",
                "file:sa1.wav",
                "audio",
                "wav",
                "PCM",
                "16kHz",
                "",
            ],
        ),
        ("CreateAG", &["Timit", "Timit:Timeline1"]),
        ("CreateAnchor", &["Timit:AG1"]),
        ("CreateAnchor", &["Timit:AG1"]),
        ("SetAnchorOffset", &["Timit:AG1:Anchor1", "0.0"]),
        ("SetAnchorOffset", &["Timit:AG1:Anchor2", "1.5"]),
        (
            "CreateAnnotation",
            &[
                "Timit:AG1",
                "Timit:AG1:Anchor1",
                "Timit:AG1:Anchor2",
                "word",
            ],
        ),
        ("SetFeature", &["Timit:AG1:Annotation1", "English", "cat"]),
        ("SetFeature", &["Timit:AG1:Annotation1", "Japanese", "neko"]),
        ("ExistsAnnotation", &["Timit:AG1:Annotation1"]),
        ("GetAnchorOffset", &["Timit:AG1:Anchor2"]),
        ("GetAnnotationSetByOffset", &["Timit:AG1", "0.75"]),
        ("CreateTimeline", &["CallHome"]),
        ("toXML", &["Timit"]),
    ];
    for (function, args) in script {
        match ag.call(function, args) {
            Ok(value) => println!("{function} -> {value}"),
            Err(e) => println!("{function} !! {e}"),
        }
    }
}
