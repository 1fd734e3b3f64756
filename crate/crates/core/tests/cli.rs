mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use agtk::{Identifier, Offset, Registry};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn agtk_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_agtk"));
    cmd.args(args).env_remove("AGTK_SAMPLERATE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("run agtk");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn agtk(args: &[&str]) -> Run {
    agtk_env(args, &[])
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(ids: Vec<Identifier>) -> String {
    ids.iter().map(|i| format!("{i}\n")).collect()
}

const WRD: &str = "0 2400 she\n2400 5120 had\n5120 9920 your\n9920 13500 dark\n13500 20000 suit\n";

fn test_set() -> Registry {
    let mut reg = Registry::new();
    reg.create_agset("Test").unwrap();
    let ag = reg.create_ag("Test", None).unwrap();
    let a = reg.create_anchor(ag.as_str()).unwrap();
    let b = reg.create_anchor(ag.as_str()).unwrap();
    reg.set_anchor_offset(a.as_str(), "0.0".parse().unwrap())
        .unwrap();
    reg.set_anchor_offset(b.as_str(), "1.0".parse().unwrap())
        .unwrap();
    let ann = reg
        .create_annotation(ag.as_str(), a.as_str(), b.as_str(), "word")
        .unwrap();
    reg.set_feature(ann.as_str(), "English", "cat").unwrap();
    reg.set_feature(ann.as_str(), "Japanese", "neko").unwrap();
    reg
}

#[test]
fn timit_converts_to_aif() {
    let dir = TempDir::new().unwrap();
    let wrd = write(&dir, "a.wrd", WRD);
    let out = dir.path().join("a.aif");
    let r = agtk(&[
        "convert",
        "--from",
        "timit",
        "--to",
        "aif",
        "--input",
        s(&wrd),
        "--output",
        s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "Corpus:AG1\n");
    let xml = std::fs::read_to_string(&out).unwrap();
    assert_eq!(xml.matches("<Annotation ").count(), 5);
    assert!(xml.contains(r#"offset="1.25""#), "20000 samples at 16 kHz");

    let r = agtk(&[
        "convert",
        "--from",
        "timit",
        "--to",
        "aif",
        "--input",
        s(&wrd),
        "--output",
        s(&out),
        "--agset",
        "Timit",
    ]);
    assert_eq!(r.stdout, "Timit:AG1\n");
}

#[test]
fn sample_rate_comes_from_flag_then_environment() {
    let dir = TempDir::new().unwrap();
    let wrd = write(&dir, "a.wrd", WRD);
    let out = dir.path().join("a.aif");
    let convert = |extra: &[&str], env: &[(&str, &str)]| {
        let mut args = vec![
            "convert",
            "--from",
            "timit",
            "--to",
            "aif",
            "--input",
            s(&wrd),
            "--output",
            s(&out),
        ];
        args.extend_from_slice(extra);
        assert_eq!(agtk_env(&args, env).code, 0);
        std::fs::read_to_string(&out).unwrap()
    };
    assert!(convert(&[], &[("AGTK_SAMPLERATE", "8000")]).contains(r#"offset="2.5""#));
    assert!(
        convert(&["--samplerate", "16000"], &[("AGTK_SAMPLERATE", "8000")])
            .contains(r#"offset="1.25""#)
    );
    assert!(convert(&["--samplerate", "20000"], &[]).contains(r#"offset="1.0""#));
}

#[test]
fn conversion_failures_have_distinct_exit_codes() {
    let dir = TempDir::new().unwrap();
    let wrd = write(&dir, "a.wrd", WRD);
    let out = dir.path().join("out");
    let r = agtk(&[
        "convert",
        "--from",
        "timit",
        "--to",
        "timit",
        "--input",
        s(&wrd),
        "--output",
        s(&out),
    ]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.starts_with("CapabilityError"), "{}", r.stderr);
    assert!(!out.exists());

    let r = agtk(&[
        "convert",
        "--from",
        "timit",
        "--to",
        "aif",
        "--input",
        "/nonexistent/a.wrd",
        "--output",
        s(&out),
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("cannot read"), "{}", r.stderr);

    let r = agtk(&[
        "convert",
        "--from",
        "wav",
        "--to",
        "aif",
        "--input",
        s(&wrd),
        "--output",
        s(&out),
    ]);
    assert_eq!(r.code, 1);

    let bad = write(&dir, "bad.wrd", "0 2400 she\n2400 x had\n");
    let r = agtk(&[
        "convert",
        "--from",
        "timit",
        "--to",
        "aif",
        "--input",
        s(&bad),
        "--output",
        s(&out),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);

    let r = agtk(&[
        "convert",
        "--from",
        "timit",
        "--to",
        "aif",
        "--input",
        s(&wrd),
        "--output",
        "/nonexistent/dir/x.aif",
    ]);
    assert_eq!(r.code, 1);
}

#[test]
fn queries_print_the_library_results() {
    let mut rng = common::rng(21);
    let q = common::query_graph(&mut rng, 120, 240);
    let (reg, ag) = (&q.registry, q.ag.as_str());
    let dir = TempDir::new().unwrap();
    let aif = write(&dir, "q.aif", &reg.to_xml(ag).unwrap());
    let points = common::probes(reg, ag, &mut rng, 6);
    for t in &points {
        let t_text = t.to_string();
        let r = agtk(&["query", "overlap", "--aif", s(&aif), "--offset", &t_text]);
        assert_eq!(
            r.stdout,
            lines(reg.get_annotation_set_by_offset(ag, *t).unwrap()),
            "overlap {t}"
        );
        let r = agtk(&[
            "query",
            "anchors-near",
            "--aif",
            s(&aif),
            "--offset",
            &t_text,
        ]);
        assert_eq!(
            r.stdout,
            lines(reg.get_anchor_set_nearest_offset(ag, *t).unwrap()),
            "near {t}"
        );
        let eps = Offset::from_nanos(common::GRID);
        let r = agtk(&[
            "query",
            "anchors",
            "--aif",
            s(&aif),
            "--ag",
            ag,
            "--offset",
            &t_text,
            "--epsilon",
            &eps.to_string(),
        ]);
        assert_eq!(
            r.stdout,
            lines(reg.get_anchor_set_by_offset(ag, *t, eps).unwrap()),
            "anchors {t}"
        );
        let r = agtk(&["query", "seq", "--aif", s(&aif), "--begin", &t_text]);
        assert_eq!(
            r.stdout,
            lines(
                reg.get_annotation_seq_by_offset(ag, Some(*t), None)
                    .unwrap()
            ),
            "seq from {t}"
        );
        assert_eq!(r.code, 0);
    }
    let r = agtk(&["query", "seq", "--aif", s(&aif)]);
    assert_eq!(
        r.stdout,
        lines(reg.get_annotation_seq_by_offset(ag, None, None).unwrap())
    );
}

#[test]
fn query_errors() {
    let dir = TempDir::new().unwrap();
    let aif = write(&dir, "t.aif", &test_set().to_xml("Test").unwrap());
    let r = agtk(&[
        "query",
        "seq",
        "--aif",
        s(&aif),
        "--begin",
        "2.0",
        "--end",
        "1.0",
    ]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.starts_with("BadArgument"), "{}", r.stderr);
    assert_eq!(
        agtk(&["query", "overlap", "--aif", s(&aif), "--offset", "soon"]).code,
        3
    );
    assert_eq!(
        agtk(&[
            "query",
            "overlap",
            "--aif",
            s(&aif),
            "--ag",
            "Test:AG9",
            "--offset",
            "1"
        ])
        .code,
        3
    );
    assert_eq!(
        agtk(&[
            "query",
            "anchors",
            "--aif",
            s(&aif),
            "--offset",
            "1",
            "--epsilon",
            "-0.5"
        ])
        .code,
        3
    );
    assert_eq!(agtk(&["query", "overlap", "--aif", s(&aif)]).code, 1);

    let mut two = test_set();
    two.create_ag("Test", None).unwrap();
    let both = write(&dir, "two.aif", &two.to_xml("Test").unwrap());
    assert_eq!(
        agtk(&["query", "overlap", "--aif", s(&both), "--offset", "0.5"]).code,
        3
    );
    let r = agtk(&[
        "query",
        "overlap",
        "--aif",
        s(&both),
        "--ag",
        "Test:AG1",
        "--offset",
        "0.5",
    ]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "Test:AG1:Annotation1\n"));

    let broken = write(
        &dir,
        "broken.aif",
        "<AGSet id=\"Test\"><AG id=\"Test:AG1\">",
    );
    assert_eq!(agtk(&["query", "seq", "--aif", s(&broken)]).code, 2);
}

#[test]
fn nearest_returns_both_sides_of_a_tie() {
    let dir = TempDir::new().unwrap();
    let aif = write(&dir, "t.aif", &test_set().to_xml("Test").unwrap());
    let r = agtk(&["query", "anchors-near", "--aif", s(&aif), "--offset", "0.5"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "Test:AG1:Anchor1\nTest:AG1:Anchor2\n");
    let r = agtk(&[
        "query",
        "anchors",
        "--aif",
        s(&aif),
        "--offset",
        "0.5",
        "--epsilon",
        "0.5",
    ]);
    assert_eq!(r.stdout, "Test:AG1:Anchor1\nTest:AG1:Anchor2\n");
    let r = agtk(&[
        "query",
        "anchors",
        "--aif",
        s(&aif),
        "--offset",
        "0.5",
        "--epsilon",
        "0.499999999",
    ]);
    assert_eq!(r.stdout, "");
}

#[test]
fn info_counts_objects() {
    let dir = TempDir::new().unwrap();
    let aif = write(&dir, "t.aif", &test_set().to_xml("Test").unwrap());
    let r = agtk(&["info", "--aif", s(&aif)]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "agset: Test\ntimelines: 0\nsignals: 0\ngraphs: 1\nanchors: 2\nannotations: 1\nfeatures: 2\n"
    );
}

#[test]
fn formats_and_help() {
    let r = agtk(&["formats"]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "AIF input/output\nLCF input/output\nTF input/output\nTIMIT input\nTreeBank input/output\nxlabel input\n"
    );
    let r = agtk(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("events-replay"));
    assert!(r.stderr.is_empty());
    assert_eq!(agtk(&[]).code, 1);
    assert_eq!(agtk(&["frobnicate"]).code, 1);
}

#[test]
fn validate_reports_on_stderr() {
    let dir = TempDir::new().unwrap();
    let xml = test_set().to_xml("Test").unwrap();
    let clean = write(&dir, "clean.aif", &xml);
    let r = agtk(&["validate", "--aif", s(&clean)]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "ok\n"));
    let bad = write(
        &dir,
        "bad.aif",
        &xml.replace(r#"offset="1.0""#, r#"offset="-1.0""#),
    );
    let r = agtk(&["validate", "--aif", s(&bad)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("Test:AG1:Anchor2"), "{}", r.stderr);
    let garbage = write(&dir, "garbage.aif", "not xml at all");
    assert_eq!(agtk(&["validate", "--aif", s(&garbage)]).code, 2);
}

#[test]
fn events_replay_is_repeatable() {
    let dir = TempDir::new().unwrap();
    let log = write(
        &dir,
        "s.log",
        "1\t0.0\ttable\thub\tCreateAnnotation\tstart=0.5\tend=1.5\n\
         2\t0.0\tmain\ttable\tAnnotationCreated\tAnnotationId=Session:AG1:Annotation1\tstart=0.5\tend=1.5\n\
         3\t0.25\ttable\thub\tSetFeature\tfeature=text\tvalue=hello%09world\n\
         4\t0.5\twaveform\thub\tSetRegion\tstart=0.75\tend=2.0\n",
    );
    let (a, b) = (dir.path().join("a.aif"), dir.path().join("b.aif"));
    for out in [&a, &b] {
        let r = agtk(&["events-replay", "--log", s(&log), "--out", s(out)]);
        assert_eq!(
            (r.code, r.stdout.as_str()),
            (0, "replayed 4 events\n"),
            "{}",
            r.stderr
        );
    }
    let first = std::fs::read_to_string(&a).unwrap();
    assert_eq!(first, std::fs::read_to_string(&b).unwrap());
    assert!(
        first.contains(r#"<Feature name="text">hello	world</Feature>"#),
        "{first}"
    );
    assert!(first.contains(r#"offset="0.75""#));

    let unordered = write(
        &dir,
        "u.log",
        "2\t0.0\ttable\thub\tStop\n1\t0.0\ttable\thub\tStop\n",
    );
    assert_eq!(
        agtk(&["events-replay", "--log", s(&unordered), "--out", s(&a)]).code,
        2
    );
    let unknown = write(&dir, "x.log", "1\t0.0\ttable\thub\tTeleport\n");
    let r = agtk(&["events-replay", "--log", s(&unknown), "--out", s(&a)]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.starts_with("SchemaError"), "{}", r.stderr);
}
