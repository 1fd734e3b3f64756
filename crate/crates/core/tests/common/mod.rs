//! Random generators and brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::fmt::Write as _;

use agtk::{Offset, Registry, SignalInfo};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Offsets are drawn from a coarse grid so that ties are common.
pub const GRID: i64 = 50_000_000;

pub fn grid(k: i64) -> Offset {
    Offset::from_nanos(k * GRID)
}

/// A graph built for query testing. Anchors are laid out in a line with
/// nondecreasing offsets and every annotation points forward, so the graph is
/// acyclic by construction.
pub struct QueryGraph {
    pub registry: Registry,
    pub ag: String,
}

pub fn query_graph(rng: &mut ChaCha8Rng, anchors: usize, annotations: usize) -> QueryGraph {
    let mut reg = Registry::new();
    reg.create_agset("Q").unwrap();
    let ag = reg.create_ag("Q", None).unwrap().into_string();

    let span = (anchors as i64 / 2).max(4);
    let mut offsets: Vec<Option<i64>> = (0..anchors)
        .map(|_| (!rng.random_bool(0.1)).then(|| rng.random_range(0..span)))
        .collect();
    let mut anchored: Vec<i64> = offsets.iter().flatten().copied().collect();
    anchored.sort_unstable();
    let mut sorted = anchored.into_iter();
    for slot in offsets.iter_mut().filter(|o| o.is_some()) {
        *slot = sorted.next();
    }

    let mut line = Vec::with_capacity(anchors);
    for (i, offset) in offsets.iter().enumerate() {
        let id = if rng.random_bool(0.05) {
            reg.create_anchor(&format!("{ag}:n{i}")).unwrap()
        } else {
            reg.create_anchor(&ag).unwrap()
        };
        if let Some(k) = offset {
            reg.set_anchor_offset(id.as_str(), grid(*k)).unwrap();
        }
        line.push(id);
    }
    if anchors >= 2 {
        for _ in 0..annotations {
            let i = rng.random_range(0..anchors - 1);
            let reach = rng.random_range(1..=8).min(anchors - 1 - i);
            let j = i + rng.random_range(1..=reach);
            let kind = *["word", "phone", "turn"].choose(rng).unwrap();
            reg.create_annotation(&ag, line[i].as_str(), line[j].as_str(), kind)
                .unwrap();
        }
    }
    QueryGraph { registry: reg, ag }
}

/// Probe points: every anchor offset, the points halfway between neighbours
/// and a few values outside the populated range.
pub fn probes(reg: &Registry, ag: &str, rng: &mut ChaCha8Rng, count: usize) -> Vec<Offset> {
    let mut known: Vec<i64> = reg
        .ag(ag)
        .unwrap()
        .anchors()
        .filter_map(|a| a.offset())
        .map(Offset::as_nanos)
        .collect();
    known.sort_unstable();
    known.dedup();
    let mut out = vec![Offset::from_nanos(-GRID), Offset::from_nanos(i64::MAX / 2)];
    for _ in 0..count {
        let p = match (rng.random_range(0..4), known.len()) {
            (_, 0) => rng.random_range(0..10 * GRID),
            (0, n) => known[rng.random_range(0..n)],
            (1, n) if n >= 2 => {
                let i = rng.random_range(0..n - 1);
                (known[i] + known[i + 1]) / 2
            }
            (2, n) => known[rng.random_range(0..n)] + rng.random_range(-GRID..=GRID),
            _ => rng.random_range(-GRID..known[known.len() - 1] + 2 * GRID),
        };
        out.push(Offset::from_nanos(p));
    }
    out
}

fn by_offset_then_id(a: &(i64, String), b: &(i64, String)) -> Ordering {
    a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1))
}

pub fn oracle_anchors_within(reg: &Registry, ag: &str, t: Offset, eps: Offset) -> Vec<String> {
    let (t, eps) = (t.as_nanos() as i128, eps.as_nanos() as i128);
    let mut hits: Vec<(i64, String)> = reg
        .ag(ag)
        .unwrap()
        .anchors()
        .filter_map(|a| a.offset().map(|o| (o.as_nanos(), a.id().to_string())))
        .filter(|(o, _)| (*o as i128 - t).abs() <= eps)
        .collect();
    hits.sort_by(by_offset_then_id);
    hits.into_iter().map(|(_, id)| id).collect()
}

/// `None` when the graph has no anchored anchor.
pub fn oracle_nearest(reg: &Registry, ag: &str, t: Offset) -> Option<Vec<String>> {
    let t = t.as_nanos() as i128;
    let all: Vec<(i64, String)> = reg
        .ag(ag)
        .unwrap()
        .anchors()
        .filter_map(|a| a.offset().map(|o| (o.as_nanos(), a.id().to_string())))
        .collect();
    let best = all.iter().map(|(o, _)| (*o as i128 - t).abs()).min()?;
    let mut hits: Vec<(i64, String)> = all
        .into_iter()
        .filter(|(o, _)| (*o as i128 - t).abs() == best)
        .collect();
    hits.sort_by(by_offset_then_id);
    Some(hits.into_iter().map(|(_, id)| id).collect())
}

/// (start, end, id) for every annotation, with offsets looked up by hand.
fn spans(reg: &Registry, ag: &str) -> Vec<(Option<i64>, Option<i64>, String)> {
    let graph = reg.ag(ag).unwrap();
    let at = |id: &str| graph.anchor(id).unwrap().offset().map(Offset::as_nanos);
    graph
        .annotations()
        .map(|a| {
            (
                at(a.start().as_str()),
                at(a.end().as_str()),
                a.id().to_string(),
            )
        })
        .collect()
}

fn none_last(a: Option<i64>, b: Option<i64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

fn sort_spans(v: &mut [(Option<i64>, Option<i64>, String)]) {
    v.sort_by(|a, b| {
        none_last(a.0, b.0)
            .then(none_last(a.1, b.1))
            .then_with(|| a.2.cmp(&b.2))
    });
}

pub fn oracle_stabbing(reg: &Registry, ag: &str, t: Offset) -> Vec<String> {
    let t = t.as_nanos();
    let mut hits: Vec<_> = spans(reg, ag)
        .into_iter()
        .filter(|(s, e, _)| matches!((s, e), (Some(s), Some(e)) if *s <= t && t <= *e))
        .collect();
    sort_spans(&mut hits);
    hits.into_iter().map(|(_, _, id)| id).collect()
}

pub fn oracle_seq(
    reg: &Registry,
    ag: &str,
    begin: Option<Offset>,
    end: Option<Offset>,
) -> Vec<String> {
    let mut hits: Vec<_> = spans(reg, ag)
        .into_iter()
        .filter(|(s, _, _)| match s {
            Some(s) => {
                begin.is_none_or(|b| b.as_nanos() <= *s) && end.is_none_or(|e| *s <= e.as_nanos())
            }
            None => false,
        })
        .collect();
    sort_spans(&mut hits);
    hits.into_iter().map(|(_, _, id)| id).collect()
}

/// Text that stresses escaping in every serialization.
pub fn awkward_text(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[&str] = &[
        "a", "Z", "0", " ", "<", ">", "&", "\"", "'", "\t", "\n", "\r", "=", "%", "é", "語", "]]>",
        "&amp;", "-", ":",
    ];
    let len = rng.random_range(0..10);
    (0..len).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

fn feature_name(rng: &mut ChaCha8Rng) -> String {
    let mut name = ["label", "speaker", "gloss", "x", "note"]
        .choose(rng)
        .unwrap()
        .to_string();
    if rng.random_bool(0.3) {
        name.push_str(&awkward_text(rng));
    }
    name
}

fn random_features(reg: &mut Registry, rng: &mut ChaCha8Rng, id: &str, max: usize) {
    for _ in 0..rng.random_range(0..=max) {
        let (name, value) = (feature_name(rng), awkward_text(rng));
        reg.set_feature(id, &name, &value).unwrap();
    }
}

fn random_info(rng: &mut ChaCha8Rng) -> SignalInfo {
    let mut info = SignalInfo::new(format!("file:/corpus/{}.wav", rng.random_range(0..1000)));
    let maybe = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.5) {
            awkward_text(rng)
        } else {
            String::new()
        }
    };
    info.mime_class = maybe(rng);
    info.mime_type = maybe(rng);
    info.encoding = maybe(rng);
    info.unit = maybe(rng);
    info.track = maybe(rng);
    info
}

/// A small AGSet exercising every kind of object, explicit and generated
/// ids, unanchored anchors and awkward feature text.
pub fn random_agset(rng: &mut ChaCha8Rng, name: &str) -> Registry {
    let mut reg = Registry::new();
    reg.create_agset(name).unwrap();
    random_features(&mut reg, rng, name, 2);
    let mut timelines = Vec::new();
    for _ in 0..rng.random_range(0..3) {
        let tl = reg.create_timeline(name).unwrap();
        random_features(&mut reg, rng, tl.as_str(), 2);
        for _ in 0..rng.random_range(0..3) {
            let sig = reg.create_signal(tl.as_str(), random_info(rng)).unwrap();
            random_features(&mut reg, rng, sig.as_str(), 1);
        }
        timelines.push(tl);
    }
    for g in 0..rng.random_range(0..4) {
        let timeline = timelines
            .choose(rng)
            .filter(|_| rng.random_bool(0.6))
            .cloned();
        let target = if rng.random_bool(0.2) {
            format!("{name}:graph-{g}")
        } else {
            name.to_string()
        };
        let ag = reg
            .create_ag(&target, timeline.as_ref().map(|t| t.as_str()))
            .unwrap();
        random_features(&mut reg, rng, ag.as_str(), 2);
        let mut anchors: Vec<(String, Option<i64>)> = Vec::new();
        for i in 0..rng.random_range(0..12) {
            let id = if rng.random_bool(0.15) {
                reg.create_anchor(&format!("{ag}:a.{i}_x")).unwrap()
            } else {
                reg.create_anchor(ag.as_str()).unwrap()
            };
            let offset = (!rng.random_bool(0.2)).then(|| rng.random_range(0..2_000_000_000_000i64));
            if let Some(o) = offset {
                reg.set_anchor_offset(id.as_str(), Offset::from_nanos(o))
                    .unwrap();
            }
            if rng.random_bool(0.2) {
                let unit = *["ms", "tokens", "frames"].choose(rng).unwrap();
                reg.set_anchor_unit(id.as_str(), unit).unwrap();
            }
            anchors.push((id.into_string(), offset));
        }
        anchors.sort_by(|a, b| none_last(a.1, b.1));
        let anchored = anchors.iter().filter(|a| a.1.is_some()).count();
        for _ in 0..rng.random_range(0..16) {
            if anchored < 2 {
                break;
            }
            let i = rng.random_range(0..anchored - 1);
            let j = rng.random_range(i + 1..anchored);
            let kind = if rng.random_bool(0.1) {
                awkward_text(rng) + "t"
            } else {
                "word".to_string()
            };
            let ann = reg
                .create_annotation(ag.as_str(), &anchors[i].0, &anchors[j].0, &kind)
                .unwrap();
            random_features(&mut reg, rng, ann.as_str(), 3);
        }
        for (id, _) in anchors.iter().skip(anchored) {
            if rng.random_bool(0.5) && anchored > 0 {
                let from = &anchors[rng.random_range(0..anchored)].0;
                reg.create_annotation(ag.as_str(), from, id, "open")
                    .unwrap();
            }
        }
    }
    reg
}

/// Every fact about an AGSet, one per line, read through accessors only.
pub fn dump(reg: &Registry, agset: &str) -> String {
    let mut out = String::new();
    let set = reg.agset(agset).unwrap();
    let feats = |m: &agtk::FeatureMap| {
        m.iter()
            .map(|(k, v)| format!("{k:?}={v:?}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "agset {} [{}]", set.id(), feats(set.metadata())).unwrap();
    let mut lines = Vec::new();
    for tl in set.timelines() {
        lines.push(format!("timeline {} [{}]", tl.id(), feats(tl.metadata())));
        for s in tl.signals() {
            let i = s.info();
            lines.push(format!(
                "signal {} {:?} {:?} {:?} {:?} {:?} {:?} [{}]",
                s.id(),
                i.uri,
                i.mime_class,
                i.mime_type,
                i.encoding,
                i.unit,
                i.track,
                feats(s.metadata())
            ));
        }
    }
    for ag in set.graphs() {
        lines.push(format!(
            "ag {} {:?} [{}]",
            ag.id(),
            ag.timeline().map(|t| t.as_str()),
            feats(ag.metadata())
        ));
        for a in ag.anchors() {
            lines.push(format!(
                "anchor {} {:?} {}",
                a.id(),
                a.offset().map(|o| o.as_nanos()),
                a.unit()
            ));
        }
        for a in ag.annotations() {
            lines.push(format!(
                "annotation {} {} {} {:?} [{}]",
                a.id(),
                a.start(),
                a.end(),
                a.kind(),
                feats(a.features())
            ));
        }
    }
    lines.sort();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Annotations described by offsets rather than anchor ids, for comparing
/// graphs whose anchors were renumbered.
pub fn spans_by_offset(reg: &Registry, ag: &str) -> Vec<String> {
    let graph = reg.ag(ag).unwrap();
    let at = |id: &str| graph.anchor(id).unwrap().offset().map(|o| o.to_string());
    let mut out: Vec<String> = graph
        .annotations()
        .map(|a| {
            let f: Vec<String> = a
                .features()
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!(
                "{} {} {:?} {:?} {:?}",
                a.id().local(),
                a.kind(),
                at(a.start().as_str()),
                at(a.end().as_str()),
                f
            )
        })
        .collect();
    out.sort();
    out
}
