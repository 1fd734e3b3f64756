//! Structural algorithms over annotation graphs: strongly connected
//! components, cycle detection and label-preserving isomorphism.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::Ag;

/// Strongly connected components of a directed multigraph, each sorted, in
/// reverse topological order of the condensation.
pub fn strongly_connected_components<'a>(
    nodes: impl IntoIterator<Item = &'a str>,
    edges: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Vec<Vec<&'a str>> {
    let names: Vec<&str> = nodes
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut succ = vec![Vec::new(); names.len()];
    for (a, b) in edges {
        if let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) {
            succ[i].push(j);
        }
    }

    // Iterative Tarjan.
    const UNSEEN: usize = usize::MAX;
    let n = names.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut out = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut child)) = work.last_mut() {
            if *child == 0 && index[v] == UNSEEN {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = succ[v].get(*child) {
                *child += 1;
                if index[w] == UNSEEN {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("component on stack");
                    on_stack[w] = false;
                    comp.push(names[w]);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Nodes lying on a directed cycle (including self-loops).
pub fn cyclic_nodes<'a>(
    nodes: impl IntoIterator<Item = &'a str>,
    edges: impl IntoIterator<Item = (&'a str, &'a str)> + Clone,
) -> BTreeSet<String> {
    let self_loops: BTreeSet<&str> = edges
        .clone()
        .into_iter()
        .filter(|(a, b)| a == b)
        .map(|(a, _)| a)
        .collect();
    strongly_connected_components(nodes, edges)
        .into_iter()
        .filter(|c| c.len() > 1 || self_loops.contains(c[0]))
        .flatten()
        .map(str::to_string)
        .collect()
}

/// A topological order of the nodes (ties broken by name), or `None` if the
/// graph has a cycle.
pub fn topological_order<'a>(
    nodes: impl IntoIterator<Item = &'a str>,
    edges: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Option<Vec<&'a str>> {
    let mut indegree: BTreeMap<&str, usize> = nodes.into_iter().map(|n| (n, 0)).collect();
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        if !indegree.contains_key(a) || !indegree.contains_key(b) {
            continue;
        }
        succ.entry(a).or_default().push(b);
        *indegree.get_mut(b).expect("known node") += 1;
    }
    let mut ready: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(n) = ready.pop_first() {
        order.push(n);
        for m in succ.get(n).into_iter().flatten() {
            let d = indegree.get_mut(m).expect("known node");
            *d -= 1;
            if *d == 0 {
                ready.insert(m);
            }
        }
    }
    (order.len() == indegree.len()).then_some(order)
}

/// A node- and edge-labeled directed multigraph with dense node numbering.
#[derive(Debug, Clone, Default)]
pub struct LabeledGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

impl LabeledGraph {
    /// Anchors labeled by offset, annotations by type and features.
    /// Identifiers and anchor units are ignored.
    pub fn from_ag(ag: &Ag) -> LabeledGraph {
        let mut pos = BTreeMap::new();
        let mut nodes = Vec::new();
        for anchor in ag.anchors() {
            pos.insert(anchor.id().as_str(), nodes.len());
            nodes.push(
                anchor
                    .offset()
                    .map_or_else(|| "-".to_string(), |o| o.to_string()),
            );
        }
        let edges = ag
            .annotations()
            .map(|a| {
                let features: Vec<_> = a.features().iter().collect();
                (
                    pos[a.start().as_str()],
                    pos[a.end().as_str()],
                    format!("{:?}", (a.kind(), features)),
                )
            })
            .collect();
        LabeledGraph { nodes, edges }
    }
}

/// True when the two graphs are isomorphic by a bijection on anchors that
/// preserves offsets and maps annotations onto annotations with equal type
/// and features.
pub fn ags_isomorphic(a: &Ag, b: &Ag) -> bool {
    isomorphic(&LabeledGraph::from_ag(a), &LabeledGraph::from_ag(b))
}

/// Labeled multigraph isomorphism by colour refinement with individualization.
pub fn isomorphic(a: &LabeledGraph, b: &LabeledGraph) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let n = a.nodes.len();
    let mut labels = BTreeMap::new();
    let mut intern = |s: &str| {
        let next = labels.len();
        *labels.entry(s.to_string()).or_insert(next)
    };
    let union = Union {
        n,
        out: adjacency(n, a, b, &mut intern, false),
        inc: adjacency(n, a, b, &mut intern, true),
        edges: [edge_multiset(a, &mut intern), edge_multiset(b, &mut intern)],
    };
    let mut colours: Vec<usize> = a.nodes.iter().chain(&b.nodes).map(|l| intern(l)).collect();
    let fresh = labels_len(&colours);
    union.search(&mut colours, fresh)
}

type Signature = (usize, Vec<(usize, usize)>, Vec<(usize, usize)>);

fn labels_len(colours: &[usize]) -> usize {
    colours.iter().max().map_or(0, |m| m + 1)
}

type Adjacency = Vec<Vec<(usize, usize)>>;

fn adjacency(
    n: usize,
    a: &LabeledGraph,
    b: &LabeledGraph,
    intern: &mut impl FnMut(&str) -> usize,
    reverse: bool,
) -> Adjacency {
    let mut adj = vec![Vec::new(); 2 * n];
    for (base, g) in [(0, a), (n, b)] {
        for (s, e, label) in &g.edges {
            let l = intern(label);
            let (from, to) = if reverse { (*e, *s) } else { (*s, *e) };
            adj[base + from].push((l, base + to));
        }
    }
    adj
}

fn edge_multiset(
    g: &LabeledGraph,
    intern: &mut impl FnMut(&str) -> usize,
) -> BTreeMap<(usize, usize, usize), usize> {
    let mut m = BTreeMap::new();
    for (s, e, label) in &g.edges {
        *m.entry((*s, *e, intern(label))).or_default() += 1;
    }
    m
}

struct Union {
    n: usize,
    out: Adjacency,
    inc: Adjacency,
    edges: [BTreeMap<(usize, usize, usize), usize>; 2],
}

impl Union {
    /// Refines `colours` to the coarsest stable partition.
    fn refine(&self, colours: &mut Vec<usize>) {
        let mut classes = colours.iter().collect::<BTreeSet<_>>().len();
        loop {
            let mut table: BTreeMap<Signature, usize> = BTreeMap::new();
            let signatures: Vec<_> = (0..2 * self.n)
                .map(|v| {
                    let mut out: Vec<_> =
                        self.out[v].iter().map(|(l, w)| (*l, colours[*w])).collect();
                    let mut inc: Vec<_> =
                        self.inc[v].iter().map(|(l, w)| (*l, colours[*w])).collect();
                    out.sort_unstable();
                    inc.sort_unstable();
                    (colours[v], out, inc)
                })
                .collect();
            for sig in &signatures {
                let next = table.len();
                table.entry(sig.clone()).or_insert(next);
            }
            *colours = signatures.iter().map(|s| table[s]).collect();
            if table.len() == classes {
                return;
            }
            classes = table.len();
        }
    }

    fn search(&self, colours: &mut Vec<usize>, mut fresh: usize) -> bool {
        self.refine(colours);
        fresh = fresh.max(labels_len(colours));
        let mut members: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (v, c) in colours.iter().enumerate() {
            let entry = members.entry(*c).or_default();
            if v < self.n {
                entry.0.push(v);
            } else {
                entry.1.push(v);
            }
        }
        if members.values().any(|(x, y)| x.len() != y.len()) {
            return false;
        }
        let ambiguous = members
            .values()
            .filter(|(x, _)| x.len() > 1)
            .min_by_key(|(x, _)| x.len());
        let Some((xs, ys)) = ambiguous else {
            let mapping: BTreeMap<usize, usize> = members
                .values()
                .map(|(x, y)| (x[0], y[0] - self.n))
                .collect();
            return self.check(&mapping);
        };
        let v = xs[0];
        for &w in ys {
            let mut trial = colours.clone();
            trial[v] = fresh;
            trial[w] = fresh;
            if self.search(&mut trial, fresh + 1) {
                return true;
            }
        }
        false
    }

    fn check(&self, mapping: &BTreeMap<usize, usize>) -> bool {
        let mapped: BTreeMap<_, _> = self.edges[0]
            .iter()
            .map(|((s, e, l), c)| ((mapping[s], mapping[e], *l), *c))
            .collect();
        mapped == self.edges[1]
    }
}
