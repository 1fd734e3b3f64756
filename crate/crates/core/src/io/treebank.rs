//! Penn Treebank bracketed parses.
//!
//! Each tree becomes one graph whose anchors sit at token indexes (unit
//! `tokens`). Every constituent is a `syntax` annotation over the tokens it
//! dominates, with features `tag` and `depth` (0 at the root); every token is
//! a `word` annotation from `i` to `i + 1` with feature `text`. The depth keeps
//! unary chains such as `(NP (NN dog))` in order, so storing regenerates the
//! tree. A PTB-style wrapper `( (S ...) )` is a root constituent with an empty
//! tag.
//!
//! Storing a graph writes one tree per line; storing an AGSet writes each of
//! its graphs.

use std::iter::Peekable;
use std::str::CharIndices;

use crate::id::Identifier;
use crate::io::text::{ensure_agset, line_col, SharedAnchors};
use crate::io::{Capabilities, Codec, IoError, Options, DEFAULT_AGSET};
use crate::model::Ag;
use crate::offset::Offset;
use crate::registry::{ObjectRef, Registry};

pub const TOKEN_UNIT: &str = "tokens";
pub const SYNTAX: &str = "syntax";
pub const WORD: &str = "word";

pub struct Treebank;

/// A parsed tree node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Node { tag: String, children: Vec<Tree> },
    Leaf(String),
}

impl Tree {
    fn write(&self, out: &mut String) {
        match self {
            Tree::Leaf(word) => out.push_str(word),
            Tree::Node { tag, children } => {
                out.push('(');
                out.push_str(tag);
                for child in children {
                    out.push(' ');
                    child.write(out);
                }
                out.push(')');
            }
        }
    }
}

impl std::fmt::Display for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    chars: Peekable<CharIndices<'a>>,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text,
            chars: text.char_indices().peekable(),
            pos: 0,
        }
    }

    fn error(&self, at: usize, message: impl Into<String>) -> IoError {
        let (line, column) = line_col(self.text, at);
        IoError::parse(line, column, message)
    }

    fn next(&mut self) -> Option<(usize, Token<'a>)> {
        while let Some(&(i, c)) = self.chars.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.chars.next();
            self.pos = i + c.len_utf8();
        }
        let (start, c) = self.chars.next()?;
        self.pos = start + c.len_utf8();
        let token = match c {
            '(' => Token::Open,
            ')' => Token::Close,
            _ => {
                let mut end = self.pos;
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    self.chars.next();
                    end = i + c.len_utf8();
                }
                self.pos = end;
                Token::Atom(&self.text[start..end])
            }
        };
        Some((start, token))
    }

    /// Parses the body of a node whose `(` has been consumed.
    fn node(&mut self, open_at: usize) -> Result<Tree, IoError> {
        let mut tag = String::new();
        let mut children = Vec::new();
        let mut first = true;
        loop {
            let (at, token) = self
                .next()
                .ok_or_else(|| self.error(open_at, "unbalanced '('"))?;
            match token {
                Token::Close => break,
                Token::Open => children.push(self.node(at)?),
                Token::Atom(a) if first => tag = a.to_string(),
                Token::Atom(a) => {
                    if !children.is_empty() {
                        return Err(self.error(at, format!("word {a:?} mixed with constituents")));
                    }
                    children.push(Tree::Leaf(a.to_string()));
                    let (at, token) = self
                        .next()
                        .ok_or_else(|| self.error(open_at, "unbalanced '('"))?;
                    if !matches!(token, Token::Close) {
                        return Err(self.error(at, "a preterminal holds exactly one word"));
                    }
                    break;
                }
            }
            first = false;
        }
        if children.is_empty() {
            return Err(self.error(open_at, "empty constituent"));
        }
        Ok(Tree::Node { tag, children })
    }
}

/// Parses every tree in `text`.
pub fn parse_trees(text: &str) -> Result<Vec<Tree>, IoError> {
    let mut lexer = Lexer::new(text);
    let mut trees = Vec::new();
    while let Some((at, token)) = lexer.next() {
        match token {
            Token::Open => trees.push(lexer.node(at)?),
            Token::Close => return Err(lexer.error(at, "unbalanced ')'")),
            Token::Atom(a) => return Err(lexer.error(at, format!("word {a:?} outside a tree"))),
        }
    }
    Ok(trees)
}

fn materialize(reg: &mut Registry, agset: &Identifier, tree: &Tree) -> Result<Identifier, IoError> {
    let ag = reg.create_ag(agset.as_str(), None)?;
    let mut anchors = SharedAnchors::new(ag.clone(), TOKEN_UNIT);
    let mut next_token = 0i64;
    add(reg, &ag, &mut anchors, tree, 0, &mut next_token)?;
    Ok(ag)
}

fn add(
    reg: &mut Registry,
    ag: &Identifier,
    anchors: &mut SharedAnchors,
    tree: &Tree,
    depth: usize,
    next_token: &mut i64,
) -> Result<(), IoError> {
    let start = *next_token;
    match tree {
        Tree::Leaf(word) => {
            *next_token += 1;
            let a = anchors.at(reg, Some(Offset::from_secs(start)))?;
            let b = anchors.at(reg, Some(Offset::from_secs(start + 1)))?;
            let ann = reg.create_annotation(ag.as_str(), a.as_str(), b.as_str(), WORD)?;
            reg.set_feature(ann.as_str(), "text", word)?;
        }
        Tree::Node { tag, children } => {
            // Create the constituent first so that ids follow a pre-order walk.
            let a = anchors.at(reg, Some(Offset::from_secs(start)))?;
            let placeholder = anchors.fresh(reg, None)?;
            let ann =
                reg.create_annotation(ag.as_str(), a.as_str(), placeholder.as_str(), SYNTAX)?;
            reg.set_feature(ann.as_str(), "tag", tag)?;
            reg.set_feature(ann.as_str(), "depth", &depth.to_string())?;
            for child in children {
                add(reg, ag, anchors, child, depth + 1, next_token)?;
            }
            let b = anchors.at(reg, Some(Offset::from_secs(*next_token)))?;
            let graph = reg.ag_mut(ag.as_str())?;
            graph.set_annotation_end(ann.as_str(), b);
            reg.delete(placeholder.as_str())?;
        }
    }
    Ok(())
}

/// Rebuilds the tree encoded by a graph.
pub fn tree_of(ag: &Ag) -> Result<Tree, IoError> {
    let bad = |why: String| IoError::Unrepresentable(format!("{}: {why}", ag.id()));
    let token = |anchor: &Identifier| -> Result<i64, IoError> {
        let offset = ag
            .anchor(anchor.as_str())
            .and_then(|a| a.offset())
            .ok_or_else(|| bad(format!("anchor {anchor} has no token offset")))?;
        let nanos = offset.as_nanos();
        if nanos % Offset::from_secs(1).as_nanos() != 0 {
            return Err(bad(format!("offset {offset} is not a token index")));
        }
        Ok(nanos / Offset::from_secs(1).as_nanos())
    };
    let mut words: Vec<(i64, String)> = Vec::new();
    let mut nodes: Vec<(i64, i64, usize, String)> = Vec::new();
    for ann in ag.annotations() {
        let (s, e) = (token(ann.start())?, token(ann.end())?);
        match ann.kind() {
            WORD => {
                let text = ann
                    .features()
                    .get("text")
                    .ok_or_else(|| bad(format!("word {} lacks text", ann.id())))?;
                if e != s + 1 {
                    return Err(bad(format!("word {} spans {s}..{e}", ann.id())));
                }
                words.push((s, text.to_string()));
            }
            SYNTAX => {
                let f = ann.features();
                let tag = f
                    .get("tag")
                    .ok_or_else(|| bad(format!("{} lacks tag", ann.id())))?;
                let depth = f
                    .get("depth")
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| bad(format!("{} lacks a numeric depth", ann.id())))?;
                nodes.push((s, e, depth, tag.to_string()));
            }
            other => return Err(bad(format!("annotation type {other:?}"))),
        }
    }
    words.sort();
    for (i, (s, w)) in words.iter().enumerate() {
        if *s != i as i64 {
            return Err(bad(format!("tokens are not contiguous at {s}")));
        }
        if w.is_empty() || w.contains(|c: char| c.is_whitespace() || c == '(' || c == ')') {
            return Err(bad(format!("word {w:?} cannot be bracketed")));
        }
    }
    for (_, _, _, tag) in &nodes {
        if tag.contains(|c: char| c.is_whitespace() || c == '(' || c == ')') {
            return Err(bad(format!("tag {tag:?} cannot be bracketed")));
        }
    }
    nodes.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));

    // Nest constituents with a stack of open nodes.
    struct Open {
        end: i64,
        depth: usize,
        tag: String,
        children: Vec<Tree>,
        cursor: i64,
    }
    let n = words.len() as i64;
    let mut words = words.into_iter().map(|(_, w)| w).peekable();
    let mut stack: Vec<Open> = Vec::new();
    let mut roots: Vec<Tree> = Vec::new();
    fn close(
        stack: &mut Vec<Open>,
        roots: &mut Vec<Tree>,
        words: &mut dyn Iterator<Item = String>,
    ) -> Result<(), String> {
        let mut node = stack.pop().expect("open node");
        if node.children.is_empty() {
            // Preterminal: takes the single word it spans.
            if node.end != node.cursor + 1 {
                return Err(format!("constituent {} has no children", node.tag));
            }
            node.children
                .push(Tree::Leaf(words.next().ok_or("missing word")?));
            node.cursor += 1;
        }
        if node.cursor != node.end {
            return Err(format!("constituent {} has uncovered tokens", node.tag));
        }
        let tree = Tree::Node {
            tag: node.tag,
            children: node.children,
        };
        match stack.last_mut() {
            Some(parent) => {
                parent.cursor = node.end;
                parent.children.push(tree);
            }
            None => roots.push(tree),
        }
        Ok(())
    }
    for (s, e, depth, tag) in nodes {
        while let Some(top) = stack.last() {
            if top.end >= e && top.depth < depth && top.cursor <= s {
                break;
            }
            close(&mut stack, &mut roots, &mut words).map_err(bad)?;
        }
        if let Some(top) = stack.last() {
            if top.cursor != s || top.depth + 1 != depth {
                return Err(bad(format!("constituent {tag} at {s}..{e} does not nest")));
            }
        } else if depth != 0 || !roots.is_empty() {
            return Err(bad(format!(
                "constituent {tag} at {s}..{e} is not under the root"
            )));
        }
        stack.push(Open {
            end: e,
            depth,
            tag,
            children: Vec::new(),
            cursor: s,
        });
    }
    while !stack.is_empty() {
        close(&mut stack, &mut roots, &mut words).map_err(bad)?;
    }
    if words.peek().is_some() || roots.len() != 1 {
        return Err(bad(format!("{n} tokens are not covered by a single tree")));
    }
    Ok(roots.pop().expect("one root"))
}

impl Codec for Treebank {
    fn name(&self) -> &'static str {
        "TreeBank"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            load: true,
            store: true,
        }
    }

    fn load(
        &self,
        registry: &mut Registry,
        text: &str,
        options: &Options,
    ) -> Result<Vec<Identifier>, IoError> {
        let trees = parse_trees(text)?;
        let agset = crate::id::parse_at_depth(
            options.target.as_deref().unwrap_or(DEFAULT_AGSET),
            1,
            "an AGSet id",
        )?;
        registry.atomically(agset.as_str(), |reg| -> Result<_, IoError> {
            ensure_agset(reg, agset.as_str())?;
            trees.iter().map(|t| materialize(reg, &agset, t)).collect()
        })
    }

    fn store(&self, registry: &Registry, id: &str, _options: &Options) -> Result<String, IoError> {
        let graphs: Vec<&Ag> = match registry.resolve(id)? {
            ObjectRef::Ag(ag) => vec![ag],
            ObjectRef::AgSet(set) => set.graphs().collect(),
            other => {
                return Err(crate::AgError::malformed(
                    id,
                    format!("names a {}, expected an AGSet or AG", other.kind()),
                )
                .into())
            }
        };
        let mut out = String::new();
        for ag in graphs {
            out.push_str(&tree_of(ag)?.to_string());
            out.push('\n');
        }
        Ok(out)
    }
}
