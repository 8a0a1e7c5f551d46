//! Graphviz output for Hasse diagrams, and a small reader for the subset of
//! the DOT language we emit (enough to round-trip our own files).

use crate::lattice::FiniteDistributiveLattice;
use crate::order::Poset;
use std::collections::BTreeMap;
use std::fmt::Write;
use thiserror::Error;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A bottom-to-top Hasse diagram: one node per element, one edge per cover
/// pair `(lower, upper)`.
pub fn hasse(name: &str, labels: &[String], covers: &[(usize, usize)]) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {} {{", quote(name)).unwrap();
    s.push_str("  rankdir=BT;\n  node [shape=box];\n");
    for (i, l) in labels.iter().enumerate() {
        writeln!(s, "  n{i} [label={}];", quote(l)).unwrap();
    }
    for &(a, b) in covers {
        writeln!(s, "  n{a} -> n{b};").unwrap();
    }
    s.push_str("}\n");
    s
}

/// Elements rendered as `{a,b}`; edges are the covers of `l`.
pub fn lattice_hasse(name: &str, l: &FiniteDistributiveLattice) -> String {
    let labels: Vec<String> = (0..l.len()).map(|i| l.render(i)).collect();
    hasse(name, &labels, &l.covers())
}

pub fn poset_hasse(name: &str, p: &Poset) -> String {
    hasse(name, p.labels(), &p.covers())
}

/// A parsed graph: node ids with their attributes, edges between ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotGraph {
    pub name: Option<String>,
    pub directed: bool,
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<(String, String)>,
    pub attrs: BTreeMap<String, String>,
}

impl DotGraph {
    pub fn label(&self, id: &str) -> Option<&str> {
        self.nodes.get(id).and_then(|a| a.get("label")).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("DOT parse error at byte {position}: {message}")]
pub struct DotError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    Arrow,
    Undirected,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, DotError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |position, message: &str| DotError { position, message: message.to_string() };
    while i < b.len() {
        let c = b[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'/' if b.get(i + 1) == Some(&b'/') => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b'-' if b.get(i + 1) == Some(&b'>') => {
                out.push((start, Tok::Arrow));
                i += 2;
            }
            b'-' if b.get(i + 1) == Some(&b'-') => {
                out.push((start, Tok::Undirected));
                i += 2;
            }
            b'{' | b'}' | b'[' | b']' | b'=' | b';' | b',' => {
                out.push((
                    start,
                    match c {
                        b'{' => Tok::LBrace,
                        b'}' => Tok::RBrace,
                        b'[' => Tok::LBracket,
                        b']' => Tok::RBracket,
                        b'=' => Tok::Eq,
                        b';' => Tok::Semi,
                        _ => Tok::Comma,
                    },
                ));
                i += 1;
            }
            b'"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    let rest = src.get(i..).ok_or_else(|| err(start, "bad string"))?;
                    let mut chars = rest.chars();
                    match chars.next() {
                        None => return Err(err(start, "unterminated string")),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.next() {
                                Some('n') => s.push('\n'),
                                Some(e) => s.push(e),
                                None => return Err(err(i, "dangling escape")),
                            }
                            i += 1 + rest[1..].chars().next().map_or(0, char::len_utf8);
                        }
                        Some(ch) => {
                            s.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                out.push((start, Tok::Id(s)));
            }
            c if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' || c == b'-' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'.' || b[i] == b'-') {
                    if b[i] == b'-' && i > start {
                        break;
                    }
                    i += 1;
                }
                out.push((start, Tok::Id(src[start..i].to_string())));
            }
            _ => return Err(err(start, "unexpected character")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, message: &str) -> Result<T, DotError> {
        Err(DotError { position: self.pos(), message: message.to_string() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn id(&mut self) -> Result<String, DotError> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.fail("expected an identifier"),
        }
    }

    fn attr_list(&mut self) -> Result<BTreeMap<String, String>, DotError> {
        let mut out = BTreeMap::new();
        while self.eat(&Tok::LBracket) {
            while !self.eat(&Tok::RBracket) {
                let k = self.id()?;
                if !self.eat(&Tok::Eq) {
                    return self.fail("expected '='");
                }
                let v = self.id()?;
                out.insert(k, v);
                if !self.eat(&Tok::Comma) {
                    self.eat(&Tok::Semi);
                }
            }
        }
        Ok(out)
    }
}

/// Parses `[strict] (digraph|graph) [id] { stmt* }` with node, edge (chains
/// allowed), attribute and `id = id` statements. Subgraphs are not supported.
pub fn parse(src: &str) -> Result<DotGraph, DotError> {
    let mut p = Parser { toks: lex(src)?, at: 0, end: src.len() };
    let mut g = DotGraph::default();
    if matches!(p.peek(), Some(Tok::Id(s)) if s == "strict") {
        p.at += 1;
    }
    g.directed = match p.id()?.as_str() {
        "digraph" => true,
        "graph" => false,
        _ => return p.fail("expected 'digraph' or 'graph'"),
    };
    if let Some(Tok::Id(_)) = p.peek() {
        g.name = Some(p.id()?);
    }
    if !p.eat(&Tok::LBrace) {
        return p.fail("expected '{'");
    }
    loop {
        if p.eat(&Tok::RBrace) {
            break;
        }
        if p.eat(&Tok::Semi) {
            continue;
        }
        let first = p.id()?;
        if matches!(first.as_str(), "node" | "edge" | "graph") && p.peek() == Some(&Tok::LBracket) {
            let a = p.attr_list()?;
            if first == "graph" {
                g.attrs.extend(a);
            }
            continue;
        }
        if p.eat(&Tok::Eq) {
            let v = p.id()?;
            g.attrs.insert(first, v);
            continue;
        }
        let edge_tok = if g.directed { Tok::Arrow } else { Tok::Undirected };
        let mut chain = vec![first];
        while p.peek() == Some(&edge_tok) {
            p.at += 1;
            chain.push(p.id()?);
        }
        if matches!(p.peek(), Some(Tok::Arrow | Tok::Undirected)) {
            return p.fail("edge operator does not match the graph kind");
        }
        let attrs = p.attr_list()?;
        if chain.len() == 1 {
            g.nodes.entry(chain.pop().unwrap()).or_default().extend(attrs);
        } else {
            for w in chain.windows(2) {
                for n in w {
                    g.nodes.entry(n.clone()).or_default();
                }
                g.edges.push((w[0].clone(), w[1].clone()));
            }
        }
    }
    if p.at != p.toks.len() {
        return p.fail("trailing input after graph");
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{att_lattice, fixtures, DEFAULT_MAX_STATES};
    use crate::order::Poset;

    #[test]
    fn round_trip_ds1() {
        let l = att_lattice(&fixtures::ds1(), DEFAULT_MAX_STATES).unwrap();
        let src = lattice_hasse("Att", &l);
        let g = parse(&src).unwrap();
        assert!(g.directed);
        assert_eq!(g.name.as_deref(), Some("Att"));
        assert_eq!(g.attrs.get("rankdir").map(String::as_str), Some("BT"));
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.label("n3"), Some("{z,b}"));
        assert_eq!(g.label("n0"), Some("{}"));
        let edges: Vec<(String, String)> =
            l.covers().iter().map(|&(a, b)| (format!("n{a}"), format!("n{b}"))).collect();
        assert_eq!(g.edges, edges);
    }

    #[test]
    fn only_covers_are_drawn() {
        // chain of 4: O(P) is a 5-chain with 4 covers, not 10 comparabilities
        let l = FiniteDistributiveLattice::of_down_sets(&Poset::chain(4), 20).unwrap();
        let g = parse(&lattice_hasse("c", &l)).unwrap();
        assert_eq!(g.edges.len(), 4);
        let p = parse(&poset_hasse("p", &Poset::chain(4))).unwrap();
        assert_eq!(p.edges.len(), 3);
    }

    #[test]
    fn quoting() {
        let labels = vec!["a\"b".to_string(), "back\\slash".into(), "∅ ∪ {x}".into()];
        let g = parse(&hasse("we\"ird", &labels, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(g.name.as_deref(), Some("we\"ird"));
        assert_eq!(g.label("n0"), Some("a\"b"));
        assert_eq!(g.label("n1"), Some("back\\slash"));
        assert_eq!(g.label("n2"), Some("∅ ∪ {x}"));
    }

    #[test]
    fn reader_subset() {
        let g = parse("strict graph { a -- b -- c [color=red]; d; x=1 // comment\n }").unwrap();
        assert!(!g.directed);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.attrs["x"], "1");
        for bad in ["digraph { a -- b }", "digraph { a -> }", "digraph { \"a }", "graph {", "digraph {} x", "tree {}"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
        let e = parse("digraph {\n  a -> ;\n}").unwrap_err();
        assert_eq!(e.position, 17);
    }
}
