//! Graph and query documents: a JSON format and a minimal DOT subset.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{BuildError, Dag};
use crate::nodeset::{NodeId, NodeSet};

/// `{"nodes": [...], "edges": [[from, to], ...]}` with labels as names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryDocument {
    pub x: Vec<String>,
    pub y: Vec<String>,
    #[serde(default)]
    pub z: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

impl Format {
    /// Picks a format from the file extension, falling back to the first
    /// non-blank byte of the content.
    pub fn detect(path: Option<&Path>, bytes: &[u8]) -> Format {
        let ext = path
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("json") => Format::Json,
            Some("dot") | Some("gv") => Format::Dot,
            _ => match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
                Some(b'{') => Format::Json,
                _ => Format::Dot,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("edge refers to unknown node {0:?}")]
    UnknownLabel(String),
    #[error("{0}")]
    Build(String),
}

impl GraphDocument {
    pub fn from_dag(d: &Dag) -> GraphDocument {
        GraphDocument {
            nodes: d.nodes().map(|v| d.label(v)).collect(),
            edges: d.arcs().map(|(u, v)| [d.label(u), d.label(v)]).collect(),
        }
    }

    pub fn to_dag(&self) -> Result<Dag, IoError> {
        let mut index = HashMap::with_capacity(self.nodes.len());
        for (i, l) in self.nodes.iter().enumerate() {
            if index.insert(l.as_str(), i).is_some() {
                return Err(IoError::Build(
                    BuildError::DuplicateLabel(l.clone()).to_string(),
                ));
            }
        }
        let lookup = |l: &String| {
            index
                .get(l.as_str())
                .copied()
                .ok_or_else(|| IoError::UnknownLabel(l.clone()))
        };
        let arcs = self
            .edges
            .iter()
            .map(|[a, b]| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Dag::new(self.nodes.len(), &arcs, Some(self.nodes.clone()))
            .map_err(|e| IoError::Build(labelled(&e, &self.nodes)))
    }
}

/// Renders a build error with labels in place of indices.
fn labelled(e: &BuildError, labels: &[String]) -> String {
    let l = |i: &usize| labels.get(*i).cloned().unwrap_or_else(|| i.to_string());
    match e {
        BuildError::SelfLoop(v) => format!("self-loop at {}", l(v)),
        BuildError::DuplicateArc(a, b) => format!("arc {} -> {} listed more than once", l(a), l(b)),
        BuildError::AntiparallelArcs(a, b) => {
            format!("both {} -> {} and {} -> {} present", l(a), l(b), l(b), l(a))
        }
        BuildError::CycleDetected(c) => format!(
            "directed cycle {}",
            c.iter().map(l).collect::<Vec<_>>().join(" -> ")
        ),
        other => other.to_string(),
    }
}

pub fn parse_graph(bytes: &[u8], format: Format) -> Result<Dag, IoError> {
    match format {
        Format::Json => {
            let doc: GraphDocument = serde_json::from_slice(bytes).map_err(|e| IoError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            doc.to_dag()
        }
        Format::Dot => parse_dot(bytes)?.to_dag(),
    }
}

pub fn to_json(d: &Dag) -> String {
    serde_json::to_string_pretty(&GraphDocument::from_dag(d)).expect("document serializes")
}

/// Resolves a comma-separated label list; the empty string is the empty set.
pub fn parse_node_list(d: &Dag, text: &str) -> Result<NodeSet, IoError> {
    let mut s = NodeSet::empty(d.node_count());
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        s.insert(resolve(d, part)?);
    }
    Ok(s)
}

fn resolve(d: &Dag, label: &str) -> Result<NodeId, IoError> {
    d.node_by_label(label)
        .ok_or_else(|| IoError::UnknownLabel(label.to_string()))
}

pub fn resolve_labels(d: &Dag, labels: &[String]) -> Result<NodeSet, IoError> {
    let mut s = NodeSet::empty(d.node_count());
    for l in labels {
        s.insert(resolve(d, l)?);
    }
    Ok(s)
}

impl QueryDocument {
    pub fn resolve(&self, d: &Dag) -> Result<(NodeSet, NodeSet, NodeSet), IoError> {
        Ok((
            resolve_labels(d, &self.x)?,
            resolve_labels(d, &self.y)?,
            resolve_labels(d, &self.z)?,
        ))
    }

    pub fn from_sets(d: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> QueryDocument {
        let names = |s: &NodeSet| s.iter().map(|v| d.label(v)).collect();
        QueryDocument {
            x: names(x),
            y: names(y),
            z: names(z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Arrow,
    LBrace,
    RBrace,
    Semi,
    Attrs,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, message: impl Into<String>) -> IoError {
        IoError::Parse {
            line: self.line,
            column: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self, k: usize) -> Option<u8> {
        self.src.get(self.pos + k).copied()
    }

    fn skip_blank(&mut self) -> Result<(), IoError> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                (Some(b'/'), Some(b'/')) | (Some(b'#'), _) => {
                    while !matches!(self.peek(0), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                (Some(b'/'), Some(b'*')) => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(0), self.peek(1)) {
                            (Some(b'*'), Some(b'/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (None, _) => {
                                return Err(IoError::Parse {
                                    line,
                                    column: col,
                                    message: "unterminated comment".into(),
                                })
                            }
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn quoted(&mut self) -> Result<String, IoError> {
        let (line, column) = (self.line, self.col);
        self.bump();
        let mut out = Vec::new();
        loop {
            match self.bump() {
                Some(b'"') => break,
                Some(b'\\') if self.peek(0) == Some(b'"') => {
                    self.bump();
                    out.push(b'"');
                }
                Some(c) => out.push(c),
                None => {
                    return Err(IoError::Parse {
                        line,
                        column,
                        message: "unterminated string".into(),
                    })
                }
            }
        }
        String::from_utf8(out).map_err(|_| self.err("string is not valid UTF-8"))
    }

    /// Next token with its starting position.
    fn next(&mut self) -> Result<Option<(Tok, usize, usize)>, IoError> {
        self.skip_blank()?;
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek(0) else {
            return Ok(None);
        };
        let tok = match c {
            b'{' => {
                self.bump();
                Tok::LBrace
            }
            b'}' => {
                self.bump();
                Tok::RBrace
            }
            b';' => {
                self.bump();
                Tok::Semi
            }
            b'-' if self.peek(1) == Some(b'>') => {
                self.bump();
                self.bump();
                Tok::Arrow
            }
            b'[' => {
                self.bump();
                loop {
                    self.skip_blank()?;
                    match self.peek(0) {
                        Some(b']') => {
                            self.bump();
                            break;
                        }
                        Some(b'"') => {
                            self.quoted()?;
                        }
                        Some(_) => {
                            self.bump();
                        }
                        None => {
                            return Err(IoError::Parse {
                                line,
                                column: col,
                                message: "unterminated attribute list".into(),
                            })
                        }
                    }
                }
                Tok::Attrs
            }
            b'"' => Tok::Id(self.quoted()?),
            c if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' => {
                let start = self.pos;
                while matches!(self.peek(0), Some(c) if c.is_ascii_alphanumeric() || c == b'_' || c == b'.')
                {
                    self.bump();
                }
                Tok::Id(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            other => return Err(self.err(format!("unexpected character {:?}", other as char))),
        };
        Ok(Some((tok, line, col)))
    }
}

/// Parses `digraph NAME { a -> b; c; ... }`. Nodes are numbered in order of
/// first appearance; attribute lists are skipped.
pub fn parse_dot(bytes: &[u8]) -> Result<GraphDocument, IoError> {
    let mut lx = Lexer {
        src: bytes,
        pos: 0,
        line: 1,
        col: 1,
    };
    // a lexical error only surfaces once the parser reaches it
    let mut toks = Vec::new();
    let mut lex_err = None;
    loop {
        match lx.next() {
            Ok(Some(t)) => toks.push(t),
            Ok(None) => break,
            Err(e) => {
                lex_err = Some(e);
                break;
            }
        }
    }
    let end = (lx.line, lx.col);
    let mut i = 0;
    let at = |i: usize| toks.get(i).map(|t| (t.1, t.2)).unwrap_or(end);
    let fail = |i: usize, msg: &str| {
        if i >= toks.len() {
            if let Some(e) = &lex_err {
                return e.clone();
            }
        }
        let (line, column) = at(i);
        IoError::Parse {
            line,
            column,
            message: msg.to_string(),
        }
    };

    match toks.get(i) {
        Some((Tok::Id(k), ..)) if k == "digraph" => i += 1,
        _ => return Err(fail(i, "expected `digraph`")),
    }
    if let Some((Tok::Id(_), ..)) = toks.get(i) {
        i += 1;
    }
    if !matches!(toks.get(i), Some((Tok::LBrace, ..))) {
        return Err(fail(i, "expected `{`"));
    }
    i += 1;

    let mut doc = GraphDocument {
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut add = |doc: &mut GraphDocument, id: &str| {
        if seen.insert(id.to_string(), ()).is_none() {
            doc.nodes.push(id.to_string());
        }
    };
    loop {
        match toks.get(i) {
            Some((Tok::RBrace, ..)) => {
                i += 1;
                break;
            }
            Some((Tok::Semi, ..)) => i += 1,
            Some((Tok::Id(first), ..)) => {
                let mut chain = vec![first.clone()];
                i += 1;
                while let Some((Tok::Arrow, ..)) = toks.get(i) {
                    match toks.get(i + 1) {
                        Some((Tok::Id(next), ..)) => chain.push(next.clone()),
                        _ => return Err(fail(i + 1, "expected node identifier after `->`")),
                    }
                    i += 2;
                }
                if let Some((Tok::Attrs, ..)) = toks.get(i) {
                    i += 1;
                }
                for id in &chain {
                    add(&mut doc, id);
                }
                for w in chain.windows(2) {
                    doc.edges.push([w[0].clone(), w[1].clone()]);
                }
                match toks.get(i) {
                    Some((Tok::Semi, ..)) => i += 1,
                    Some((Tok::RBrace, ..)) | Some((Tok::Id(_), ..)) => {}
                    _ => return Err(fail(i, "expected `;`, `}` or a statement")),
                }
            }
            None => return Err(fail(i, "expected `}`")),
            _ => return Err(fail(i, "expected a statement")),
        }
    }
    if i != toks.len() || lex_err.is_some() {
        return Err(fail(i, "trailing input after graph"));
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{"nodes":["v1","v2","v3","v4","v5","v6","v7"],
        "edges":[["v1","v4"],["v1","v2"],["v1","v7"],["v2","v4"],["v2","v5"],
                 ["v2","v7"],["v3","v5"],["v3","v6"],["v6","v7"]]}"#;

    #[test]
    fn json_fig1() {
        let d = parse_graph(FIG1.as_bytes(), Format::Json).unwrap();
        assert_eq!((d.node_count(), d.arc_count()), (7, 9));
        assert_eq!(d.node_by_label("v6"), Some(NodeId(5)));
    }

    #[test]
    fn json_round_trip() {
        let d = parse_graph(FIG1.as_bytes(), Format::Json).unwrap();
        let back = parse_graph(to_json(&d).as_bytes(), Format::Json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_errors() {
        let e = parse_graph(b"{\"nodes\": [\"a\"],\n \"edges\": [[\"a\"", Format::Json).unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 2, .. }), "{e:?}");
        let e = parse_graph(br#"{"nodes":["a"],"edges":[["a","b"]]}"#, Format::Json).unwrap_err();
        assert_eq!(e, IoError::UnknownLabel("b".into()));
        let e = parse_graph(
            br#"{"nodes":["a","b"],"edges":[["a","b"],["b","a"]]}"#,
            Format::Json,
        )
        .unwrap_err();
        assert!(e.to_string().contains("a -> b"), "{e}");
    }

    #[test]
    fn dot_basic() {
        let d = parse_graph(b"digraph g { a -> b; }", Format::Dot).unwrap();
        assert_eq!((d.node_count(), d.arc_count()), (2, 1));
        assert_eq!(d.label(NodeId(0)), "a");
    }

    #[test]
    fn dot_chains_attributes_and_comments() {
        let src = b"// header\ndigraph {\n  a [label=\"x;y\"];\n  a -> b -> c [color=red]\n  \"d e\";\n}\n";
        let doc = parse_dot(src).unwrap();
        assert_eq!(doc.nodes, vec!["a", "b", "c", "d e"]);
        assert_eq!(doc.edges.len(), 2);
    }

    #[test]
    fn dot_self_loop_is_build_error() {
        let e = parse_graph(b"digraph g { a -> a; }", Format::Dot).unwrap_err();
        assert_eq!(e, IoError::Build("self-loop at a".into()));
    }

    #[test]
    fn dot_rejects_other_syntax() {
        for (src, line, col) in [
            (&b"graph g { a -- b; }"[..], 1, 1),
            (b"digraph g {\n a = b; }", 2, 4),
            (b"digraph g { a -> ; }", 1, 18),
            (b"digraph g { a -> b; ", 1, 21),
            (b"digraph g { a } x", 1, 17),
        ] {
            match parse_dot(src) {
                Err(IoError::Parse { line: l, column: c, .. }) => {
                    assert_eq!((l, c), (line, col), "{}", String::from_utf8_lossy(src))
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn detect_format() {
        assert_eq!(Format::detect(Some(Path::new("g.dot")), b"{"), Format::Dot);
        assert_eq!(Format::detect(None, b"  {\"nodes\":[]}"), Format::Json);
        assert_eq!(Format::detect(None, b"digraph{}"), Format::Dot);
    }

    #[test]
    fn node_lists() {
        let d = parse_graph(FIG1.as_bytes(), Format::Json).unwrap();
        assert!(parse_node_list(&d, "").unwrap().is_empty());
        assert_eq!(parse_node_list(&d, "v1, v3").unwrap(), d.node_set([0usize, 2]));
        assert_eq!(parse_node_list(&d, "v9"), Err(IoError::UnknownLabel("v9".into())));
    }
}
