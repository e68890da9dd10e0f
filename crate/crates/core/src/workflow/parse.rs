//! Parser for the workflow file format.
//!
//! ```text
//! file      ::= { statement }
//! statement ::= node-decl | edge-decl | accept-decl
//! node-decl ::= ("start" | "end" | "activity" | "cond" | "fork" | "join") name ";"
//! edge-decl ::= "trans" label ":" name "->" name ";"
//! accept-decl ::= "accept" name ";"
//! name, label ::= [A-Za-z_][A-Za-z0-9_']*
//! ```
//!
//! `#` starts a comment running to end of line.  Whitespace only separates
//! tokens, so several statements may share a line.  Keywords are
//! positional: `start start;` declares a start node named `start`.
//! Transitions may reference nodes declared later in the file.

use super::{GraphError, Node, NodeKind, TransitionEdge, WorkflowGraph};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Syntax or well-formedness error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for WorkflowParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for WorkflowParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Arrow,
    Semi,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Semi => "`;`".into(),
        }
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'\''
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in src.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

fn err_at(src: &str, offset: usize, message: impl Into<String>) -> WorkflowParseError {
    let (line, col) = line_col(src, offset);
    WorkflowParseError {
        line,
        col,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, WorkflowParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b';' => {
                toks.push((Tok::Semi, i));
                i += 1;
            }
            b':' => {
                toks.push((Tok::Colon, i));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                toks.push((Tok::Arrow, i));
                i += 2;
            }
            _ if is_ident_start(b) => {
                let start = i;
                while i < bytes.len() && is_ident_continue(bytes[i]) {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(err_at(src, i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> WorkflowParseError {
        err_at(self.src, self.here(), message)
    }

    fn expect_ident(&mut self, what: &str) -> Result<(Arc<str>, usize), WorkflowParseError> {
        match self.bump() {
            Some((Tok::Ident(s), o)) => Ok((Arc::from(s.as_str()), o)),
            Some((t, o)) => Err(err_at(
                self.src,
                o,
                format!("expected {what}, found {}", t.describe()),
            )),
            None => Err(self.error(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_tok(&mut self, want: Tok, what: &str) -> Result<(), WorkflowParseError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, o)) => Err(err_at(
                self.src,
                o,
                format!("expected {what}, found {}", t.describe()),
            )),
            None => Err(self.error(format!("expected {what}, found end of input"))),
        }
    }
}

/// Parses workflow file content into a named graph.
pub fn parse_workflow(name: &str, text: &str) -> Result<WorkflowGraph, WorkflowParseError> {
    let mut p = Parser {
        src: text,
        toks: lex(text)?,
        pos: 0,
    };
    let mut nodes: Vec<Node> = Vec::new();
    let mut edges: Vec<(TransitionEdge, usize)> = Vec::new();
    let mut accept: BTreeSet<Arc<str>> = BTreeSet::new();

    while p.peek().is_some() {
        let (kw, kw_off) = match p.bump() {
            Some((Tok::Ident(s), o)) => (s, o),
            Some((t, o)) => {
                return Err(err_at(
                    text,
                    o,
                    format!("expected a declaration keyword, found {}", t.describe()),
                ))
            }
            None => unreachable!(),
        };
        let kind = match kw.as_str() {
            "start" => Some(NodeKind::Start),
            "end" => Some(NodeKind::End),
            "activity" => Some(NodeKind::Activity),
            "cond" => Some(NodeKind::Conditional),
            "fork" => Some(NodeKind::SplitFork),
            "join" => Some(NodeKind::SplitJoin),
            _ => None,
        };
        if let Some(kind) = kind {
            let (node_name, off) = p.expect_ident("a node name")?;
            p.expect_tok(Tok::Semi, "`;`")?;
            if nodes.iter().any(|n| n.name == node_name) {
                return Err(err_at(text, off, format!("duplicate node `{node_name}`")));
            }
            nodes.push(Node {
                name: node_name,
                kind,
            });
        } else if kw == "trans" {
            let (label, label_off) = p.expect_ident("a transition label")?;
            p.expect_tok(Tok::Colon, "`:`")?;
            let (source, _) = p.expect_ident("a source node name")?;
            p.expect_tok(Tok::Arrow, "`->`")?;
            let (target, _) = p.expect_ident("a target node name")?;
            p.expect_tok(Tok::Semi, "`;`")?;
            if edges.iter().any(|(e, _)| e.label == label) {
                return Err(err_at(
                    text,
                    label_off,
                    format!("duplicate transition label `{label}`"),
                ));
            }
            edges.push((
                TransitionEdge {
                    label,
                    source,
                    target,
                },
                label_off,
            ));
        } else if kw == "accept" {
            let (node_name, _) = p.expect_ident("an activity name")?;
            p.expect_tok(Tok::Semi, "`;`")?;
            accept.insert(node_name);
        } else {
            return Err(err_at(
                text,
                kw_off,
                format!("unknown declaration keyword `{kw}`"),
            ));
        }
    }

    // Edges may reference nodes declared later, so resolve after the full
    // pass, reporting at the offending transition.
    for (e, off) in &edges {
        for endpoint in [&e.source, &e.target] {
            if !nodes.iter().any(|n| &n.name == endpoint) {
                return Err(err_at(
                    text,
                    *off,
                    format!("transition `{}` references unknown node `{endpoint}`", e.label),
                ));
            }
        }
    }

    WorkflowGraph::new(name, nodes, edges.into_iter().map(|(e, _)| e).collect(), accept).map_err(
        |e| match e {
            // Duplicates and dangling edges were caught above with positions.
            GraphError::DuplicateNode(_)
            | GraphError::DuplicateLabel(_)
            | GraphError::DanglingEdge { .. }
            | GraphError::UnknownNode(_) => {
                unreachable!("graph construction failed after parse-time checks: {e}")
            }
        },
    )
}
