//! Parser for the scenario file format.
//!
//! ```text
//! file      ::= { statement }
//! statement ::= "config1" string ";"
//!            |  "config2" string ";"
//!            |  "instance" number "start" (number | "free") ";"
//!            |  "reconfig" "at" (number | "free") ";"
//!            |  "accept" ident ";"
//! string    ::= '"' path-chars '"'
//! ```
//!
//! `#` comments run to end of line.  One `config1` and one `config2`
//! statement are required; instance indices must be exactly 1..n (any
//! order); `reconfig at` defaults to `free` when omitted.  Workflow paths
//! are resolved by the caller, relative to the scenario file.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Scenario file syntax/consistency error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ScenarioParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ScenarioParseError {}

/// Parsed scenario file content; workflow files are not yet loaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub config1_path: String,
    pub config2_path: String,
    /// Start position per instance, index 0 = instance 1; `None` = free.
    pub starts: Vec<Option<usize>>,
    pub reconfig_at: Option<usize>,
    pub accept: BTreeSet<Arc<str>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(usize),
    Str(String),
    Semi,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("`{n}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Semi => "`;`".into(),
        }
    }
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

fn err_at(src: &str, offset: usize, message: impl Into<String>) -> ScenarioParseError {
    let (line, col) = line_col(src, offset);
    ScenarioParseError {
        line,
        col,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ScenarioParseError> {
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
            b'"' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                    i += 1;
                }
                if i >= bytes.len() || bytes[i] != b'"' {
                    return Err(err_at(src, start, "unterminated string"));
                }
                toks.push((Tok::Str(src[start + 1..i].to_string()), start));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: usize = src[start..i]
                    .parse()
                    .map_err(|_| err_at(src, start, "number out of range"))?;
                toks.push((Tok::Number(n), start));
            }
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
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

    fn error(&self, message: impl Into<String>) -> ScenarioParseError {
        err_at(self.src, self.here(), message)
    }

    fn expect(&mut self, what: &str) -> Result<(Tok, usize), ScenarioParseError> {
        self.bump()
            .ok_or_else(|| self.error(format!("expected {what}, found end of input")))
    }

    fn expect_semi(&mut self) -> Result<(), ScenarioParseError> {
        match self.expect("`;`")? {
            (Tok::Semi, _) => Ok(()),
            (t, o) => Err(err_at(
                self.src,
                o,
                format!("expected `;`, found {}", t.describe()),
            )),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ScenarioParseError> {
        match self.expect(&format!("`{kw}`"))? {
            (Tok::Ident(s), _) if s == kw => Ok(()),
            (t, o) => Err(err_at(
                self.src,
                o,
                format!("expected `{kw}`, found {}", t.describe()),
            )),
        }
    }

    fn expect_string(&mut self, what: &str) -> Result<String, ScenarioParseError> {
        match self.expect(what)? {
            (Tok::Str(s), _) => Ok(s),
            (t, o) => Err(err_at(
                self.src,
                o,
                format!("expected {what}, found {}", t.describe()),
            )),
        }
    }

    fn expect_number(&mut self, what: &str) -> Result<(usize, usize), ScenarioParseError> {
        match self.expect(what)? {
            (Tok::Number(n), o) => Ok((n, o)),
            (t, o) => Err(err_at(
                self.src,
                o,
                format!("expected {what}, found {}", t.describe()),
            )),
        }
    }

    /// A number or the keyword `free`.
    fn expect_position(&mut self) -> Result<Option<usize>, ScenarioParseError> {
        match self.expect("a position or `free`")? {
            (Tok::Number(n), _) => Ok(Some(n)),
            (Tok::Ident(s), _) if s == "free" => Ok(None),
            (t, o) => Err(err_at(
                self.src,
                o,
                format!("expected a position or `free`, found {}", t.describe()),
            )),
        }
    }
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<ScenarioSpec, ScenarioParseError> {
        let mut p = Parser {
            src: text,
            toks: lex(text)?,
            pos: 0,
        };
        let mut config1: Option<String> = None;
        let mut config2: Option<String> = None;
        let mut instances: Vec<(usize, Option<usize>, usize)> = Vec::new();
        let mut reconfig: Option<(Option<usize>, usize)> = None;
        let mut accept: BTreeSet<Arc<str>> = BTreeSet::new();

        while p.toks.get(p.pos).is_some() {
            let (tok, off) = p.bump().unwrap();
            let kw = match tok {
                Tok::Ident(s) => s,
                t => {
                    return Err(err_at(
                        text,
                        off,
                        format!("expected a statement keyword, found {}", t.describe()),
                    ))
                }
            };
            match kw.as_str() {
                "config1" | "config2" => {
                    let path = p.expect_string("a quoted workflow path")?;
                    p.expect_semi()?;
                    let slot = if kw == "config1" {
                        &mut config1
                    } else {
                        &mut config2
                    };
                    if slot.is_some() {
                        return Err(err_at(text, off, format!("`{kw}` declared twice")));
                    }
                    *slot = Some(path);
                }
                "instance" => {
                    let (index, idx_off) = p.expect_number("an instance index")?;
                    p.expect_keyword("start")?;
                    let start = p.expect_position()?;
                    p.expect_semi()?;
                    if index == 0 {
                        return Err(err_at(text, idx_off, "instance indices are 1-based"));
                    }
                    if instances.iter().any(|(i, _, _)| *i == index) {
                        return Err(err_at(
                            text,
                            idx_off,
                            format!("instance {index} declared twice"),
                        ));
                    }
                    instances.push((index, start, idx_off));
                }
                "reconfig" => {
                    p.expect_keyword("at")?;
                    let at = p.expect_position()?;
                    p.expect_semi()?;
                    if reconfig.is_some() {
                        return Err(err_at(text, off, "`reconfig` declared twice"));
                    }
                    reconfig = Some((at, off));
                }
                "accept" => {
                    let (tok, o) = p.expect("an activity name")?;
                    let name = match tok {
                        Tok::Ident(s) => s,
                        t => {
                            return Err(err_at(
                                text,
                                o,
                                format!("expected an activity name, found {}", t.describe()),
                            ))
                        }
                    };
                    p.expect_semi()?;
                    accept.insert(Arc::from(name.as_str()));
                }
                _ => {
                    return Err(err_at(
                        text,
                        off,
                        format!("unknown statement keyword `{kw}`"),
                    ))
                }
            }
        }

        let config1_path = config1
            .ok_or_else(|| err_at(text, text.len(), "missing `config1` declaration"))?;
        let config2_path = config2
            .ok_or_else(|| err_at(text, text.len(), "missing `config2` declaration"))?;
        if instances.is_empty() {
            return Err(err_at(text, text.len(), "no instances declared"));
        }
        instances.sort_by_key(|(i, _, _)| *i);
        for (expected, (index, _, off)) in (1..).zip(&instances) {
            if *index != expected {
                return Err(err_at(
                    text,
                    *off,
                    format!(
                        "instance indices must be contiguous from 1; found {index}, expected {expected}"
                    ),
                ));
            }
        }
        Ok(ScenarioSpec {
            config1_path,
            config2_path,
            starts: instances.into_iter().map(|(_, s, _)| s).collect(),
            reconfig_at: reconfig.and_then(|(at, _)| at),
            accept,
        })
    }
}
