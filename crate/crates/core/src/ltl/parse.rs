//! Textual formula syntax.
//!
//! Grammar (lowest precedence first):
//!
//! ```text
//! iff     := implies ("<->" implies)*            left-associative
//! implies := or ("->" implies)?                  right-associative
//! or      := and ("||" and)*
//! and     := temporal ("&&" temporal)*
//! temporal:= unary (("U" | "S" | "R") temporal)? right-associative
//! unary   := ("!" | "X" | "Y" | "G" | "F")* primary
//! primary := "true" | "false" | ident | "(" iff ")"
//! ```
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_':#]*`, which admits namespaced
//! proposition names such as `A:Ship#1` or `T:t'_yes#2`.  The keywords
//! `X Y U S G F true false` are reserved.  `R` is special-cased: in
//! operand position it is an ordinary atom (the reconfiguration flag),
//! in infix position it is the release operator.

use super::Formula;
use std::fmt;

/// Syntax error with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Next,
    Yesterday,
    Until,
    Since,
    Release,
    Globally,
    Eventually,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&&`".into(),
            Tok::Or => "`||`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Next => "`X`".into(),
            Tok::Yesterday => "`Y`".into(),
            Tok::Until => "`U`".into(),
            Tok::Since => "`S`".into(),
            Tok::Release => "`R`".into(),
            Tok::Globally => "`G`".into(),
            Tok::Eventually => "`F`".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | ':' | '#')
}

struct Lexer<'a> {
    src: &'a str,
    /// (token, byte offset of its first character)
    toks: Vec<(Tok, usize)>,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in src.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

fn err_at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, col) = line_col(src, offset);
    ParseError {
        line,
        col,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '!' => {
                toks.push((Tok::Not, i));
                i += 1;
            }
            '&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    toks.push((Tok::And, i));
                    i += 2;
                } else {
                    return Err(err_at(src, i, "expected `&&`"));
                }
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    toks.push((Tok::Or, i));
                    i += 2;
                } else {
                    return Err(err_at(src, i, "expected `||`"));
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Implies, i));
                    i += 2;
                } else {
                    return Err(err_at(src, i, "expected `->`"));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::Iff, i));
                    i += 3;
                } else {
                    return Err(err_at(src, i, "expected `<->`"));
                }
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < bytes.len() && is_ident_continue(bytes[i] as char) {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "Y" => Tok::Yesterday,
                    "U" => Tok::Until,
                    "S" => Tok::Since,
                    "R" => Tok::Release,
                    "G" => Tok::Globally,
                    "F" => Tok::Eventually,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, start));
            }
            other => {
                return Err(err_at(src, i, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    lx: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.lx
            .toks
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.lx.src.len())
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        err_at(self.lx.src, self.here(), message)
    }

    fn expected(&self, what: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {what}, found {}", t.describe())),
            None => self.error(format!("expected {what}, found end of input")),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while self.peek() == Some(&Tok::Iff) {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.temporal()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.bump();
                let rhs = self.temporal()?;
                Ok(Formula::until(lhs, rhs))
            }
            Some(Tok::Since) => {
                self.bump();
                let rhs = self.temporal()?;
                Ok(Formula::since(lhs, rhs))
            }
            Some(Tok::Release) => {
                self.bump();
                let rhs = self.temporal()?;
                Ok(Formula::release(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Some(Tok::Yesterday) => {
                self.bump();
                Ok(Formula::yesterday(self.unary()?))
            }
            Some(Tok::Globally) => {
                self.bump();
                Ok(Formula::globally(self.unary()?))
            }
            Some(Tok::Eventually) => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::True) => {
                self.bump();
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Formula::False)
            }
            // `R` in operand position is the reconfiguration atom.
            Some(Tok::Release) => {
                self.bump();
                Ok(Formula::atom("R"))
            }
            Some(Tok::Ident(_)) => {
                let Some(Tok::Ident(name)) = self.bump() else {
                    unreachable!()
                };
                Ok(Formula::atom(name))
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.iff()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.expected("`)`"))
                }
            }
            _ => Err(self.expected("a formula")),
        }
    }
}

/// Parses the CLI's textual formula syntax.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        lx: Lexer { src, toks },
        pos: 0,
    };
    let f = p.iff()?;
    if p.peek().is_some() {
        Err(p.expected("end of input"))
    } else {
        Ok(f)
    }
}
