use std::fmt;

use thiserror::Error;

use super::{Formula, FormulaContext};
use crate::coalition::Coalition;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaErrorKind {
    Syntax(String),
    UnknownProposition(String),
    AgentOutOfRange { agent: u64, agents: u32 },
    MalformedCoalition(String),
}

impl fmt::Display for FormulaErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            FormulaErrorKind::UnknownProposition(p) => write!(f, "unknown proposition `{p}`"),
            FormulaErrorKind::AgentOutOfRange { agent, agents } => {
                write!(f, "agent {agent} out of range 1..{agents}")
            }
            FormulaErrorKind::MalformedCoalition(m) => write!(f, "malformed coalition: {m}"),
        }
    }
}

/// A parse failure at a 0-based byte offset.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{kind} at column {}", .position + 1)]
pub struct FormulaError {
    pub kind: FormulaErrorKind,
    pub position: usize,
}

impl FormulaError {
    fn new(kind: FormulaErrorKind, position: usize) -> Self {
        FormulaError { kind, position }
    }

    fn syntax(msg: impl Into<String>, position: usize) -> Self {
        Self::new(FormulaErrorKind::Syntax(msg.into()), position)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Bang,
    Bar,
    Amp,
    LParen,
    RParen,
    LAngle2,
    RAngle2,
    LBracket2,
    RBracket2,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Dash,
    Int(u64),
    Ident(String),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Bang => "`!`",
            Tok::Bar => "`|`",
            Tok::Amp => "`&`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LAngle2 => "`<<`",
            Tok::RAngle2 => "`>>`",
            Tok::LBracket2 => "`[[`",
            Tok::RBracket2 => "`]]`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Dash => "`-`",
            Tok::Int(i) => return write!(f, "`{i}`"),
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

const KEYWORDS: [&str; 5] = ["true", "all", "X", "G", "U"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let next = bytes.get(i + 1).copied();
        let (tok, width) = match (bytes[i], next) {
            (b' ' | b'\t' | b'\n' | b'\r', _) => {
                i += 1;
                continue;
            }
            (b'<', Some(b'<')) => (Tok::LAngle2, 2),
            (b'>', Some(b'>')) => (Tok::RAngle2, 2),
            (b'[', Some(b'[')) => (Tok::LBracket2, 2),
            (b']', Some(b']')) => (Tok::RBracket2, 2),
            (b'!', _) => (Tok::Bang, 1),
            (b'|', _) => (Tok::Bar, 1),
            (b'&', _) => (Tok::Amp, 1),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b'{', _) => (Tok::LBrace, 1),
            (b'}', _) => (Tok::RBrace, 1),
            (b',', _) => (Tok::Comma, 1),
            (b'-', _) => (Tok::Dash, 1),
            (b'[', _) => (Tok::LBracket, 1),
            (b']', _) => (Tok::RBracket, 1),
            (c, _) if c.is_ascii_digit() => {
                let len = bytes[i..].iter().take_while(|b| b.is_ascii_digit()).count();
                let value = text[i..i + len]
                    .parse::<u64>()
                    .map_err(|_| FormulaError::syntax("integer too large", start))?;
                (Tok::Int(value), len)
            }
            (c, _) if c.is_ascii_alphabetic() || c == b'_' => {
                let len = bytes[i..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_' || **b == b'\'')
                    .count();
                (Tok::Ident(text[i..i + len].to_owned()), len)
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(FormulaError::syntax(format!("unexpected character `{ch}`"), start));
            }
        };
        i += width;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ctx: &'c FormulaContext,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(FormulaError::syntax(format!("expected {want}, found {}", self.peek()), self.pos()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Bang => Ok(self.unary()?.not()),
            Tok::LParen => {
                let inner = self.or()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::LAngle2 => {
                let c = self.coalition()?;
                self.expect(Tok::RAngle2)?;
                if self.is_keyword("X") {
                    self.bump();
                    Ok(Formula::next(c, self.unary()?))
                } else if self.is_keyword("G") {
                    self.bump();
                    Ok(Formula::globally(c, self.unary()?))
                } else {
                    let lhs = self.unary()?;
                    if !self.is_keyword("U") {
                        return Err(FormulaError::syntax(
                            format!("expected `X`, `G` or `U` after coalition, found {}", self.peek()),
                            self.pos(),
                        ));
                    }
                    self.bump();
                    Ok(Formula::until(c, lhs, self.unary()?))
                }
            }
            Tok::LBracket => {
                let c = self.coalition()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::comply(c, self.unary()?))
            }
            Tok::LBracket2 => {
                let c = self.coalition()?;
                self.expect(Tok::RBracket2)?;
                if !self.is_keyword("X") {
                    return Err(FormulaError::syntax(
                        format!("only `X` may follow `[[C]]`, found {}", self.peek()),
                        self.pos(),
                    ));
                }
                self.bump();
                Ok(Formula::cannot_avoid_next(c, self.unary()?))
            }
            Tok::Ident(s) if s == "true" => Ok(Formula::Top),
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                Err(FormulaError::syntax(format!("unexpected keyword `{s}`"), pos))
            }
            Tok::Ident(s) => {
                if self.ctx.propositions.contains(&s) {
                    Ok(Formula::Prop(s))
                } else {
                    Err(FormulaError::new(FormulaErrorKind::UnknownProposition(s), pos))
                }
            }
            other => Err(FormulaError::syntax(format!("expected a formula, found {other}"), pos)),
        }
    }

    fn agent(&mut self) -> Result<(u32, usize), FormulaError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(a) if a >= 1 && a <= u64::from(self.ctx.agents) => Ok((a as u32, pos)),
            Tok::Int(a) => Err(FormulaError::new(
                FormulaErrorKind::AgentOutOfRange { agent: a, agents: self.ctx.agents },
                pos,
            )),
            other => Err(FormulaError::new(
                FormulaErrorKind::MalformedCoalition(format!("expected an agent index, found {other}")),
                pos,
            )),
        }
    }

    /// Items up to (not including) a closing token.
    fn items(&mut self, close: &Tok) -> Result<Coalition, FormulaError> {
        let mut out = Coalition::empty();
        if self.peek() == close {
            return Ok(out);
        }
        loop {
            let (lo, lo_pos) = self.agent()?;
            let hi = if *self.peek() == Tok::Dash {
                self.bump();
                let (hi, _) = self.agent()?;
                if hi < lo {
                    return Err(FormulaError::new(
                        FormulaErrorKind::MalformedCoalition(format!("empty range {lo}-{hi}")),
                        lo_pos,
                    ));
                }
                hi
            } else {
                lo
            };
            out = out.union(&Coalition::range(lo, hi));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn coalition(&mut self) -> Result<Coalition, FormulaError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) if s == "all" => Ok(Coalition::grand(self.ctx.agents)),
            Tok::LBrace => {
                let c = self.items(&Tok::RBrace)?;
                if *self.peek() != Tok::RBrace {
                    return Err(FormulaError::new(
                        FormulaErrorKind::MalformedCoalition(format!("expected `}}`, found {}", self.peek())),
                        self.pos(),
                    ));
                }
                self.bump();
                Ok(c)
            }
            other => Err(FormulaError::new(
                FormulaErrorKind::MalformedCoalition(format!("expected `all` or `{{`, found {other}")),
                pos,
            )),
        }
    }
}

pub fn parse_formula(text: &str, ctx: &FormulaContext) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks: lex(text)?, at: 0, ctx };
    let f = p.or()?;
    if *p.peek() != Tok::End {
        return Err(FormulaError::syntax(format!("unexpected {}", p.peek()), p.pos()));
    }
    Ok(f)
}

/// Parses `all`, `none`, `{1,3-5}` or a bare list `1,3-5`.
pub fn parse_coalition(text: &str, agents: u32) -> Result<Coalition, FormulaError> {
    let trimmed = text.trim();
    if trimmed == "none" {
        return Ok(Coalition::empty());
    }
    let ctx = FormulaContext::new(agents, Vec::<String>::new());
    let mut p = Parser { toks: lex(trimmed)?, at: 0, ctx: &ctx };
    let c = match p.peek() {
        Tok::Ident(_) | Tok::LBrace => p.coalition()?,
        _ => p.items(&Tok::End)?,
    };
    if *p.peek() != Tok::End {
        return Err(FormulaError::new(
            FormulaErrorKind::MalformedCoalition(format!("unexpected {}", p.peek())),
            p.pos(),
        ));
    }
    Ok(c)
}
