//! Formula syntax: the AST, a text parser and a canonical printer.
//!
//! Concrete grammar, loosest binding first:
//!
//! ```text
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '!' unary
//!          | '<<' C '>>' 'X' unary
//!          | '<<' C '>>' 'G' unary
//!          | '<<' C '>>' unary 'U' unary
//!          | '[' C ']' unary
//!          | '[[' C ']]' 'X' unary          -- sugar for !<<C>> X !φ
//!          | 'true' | ident | '(' or ')'
//! C       := 'all' | '{' (item (',' item)*)? '}'
//! item    := int | int '-' int
//! ```

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use crate::coalition::Coalition;

pub use parser::{parse_coalition, parse_formula, FormulaError, FormulaErrorKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Prop(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `<<C>> X φ`
    Next(Coalition, Box<Formula>),
    /// `<<C>> G φ`
    Globally(Coalition, Box<Formula>),
    /// `<<C>> φ U ψ`
    Until(Coalition, Box<Formula>, Box<Formula>),
    /// `[C] φ`: evaluate `φ` assuming exactly the agents in `C` comply.
    Comply(Coalition, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn next(coalition: Coalition, f: Formula) -> Self {
        Formula::Next(coalition, Box::new(f))
    }

    pub fn globally(coalition: Coalition, f: Formula) -> Self {
        Formula::Globally(coalition, Box::new(f))
    }

    pub fn until(coalition: Coalition, f: Formula, g: Formula) -> Self {
        Formula::Until(coalition, Box::new(f), Box::new(g))
    }

    pub fn comply(coalition: Coalition, f: Formula) -> Self {
        Formula::Comply(coalition, Box::new(f))
    }

    /// `[[C]] X φ`, i.e. `C` cannot avoid `φ` next.
    pub fn cannot_avoid_next(coalition: Coalition, f: Formula) -> Self {
        Formula::next(coalition, f.not()).not()
    }

    /// Nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) => 0,
            Formula::Not(f) | Formula::Next(_, f) | Formula::Globally(_, f) | Formula::Comply(_, f) => {
                1 + f.depth()
            }
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Until(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn propositions(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.as_str());
            }
        });
        out
    }

    /// Every coalition mentioned anywhere in the formula.
    pub fn coalitions(&self) -> Vec<&Coalition> {
        let mut out = Vec::new();
        self.walk(&mut |f| match f {
            Formula::Next(c, _) | Formula::Globally(c, _) | Formula::Until(c, _, _) | Formula::Comply(c, _) => {
                out.push(c)
            }
            _ => {}
        });
        out
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Top | Formula::Prop(_) => {}
            Formula::Not(f) | Formula::Next(_, f) | Formula::Globally(_, f) | Formula::Comply(_, f) => f.walk(visit),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Until(_, a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }
}

/// Binding strength used by the printer; higher binds tighter.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Or,
    And,
    Unary,
}

fn write_at(f: &mut fmt::Formatter<'_>, phi: &Formula, ctx: Prec) -> fmt::Result {
    let own = match phi {
        Formula::Or(..) => Prec::Or,
        Formula::And(..) => Prec::And,
        _ => Prec::Unary,
    };
    if own < ctx {
        f.write_str("(")?;
    }
    match phi {
        Formula::Top => f.write_str("true")?,
        Formula::Prop(p) => f.write_str(p)?,
        Formula::Not(x) => {
            f.write_str("!")?;
            write_at(f, x, Prec::Unary)?;
        }
        Formula::Or(a, b) => {
            write_at(f, a, Prec::Or)?;
            f.write_str(" | ")?;
            write_at(f, b, Prec::And)?;
        }
        Formula::And(a, b) => {
            write_at(f, a, Prec::And)?;
            f.write_str(" & ")?;
            write_at(f, b, Prec::Unary)?;
        }
        Formula::Next(c, x) => {
            write!(f, "<<{c}>> X ")?;
            write_at(f, x, Prec::Unary)?;
        }
        Formula::Globally(c, x) => {
            write!(f, "<<{c}>> G ")?;
            write_at(f, x, Prec::Unary)?;
        }
        Formula::Until(c, a, b) => {
            write!(f, "<<{c}>> ")?;
            // A bare until on the left would swallow our own `U`.
            if matches!(**a, Formula::Until(..)) {
                f.write_str("(")?;
                write_at(f, a, Prec::Or)?;
                f.write_str(")")?;
            } else {
                write_at(f, a, Prec::Unary)?;
            }
            f.write_str(" U ")?;
            write_at(f, b, Prec::Unary)?;
        }
        Formula::Comply(c, x) => {
            write!(f, "[{c}] ")?;
            write_at(f, x, Prec::Unary)?;
        }
    }
    if own < ctx {
        f.write_str(")")?;
    }
    Ok(())
}

/// Canonical text; parsing it back yields the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, Prec::Or)
    }
}

pub fn print_formula(phi: &Formula) -> String {
    phi.to_string()
}

/// What the parser needs to know about the model.
#[derive(Clone, Debug)]
pub struct FormulaContext {
    pub agents: u32,
    pub propositions: BTreeSet<String>,
}

impl FormulaContext {
    pub fn new<I, S>(agents: u32, propositions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FormulaContext {
            agents,
            propositions: propositions.into_iter().map(Into::into).collect(),
        }
    }

    pub fn of(model: &crate::model::Rcgs1Model) -> Self {
        FormulaContext {
            agents: model.agents(),
            propositions: model.propositions().clone(),
        }
    }
}
