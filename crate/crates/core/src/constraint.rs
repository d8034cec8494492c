//! Clock constraints and their text syntax.
//!
//! Text form: atoms `x REL k` or `x - y REL k` joined by `&&`, with
//! `REL` one of `<`, `<=`, `==`, `>=`, `>`. The empty string is `true`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Index of a clock in its model's clock list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClockId(pub usize);

/// One nonnegative rational per clock.
pub type Valuation = Vec<Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "==",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }
}

/// `clock REL k` or, with `other`, `clock - other REL k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub clock: ClockId,
    pub other: Option<ClockId>,
    pub rel: Rel,
    pub constant: i64,
}

impl Atom {
    pub fn new(clock: ClockId, rel: Rel, constant: i64) -> Self {
        Atom { clock, other: None, rel, constant }
    }

    pub fn diff(clock: ClockId, other: ClockId, rel: Rel, constant: i64) -> Self {
        Atom { clock, other: Some(other), rel, constant }
    }

    pub fn is_rectangular(&self) -> bool {
        self.other.is_none()
    }

    pub fn holds(&self, v: &[Rational]) -> bool {
        let mut lhs = v[self.clock.0].clone();
        if let Some(o) = self.other {
            lhs -= &v[o.0];
        }
        self.rel.holds(&lhs, &crate::rational::int(self.constant))
    }

    pub fn clocks(&self) -> impl Iterator<Item = ClockId> {
        std::iter::once(self.clock).chain(self.other)
    }
}

/// Conjunction of atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Constraint(pub Vec<Atom>);

impl Constraint {
    pub fn top() -> Self {
        Constraint(Vec::new())
    }

    pub fn is_true(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_rectangular(&self) -> bool {
        self.0.iter().all(Atom::is_rectangular)
    }

    pub fn holds(&self, v: &[Rational]) -> bool {
        self.0.iter().all(|a| a.holds(v))
    }

    pub fn and(mut self, atom: Atom) -> Self {
        self.0.push(atom);
        self
    }

    pub fn max_constant(&self) -> i64 {
        self.0.iter().map(|a| a.constant.abs()).max().unwrap_or(0)
    }

    /// Parses constraint text, resolving clock names against `clocks`.
    pub fn parse(text: &str, clocks: &[String]) -> Result<Self> {
        let raw = parse_raw(text)?;
        let lookup = |name: &str| {
            clocks.iter().position(|c| c == name).map(ClockId).ok_or_else(|| Error::UnknownClock(name.to_string()))
        };
        let mut atoms = Vec::with_capacity(raw.len());
        for r in raw {
            atoms.push(Atom {
                clock: lookup(&r.clock)?,
                other: r.other.as_deref().map(lookup).transpose()?,
                rel: r.rel,
                constant: r.constant,
            });
        }
        Ok(Constraint(atoms))
    }

    pub fn display<'a>(&'a self, clocks: &'a [String]) -> impl fmt::Display + 'a {
        DisplayConstraint { c: self, clocks }
    }
}

struct DisplayConstraint<'a> {
    c: &'a Constraint,
    clocks: &'a [String],
}

impl fmt::Display for DisplayConstraint<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.c.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            f.write_str(&self.clocks[a.clock.0])?;
            if let Some(o) = a.other {
                write!(f, " - {}", self.clocks[o.0])?;
            }
            write!(f, " {} {}", a.rel.symbol(), a.constant)?;
        }
        Ok(())
    }
}

/// An atom whose clock names are not yet resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawAtom {
    pub clock: String,
    pub other: Option<String>,
    pub rel: Rel,
    pub constant: i64,
}

pub fn parse_raw(text: &str) -> Result<Vec<RawAtom>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split("&&").map(parse_atom).collect()
}

fn parse_atom(text: &str) -> Result<RawAtom> {
    let bad = |why: &str| Error::Parse(format!("atom `{}`: {why}", text.trim()));
    // longest operators first
    let (pos, rel, width) = ["<=", ">=", "==", "<", ">"]
        .iter()
        .find_map(|op| {
            text.find(op).map(|p| {
                let rel = match *op {
                    "<=" => Rel::Le,
                    ">=" => Rel::Ge,
                    "==" => Rel::Eq,
                    "<" => Rel::Lt,
                    _ => Rel::Gt,
                };
                (p, rel, op.len())
            })
        })
        .ok_or_else(|| bad("missing relation"))?;
    let lhs = text[..pos].trim();
    let rhs = text[pos + width..].trim();
    let constant: i64 = rhs.parse().map_err(|_| bad("constant is not an integer"))?;
    let (clock, other) = match lhs.split_once('-') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (lhs, None),
    };
    let ident = |s: &str| {
        !s.is_empty()
            && s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && s.chars().all(|c| c.is_alphanumeric() || c == '_')
    };
    if !ident(clock) || !other.is_none_or(ident) {
        return Err(bad("expected clock identifier"));
    }
    Ok(RawAtom { clock: clock.to_string(), other: other.map(str::to_string), rel, constant })
}
