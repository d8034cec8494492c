//! Timed automata, timed games and timed games under delayed control.

mod complete;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use crate::constraint::{ClockId, Constraint};
use crate::zone::Dbm;

pub use complete::{complete_deadlock_freedom, enabled_zone, is_deadlock_free, DeadlockWitness};
pub use validate::{validate_delayed, validate_timed, Diagnostic};

/// An edge label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Named(String),
    /// `push(a, t)`: schedule `a` to run `t` time units from now.
    Push {
        action: String,
        delay: u32,
    },
}

impl Action {
    pub fn named(name: &str) -> Action {
        Action::Named(name.to_string())
    }

    pub fn push(name: &str, delay: u32) -> Action {
        Action::Push { action: name.to_string(), delay }
    }

    pub fn name(&self) -> &str {
        match self {
            Action::Named(n) => n,
            Action::Push { action, .. } => action,
        }
    }

    pub fn is_push(&self) -> bool {
        matches!(self, Action::Push { .. })
    }

    /// Parses `"kick"` or `"push kick 22"`.
    pub fn parse(text: &str) -> Option<Action> {
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.as_slice() {
            [name] if *name != "push" => Some(Action::named(name)),
            ["push", name, delay] => delay.parse().ok().map(|d| Action::push(name, d)),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Named(n) => f.write_str(n),
            Action::Push { action, delay } => write!(f, "push {action} {delay}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub invariant: Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub guard: Constraint,
    pub action: Action,
    pub resets: Vec<ClockId>,
    pub target: usize,
}

/// `(L, ℓ0, Act, X, E, Inv)`; locations and clocks are referenced by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    pub clocks: Vec<String>,
    pub locations: Vec<Location>,
    pub initial: usize,
    pub edges: Vec<Edge>,
}

impl Automaton {
    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }

    pub fn invariant_zone(&self, loc: usize) -> Dbm {
        Dbm::from_constraint(&self.locations[loc].invariant, self.clock_count()).expect("validated invariant")
    }

    pub fn guard_zone(&self, edge: usize) -> Dbm {
        Dbm::from_constraint(&self.edges[edge].guard, self.clock_count()).expect("validated guard")
    }

    pub fn outgoing(&self, loc: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.source == loc)
    }

    /// Largest constant compared against each clock in guards and invariants.
    pub fn max_constants(&self) -> Vec<i64> {
        let mut max = vec![0; self.clock_count()];
        let constraints = self.locations.iter().map(|l| &l.invariant).chain(self.edges.iter().map(|e| &e.guard));
        for c in constraints {
            for a in &c.0 {
                for id in a.clocks() {
                    max[id.0] = max[id.0].max(a.constant.abs());
                }
            }
        }
        max
    }

    pub fn size(&self) -> ModelSize {
        ModelSize {
            locations: self.locations.len(),
            clocks: self.clock_count(),
            max_constant: self.max_constants().into_iter().max().unwrap_or(0),
        }
    }

    /// A location name not yet used, derived from `base`.
    pub fn fresh_location_name(&self, base: &str) -> String {
        fresh_name(base, |n| self.location_index(n).is_some())
    }
}

pub(crate) fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|n| !taken(n)).unwrap()
}

/// Size measures: locations, clocks and the largest constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSize {
    pub locations: usize,
    pub clocks: usize,
    pub max_constant: i64,
}

/// `(A, Act_c, Act_u, F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedGame {
    pub automaton: Automaton,
    pub controllable: BTreeSet<Action>,
    pub uncontrollable: BTreeSet<Action>,
    pub targets: BTreeSet<usize>,
}

impl TimedGame {
    pub fn is_controllable(&self, a: &Action) -> bool {
        self.controllable.contains(a)
    }

    pub fn is_target(&self, loc: usize) -> bool {
        self.targets.contains(&loc)
    }
}

/// `(A, Act_c, Act_u, T, F)` with an optional schedule cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayedGame {
    pub automaton: Automaton,
    pub control: BTreeSet<String>,
    pub uncontrollable: BTreeSet<String>,
    pub delays: BTreeSet<u32>,
    pub targets: BTreeSet<usize>,
    pub cap: Option<usize>,
}

impl DelayedGame {
    pub fn is_target(&self, loc: usize) -> bool {
        self.targets.contains(&loc)
    }

    pub fn is_control(&self, a: &Action) -> bool {
        matches!(a, Action::Named(n) if self.control.contains(n))
    }

    pub fn is_uncontrollable(&self, a: &Action) -> bool {
        matches!(a, Action::Named(n) if self.uncontrollable.contains(n))
    }

    /// `Schd(Act_c, T)` in a fixed order.
    pub fn scheduling_actions(&self) -> Vec<Action> {
        self.control.iter().flat_map(|a| self.delays.iter().map(move |&t| Action::push(a, t))).collect()
    }
}

/// Either kind of game, as read from a model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Timed(TimedGame),
    Delayed(DelayedGame),
}

impl Model {
    pub fn automaton(&self) -> &Automaton {
        match self {
            Model::Timed(g) => &g.automaton,
            Model::Delayed(d) => &d.automaton,
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        match self {
            Model::Timed(g) => validate_timed(g),
            Model::Delayed(d) => validate_delayed(d),
        }
    }
}
