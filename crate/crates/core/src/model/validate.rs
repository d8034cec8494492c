use std::collections::BTreeSet;
use std::fmt;

use super::{Action, Automaton, DelayedGame, TimedGame};
use crate::constraint::Constraint;

/// One violated model invariant, with the offending element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(subject: impl Into<String>, message: impl Into<String>) -> Diagnostic {
        Diagnostic { subject: subject.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

fn edge_subject(a: &Automaton, i: usize) -> String {
    let e = &a.edges[i];
    let name = |l: usize| a.locations.get(l).map_or("?", |l| l.name.as_str());
    format!("edge {i} ({} -> {})", name(e.source), name(e.target))
}

fn check_constraint(out: &mut Vec<Diagnostic>, subject: &str, what: &str, c: &Constraint, clocks: usize) {
    for atom in &c.0 {
        if atom.clocks().any(|id| id.0 >= clocks) {
            out.push(Diagnostic::new(subject, format!("{what} references an unknown clock")));
            return;
        }
    }
    if !c.is_rectangular() {
        out.push(Diagnostic::new(subject, format!("{what} uses a clock difference")));
    }
}

fn check_automaton(a: &Automaton) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = a.clock_count();
    if a.initial >= a.locations.len() {
        out.push(Diagnostic::new("model", "initial location does not exist"));
    }
    let mut seen = BTreeSet::new();
    for c in &a.clocks {
        if !seen.insert(c) {
            out.push(Diagnostic::new(format!("clock {c}"), "duplicate clock name"));
        }
    }
    let mut seen = BTreeSet::new();
    for l in &a.locations {
        let subject = format!("location {}", l.name);
        if !seen.insert(&l.name) {
            out.push(Diagnostic::new(&subject, "duplicate location name"));
        }
        check_constraint(&mut out, &subject, "invariant", &l.invariant, n);
    }
    for (i, e) in a.edges.iter().enumerate() {
        let subject = edge_subject(a, i);
        if e.source >= a.locations.len() || e.target >= a.locations.len() {
            out.push(Diagnostic::new(&subject, "endpoint does not exist"));
        }
        check_constraint(&mut out, &subject, "guard", &e.guard, n);
        if e.resets.iter().any(|c| c.0 >= n) {
            out.push(Diagnostic::new(&subject, "reset of an unknown clock"));
        }
    }
    out
}

fn check_targets(out: &mut Vec<Diagnostic>, targets: &BTreeSet<usize>, locations: usize) {
    if targets.iter().any(|&t| t >= locations) {
        out.push(Diagnostic::new("model", "target location does not exist"));
    }
}

pub fn validate_timed(g: &TimedGame) -> Vec<Diagnostic> {
    let a = &g.automaton;
    let mut out = check_automaton(a);
    check_targets(&mut out, &g.targets, a.locations.len());
    for act in g.controllable.intersection(&g.uncontrollable) {
        out.push(Diagnostic::new(format!("action {act}"), "both controllable and uncontrollable"));
    }
    for (i, e) in a.edges.iter().enumerate() {
        if !g.controllable.contains(&e.action) && !g.uncontrollable.contains(&e.action) {
            out.push(Diagnostic::new(edge_subject(a, i), format!("action `{}` is not declared", e.action)));
        }
    }
    out
}

pub fn validate_delayed(d: &DelayedGame) -> Vec<Diagnostic> {
    let a = &d.automaton;
    let mut out = check_automaton(a);
    check_targets(&mut out, &d.targets, a.locations.len());
    for act in d.control.intersection(&d.uncontrollable) {
        out.push(Diagnostic::new(format!("action {act}"), "both control and uncontrollable"));
    }
    for act in d.control.iter().chain(&d.uncontrollable) {
        if act == "push" {
            out.push(Diagnostic::new(format!("action {act}"), "reserved action name"));
        }
    }
    for (i, e) in a.edges.iter().enumerate() {
        let problem = match &e.action {
            Action::Named(n) if !d.control.contains(n) && !d.uncontrollable.contains(n) => {
                Some(format!("action `{n}` is not declared"))
            }
            Action::Push { action, .. } if !d.control.contains(action) => {
                Some(format!("scheduled action `{action}` is not a control action"))
            }
            Action::Push { delay, .. } if !d.delays.contains(delay) => {
                Some(format!("delay {delay} is not in the delay set"))
            }
            _ => None,
        };
        if let Some(p) = problem {
            out.push(Diagnostic::new(edge_subject(a, i), p));
        }
    }
    out
}
