//! Concrete transition systems of timed automata and delayed games.

mod delayed;
mod random;
mod run;
mod simulate;
mod trace;

use std::fmt;

use num_traits::Zero;

use crate::constraint::Valuation;
use crate::model::{Automaton, Edge, TimedGame};
use crate::rational::Rational;

pub use delayed::{
    d_discrete_step, d_schedule_step, d_step, d_successors, d_time_step, initial_state, max_delay, DState, DStep,
    MaxDelay, Pending,
};
pub use random::random_run;
pub use run::{
    d_is_maximal, evaluate_delayed_run, evaluate_ta_run, replay_delayed, replay_ta, ta_is_maximal,
    validate_delayed_run, validate_ta_run, DRun, Objective, TaRun, Verdict,
};
pub use simulate::{
    simulate, AlwaysWait, Decision, DelayedStrategy, EndReason, EnvMove, EnvView, Environment, RandomEnv, ScriptItem,
    ScriptedEnv, SimOutcome, TaStrategy,
};
pub use trace::{Trace, TraceStep};

/// Why a step is not possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refusal {
    OvershootsSchedule,
    ViolatesInvariant,
    GuardFails,
    TargetInvariantFails,
    WrongHead,
    HeadNotDue,
    CapFull,
    BadPosition,
    WrongSource,
    WrongKind,
    NoSuchEdge,
    NegativeDelay,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Refusal::OvershootsSchedule => "overshoots-schedule",
            Refusal::ViolatesInvariant => "violates-invariant",
            Refusal::GuardFails => "guard-fails",
            Refusal::TargetInvariantFails => "target-invariant-fails",
            Refusal::WrongHead => "wrong-head",
            Refusal::HeadNotDue => "head-not-due",
            Refusal::CapFull => "cap-full",
            Refusal::BadPosition => "bad-position",
            Refusal::WrongSource => "wrong-source",
            Refusal::WrongKind => "wrong-kind",
            Refusal::NoSuchEdge => "no-such-edge",
            Refusal::NegativeDelay => "negative-delay",
        };
        f.write_str(s)
    }
}

/// `(ℓ, v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaState {
    pub location: usize,
    pub valuation: Valuation,
}

impl TaState {
    pub fn initial(a: &Automaton) -> TaState {
        TaState { location: a.initial, valuation: vec![Rational::zero(); a.clock_count()] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TaStep {
    Delay(Rational),
    Edge(usize),
}

pub(crate) fn shifted(v: &[Rational], delta: &Rational) -> Valuation {
    v.iter().map(|x| x + delta).collect()
}

pub(crate) fn reset(v: &[Rational], edge: &Edge) -> Valuation {
    let mut out = v.to_vec();
    for c in &edge.resets {
        out[c.0] = Rational::zero();
    }
    out
}

/// Rectangular invariants are convex, so checking both ends of the delay suffices.
pub(crate) fn delay_allowed(a: &Automaton, loc: usize, v: &[Rational], delta: &Rational) -> bool {
    let inv = &a.locations[loc].invariant;
    inv.holds(v) && inv.holds(&shifted(v, delta))
}

/// Fires `edge` from `(loc, v)` if its guard and the target invariant allow it.
pub(crate) fn fire(a: &Automaton, loc: usize, v: &[Rational], edge: usize) -> Result<(usize, Valuation), Refusal> {
    let e = a.edges.get(edge).ok_or(Refusal::NoSuchEdge)?;
    if e.source != loc {
        return Err(Refusal::WrongSource);
    }
    if !e.guard.holds(v) {
        return Err(Refusal::GuardFails);
    }
    let w = reset(v, e);
    if !a.locations[e.target].invariant.holds(&w) {
        return Err(Refusal::TargetInvariantFails);
    }
    Ok((e.target, w))
}

pub fn ta_step(a: &Automaton, s: &TaState, step: &TaStep) -> Result<TaState, Refusal> {
    match step {
        TaStep::Delay(d) => {
            if *d < Rational::zero() {
                return Err(Refusal::NegativeDelay);
            }
            if !delay_allowed(a, s.location, &s.valuation, d) {
                return Err(Refusal::ViolatesInvariant);
            }
            Ok(TaState { location: s.location, valuation: shifted(&s.valuation, d) })
        }
        TaStep::Edge(e) => {
            let (location, valuation) = fire(a, s.location, &s.valuation, *e)?;
            Ok(TaState { location, valuation })
        }
    }
}

/// The time step by `delta` if allowed, followed by all enabled discrete steps.
pub fn ta_successors(g: &TimedGame, s: &TaState, delta: Option<&Rational>) -> Vec<(TaStep, TaState)> {
    let a = &g.automaton;
    let mut out = Vec::new();
    if let Some(d) = delta {
        let step = TaStep::Delay(d.clone());
        if let Ok(t) = ta_step(a, s, &step) {
            out.push((step, t));
        }
    }
    for (i, _) in a.outgoing(s.location) {
        let step = TaStep::Edge(i);
        if let Ok(t) = ta_step(a, s, &step) {
            out.push((step, t));
        }
    }
    out
}

/// Supremum of allowed delays from `(loc, v)` under the invariant alone.
pub(crate) fn invariant_limit(a: &Automaton, loc: usize, v: &[Rational]) -> MaxDelay {
    let inv = a.invariant_zone(loc);
    match inv.delay_window(v) {
        None => MaxDelay { bound: Some(Rational::zero()), attained: false },
        Some(w) if !w.contains(&Rational::zero()) => MaxDelay { bound: Some(Rational::zero()), attained: false },
        Some(w) => match w.hi {
            None => MaxDelay { bound: None, attained: true },
            Some((h, strict)) => MaxDelay { bound: Some(h), attained: !strict },
        },
    }
}
