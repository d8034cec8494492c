use num_traits::Zero;

use super::{delay_allowed, fire, invariant_limit, shifted, Refusal};
use crate::constraint::Valuation;
use crate::model::{Action, DelayedGame};
use crate::rational::{int, Rational};

/// A scheduled control action.
///
/// `delay` is the delay it was scheduled with and `slot` the least slot free
/// at scheduling time; both mirror the bookkeeping of the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pending {
    pub action: String,
    pub remaining: Rational,
    pub delay: u32,
    pub slot: usize,
}

/// `(ℓ, v, σ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DState {
    pub location: usize,
    pub valuation: Valuation,
    pub schedule: Vec<Pending>,
}

impl DState {
    pub fn head_due(&self) -> bool {
        self.schedule.first().is_some_and(|p| p.remaining.is_zero())
    }

    fn free_slot(&self) -> usize {
        (0..).find(|i| self.schedule.iter().all(|p| p.slot != *i)).unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DStep {
    Delay(Rational),
    Uncontrolled(usize),
    Execute(usize),
    Schedule { edge: usize, position: usize },
}

impl DStep {
    pub fn edge(&self) -> Option<usize> {
        match self {
            DStep::Delay(_) => None,
            DStep::Uncontrolled(e) | DStep::Execute(e) | DStep::Schedule { edge: e, .. } => Some(*e),
        }
    }
}

/// Supremum of admissible delays; `bound = None` is unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxDelay {
    pub bound: Option<Rational>,
    pub attained: bool,
}

impl MaxDelay {
    pub fn admits(&self, delta: &Rational) -> bool {
        match &self.bound {
            None => true,
            Some(b) => delta < b || (delta == b && self.attained),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bound.as_ref().is_some_and(Zero::is_zero)
    }
}

pub fn initial_state(d: &DelayedGame) -> DState {
    let a = &d.automaton;
    DState { location: a.initial, valuation: vec![Rational::zero(); a.clock_count()], schedule: Vec::new() }
}

pub fn d_time_step(d: &DelayedGame, s: &DState, delta: &Rational) -> Result<DState, Refusal> {
    if *delta < Rational::zero() {
        return Err(Refusal::NegativeDelay);
    }
    if s.schedule.first().is_some_and(|p| *delta > p.remaining) {
        return Err(Refusal::OvershootsSchedule);
    }
    if !delay_allowed(&d.automaton, s.location, &s.valuation, delta) {
        return Err(Refusal::ViolatesInvariant);
    }
    let schedule = s.schedule.iter().map(|p| Pending { remaining: &p.remaining - delta, ..p.clone() }).collect();
    Ok(DState { location: s.location, valuation: shifted(&s.valuation, delta), schedule })
}

/// An uncontrolled edge, or the execution of the due schedule head.
pub fn d_discrete_step(d: &DelayedGame, s: &DState, edge: usize) -> Result<DState, Refusal> {
    let a = &d.automaton;
    let e = a.edges.get(edge).ok_or(Refusal::NoSuchEdge)?;
    if e.source != s.location {
        return Err(Refusal::WrongSource);
    }
    let Action::Named(name) = &e.action else {
        return Err(Refusal::WrongKind);
    };
    let mut schedule = s.schedule.clone();
    if d.control.contains(name) {
        match schedule.first() {
            Some(p) if p.action == *name => {
                if !p.remaining.is_zero() {
                    return Err(Refusal::HeadNotDue);
                }
            }
            _ => return Err(Refusal::WrongHead),
        }
        schedule.remove(0);
    } else if !d.uncontrollable.contains(name) {
        return Err(Refusal::WrongKind);
    }
    let (location, valuation) = fire(a, s.location, &s.valuation, edge)?;
    Ok(DState { location, valuation, schedule })
}

/// A `push(a, t)` edge inserting `(a, t)` at `position`.
pub fn d_schedule_step(d: &DelayedGame, s: &DState, edge: usize, position: usize) -> Result<DState, Refusal> {
    let a = &d.automaton;
    let e = a.edges.get(edge).ok_or(Refusal::NoSuchEdge)?;
    if e.source != s.location {
        return Err(Refusal::WrongSource);
    }
    let Action::Push { action, delay } = &e.action else {
        return Err(Refusal::WrongKind);
    };
    if d.cap.is_some_and(|c| s.schedule.len() >= c) {
        return Err(Refusal::CapFull);
    }
    let (location, valuation) = fire(a, s.location, &s.valuation, edge)?;
    let t = int(i64::from(*delay));
    let k = s.schedule.len();
    let fits = position <= k
        && (position == 0 || s.schedule[position - 1].remaining <= t)
        && (position == k || t <= s.schedule[position].remaining);
    if !fits {
        return Err(Refusal::BadPosition);
    }
    let mut schedule = s.schedule.clone();
    let slot = s.free_slot();
    schedule.insert(position, Pending { action: action.clone(), remaining: t, delay: *delay, slot });
    Ok(DState { location, valuation, schedule })
}

pub fn d_step(d: &DelayedGame, s: &DState, step: &DStep) -> Result<DState, Refusal> {
    let named = |e: usize, control: bool| match d.automaton.edges.get(e).map(|e| &e.action) {
        None => Err(Refusal::NoSuchEdge),
        Some(Action::Named(n)) if d.control.contains(n) == control => Ok(()),
        Some(_) => Err(Refusal::WrongKind),
    };
    match step {
        DStep::Delay(delta) => d_time_step(d, s, delta),
        DStep::Uncontrolled(e) => {
            named(*e, false)?;
            d_discrete_step(d, s, *e)
        }
        DStep::Execute(e) => {
            named(*e, true)?;
            d_discrete_step(d, s, *e)
        }
        DStep::Schedule { edge, position } => d_schedule_step(d, s, *edge, *position),
    }
}

pub fn max_delay(d: &DelayedGame, s: &DState) -> MaxDelay {
    let mut m = invariant_limit(&d.automaton, s.location, &s.valuation);
    if let Some(head) = s.schedule.first() {
        let tighter = match &m.bound {
            None => true,
            Some(b) => head.remaining < *b,
        };
        if tighter {
            m = MaxDelay { bound: Some(head.remaining.clone()), attained: true };
        }
    }
    m
}

/// All enabled discrete steps, one per insertion position, and the delay bound.
pub fn d_successors(d: &DelayedGame, s: &DState) -> (Vec<(DStep, DState)>, MaxDelay) {
    let mut out = Vec::new();
    for (i, e) in d.automaton.outgoing(s.location) {
        match &e.action {
            Action::Named(n) => {
                let step = if d.control.contains(n) { DStep::Execute(i) } else { DStep::Uncontrolled(i) };
                if let Ok(t) = d_discrete_step(d, s, i) {
                    out.push((step, t));
                }
            }
            Action::Push { .. } => {
                for position in 0..=s.schedule.len() {
                    if let Ok(t) = d_schedule_step(d, s, i, position) {
                        out.push((DStep::Schedule { edge: i, position }, t));
                    }
                }
            }
        }
    }
    (out, max_delay(d, s))
}
