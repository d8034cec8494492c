use super::{d_step, d_successors, ta_step, DState, DStep, Refusal, TaState, TaStep};
use crate::model::{Automaton, DelayedGame, TimedGame};

/// A finite run: a start state and the labels of its steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaRun {
    pub start: TaState,
    pub steps: Vec<TaStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DRun {
    pub start: DState,
    pub steps: Vec<DStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Reach,
    Safe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    NotYet,
    ViolatedMaximal,
    SafeSoFar,
    /// Index into the visited states (0 is the start state).
    Violated(usize),
}

/// Visited states, start included; fails with the first refused step.
pub fn replay_ta(a: &Automaton, run: &TaRun) -> Result<Vec<TaState>, (usize, Refusal)> {
    let mut states = vec![run.start.clone()];
    for (i, step) in run.steps.iter().enumerate() {
        let next = ta_step(a, states.last().unwrap(), step).map_err(|r| (i, r))?;
        states.push(next);
    }
    Ok(states)
}

pub fn replay_delayed(d: &DelayedGame, run: &DRun) -> Result<Vec<DState>, (usize, Refusal)> {
    let mut states = vec![run.start.clone()];
    for (i, step) in run.steps.iter().enumerate() {
        let next = d_step(d, states.last().unwrap(), step).map_err(|r| (i, r))?;
        states.push(next);
    }
    Ok(states)
}

/// `Ok(())` or the index of the first invalid step.
pub fn validate_ta_run(a: &Automaton, run: &TaRun) -> Result<(), usize> {
    replay_ta(a, run).map(|_| ()).map_err(|(i, _)| i)
}

pub fn validate_delayed_run(d: &DelayedGame, run: &DRun) -> Result<(), usize> {
    replay_delayed(d, run).map(|_| ()).map_err(|(i, _)| i)
}

fn verdict(locations: &[usize], is_target: impl Fn(usize) -> bool, maximal: bool, obj: Objective) -> Verdict {
    match obj {
        Objective::Reach => {
            if locations.iter().any(|&l| is_target(l)) {
                Verdict::Satisfied
            } else if maximal {
                Verdict::ViolatedMaximal
            } else {
                Verdict::NotYet
            }
        }
        Objective::Safe => match locations.iter().position(|&l| !is_target(l)) {
            Some(i) => Verdict::Violated(i),
            None => Verdict::SafeSoFar,
        },
    }
}

pub fn ta_is_maximal(g: &TimedGame, s: &TaState) -> bool {
    super::ta_successors(g, s, None).is_empty()
        && super::invariant_limit(&g.automaton, s.location, &s.valuation).is_zero()
}

pub fn d_is_maximal(d: &DelayedGame, s: &DState) -> bool {
    let (steps, max) = d_successors(d, s);
    steps.is_empty() && max.is_zero()
}

pub fn evaluate_ta_run(g: &TimedGame, run: &TaRun, obj: Objective) -> Result<Verdict, (usize, Refusal)> {
    let states = replay_ta(&g.automaton, run)?;
    let locs: Vec<usize> = states.iter().map(|s| s.location).collect();
    let maximal = ta_is_maximal(g, states.last().unwrap());
    Ok(verdict(&locs, |l| g.is_target(l), maximal, obj))
}

pub fn evaluate_delayed_run(d: &DelayedGame, run: &DRun, obj: Objective) -> Result<Verdict, (usize, Refusal)> {
    let states = replay_delayed(d, run)?;
    let locs: Vec<usize> = states.iter().map(|s| s.location).collect();
    let maximal = d_is_maximal(d, states.last().unwrap());
    Ok(verdict(&locs, |l| d.is_target(l), maximal, obj))
}
