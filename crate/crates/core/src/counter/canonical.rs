use num_traits::{Signed, Zero};

use super::compile::{compile_2cm, CompiledMachine, LocKind};
use super::{cm_run, CmConfig, Instr, TwoCounterMachine};
use crate::error::{Error, Result};
use crate::model::Action;
use crate::rational::{int, Rational};
use crate::semantics::{d_step, initial_state, DRun, DState, DStep, Pending};

/// State of the simulation on entering a line location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstructionAudit {
    pub index: usize,
    pub line: usize,
    pub counters: [u64; 2],
    /// Reload gadgets passed since the previous line entry.
    pub reloads: usize,
    pub time: Rational,
}

#[derive(Clone, Debug)]
pub struct CanonicalReport {
    pub compiled: CompiledMachine,
    pub run: DRun,
    pub states: Vec<DState>,
    pub reached_target: bool,
    pub boundaries: Vec<InstructionAudit>,
    /// Discrete steps after which well-timedness was checked.
    pub timed_checks: usize,
    pub sink_visits: usize,
}

fn well_timed(s: &[Pending]) -> bool {
    s.first().is_none_or(|p| p.remaining.is_positive())
        && s.windows(2).all(|w| w[0].remaining < w[1].remaining)
        && s.last().is_none_or(|p| p.remaining <= int(1))
}

fn well_sorted(s: &[Pending]) -> bool {
    match s.split_last() {
        Some((last, rest)) => last.action == "#" && rest.iter().all(|p| p.action == "Z" || p.action == "O"),
        None => false,
    }
}

fn count(s: &[Pending], a: &str) -> u64 {
    s.iter().filter(|p| p.action == a).count() as u64
}

fn expected_reloads(m: &TwoCounterMachine, c: &CmConfig) -> usize {
    let n = (c.counters[0] + c.counters[1]) as usize;
    match m.instructions[c.line] {
        Instr::Inc(_) => n,
        Instr::Dec(i) if c.counters[usize::from(i)] > 0 => n,
        Instr::Dec(_) | Instr::IfZero { .. } => n + 1,
        Instr::Stop => 0,
    }
}

fn schedule_step(cm: &CompiledMachine, s: &DState, action: &Action) -> Result<DStep> {
    let d = &cm.game;
    for (i, e) in d.automaton.outgoing(s.location) {
        if e.action != *action {
            continue;
        }
        for position in (0..=s.schedule.len()).rev() {
            let step = DStep::Schedule { edge: i, position };
            if d_step(d, s, &step).is_ok() {
                return Ok(step);
            }
        }
    }
    Err(Error::Audit(format!("{action} not possible in {}", d.automaton.locations[s.location].name)))
}

/// Drives the compiled game with the canonical strategy for at most
/// `max_cm_steps` simulated instructions, auditing the schedule throughout.
pub fn canonical_simulate(m: &TwoCounterMachine, max_cm_steps: usize) -> Result<CanonicalReport> {
    let cm = compile_2cm(m)?;
    let d = &cm.game;
    let interp = cm_run(m, max_cm_steps);
    let start = initial_state(d);
    let mut run = DRun { start: start.clone(), steps: Vec::new() };
    let mut states = vec![start];
    let mut boundaries: Vec<InstructionAudit> = Vec::new();
    let mut reloads = 0;
    let mut time = Rational::zero();
    let mut timed_checks = 0;
    let mut reached_target = false;
    loop {
        let s = states.last().unwrap().clone();
        let head = s.schedule.first().map(|p| p.remaining.clone());
        let step = match &cm.kinds[s.location] {
            LocKind::Line(_) if d.is_target(s.location) => {
                reached_target = true;
                break;
            }
            LocKind::Sink => return Err(Error::Audit("the sink was reached".into())),
            LocKind::Init => schedule_step(&cm, &s, &Action::push("#", 1))?,
            LocKind::Reload(a) | LocKind::Push(a) => schedule_step(&cm, &s, &Action::push(a, 1))?,
            LocKind::Wait if s.valuation[0].is_zero() => {
                let h = head.ok_or_else(|| Error::Audit("empty schedule while waiting".into()))?;
                DStep::Delay(h / int(2))
            }
            LocKind::Wait => schedule_step(&cm, &s, &Action::push("#", 1))?,
            LocKind::Line(_) | LocKind::Middle => match head {
                None => return Err(Error::Audit("empty schedule".into())),
                Some(h) if h.is_zero() => {
                    let e = d
                        .automaton
                        .outgoing(s.location)
                        .map(|(i, _)| i)
                        .find(|&i| d_step(d, &s, &DStep::Execute(i)).is_ok())
                        .ok_or_else(|| Error::Audit("no executable edge".into()))?;
                    DStep::Execute(e)
                }
                Some(h) => DStep::Delay(h),
            },
        };
        if let (DStep::Schedule { .. }, LocKind::Reload(_)) = (&step, &cm.kinds[s.location]) {
            reloads += 1;
        }
        let next = d_step(d, &s, &step).map_err(|r| Error::Audit(format!("step refused: {r}")))?;
        if let DStep::Delay(q) = &step {
            time += q;
        } else {
            timed_checks += 1;
            if !well_timed(&next.schedule) {
                return Err(Error::Audit(format!("schedule not well-timed after step {}", run.steps.len())));
            }
        }
        if cm.kinds[next.location] == LocKind::Sink {
            return Err(Error::Audit("the sink was reached".into()));
        }
        let entered = match cm.kinds[next.location] {
            LocKind::Line(l)
                if matches!(&cm.kinds[s.location], LocKind::Init | LocKind::Wait)
                    || cm.kinds[s.location] == LocKind::Reload("#".into()) =>
            {
                Some(l)
            }
            _ => None,
        };
        run.steps.push(step);
        states.push(next.clone());
        if let Some(line) = entered {
            let index = boundaries.len();
            if !well_sorted(&next.schedule) {
                return Err(Error::Audit(format!("schedule not well-sorted entering line {line}")));
            }
            let counters = [count(&next.schedule, "Z"), count(&next.schedule, "O")];
            let expect = interp.trace.get(index).ok_or_else(|| Error::Audit("ahead of the interpreter".into()))?;
            if expect.line != line || expect.counters != counters {
                return Err(Error::Audit(format!(
                    "instruction {index}: at line {line} with {counters:?}, interpreter at line {} with {:?}",
                    expect.line, expect.counters
                )));
            }
            if index > 0 {
                let want = expected_reloads(m, &interp.trace[index - 1]);
                if reloads != want {
                    return Err(Error::Audit(format!("instruction {index}: {reloads} reloads, expected {want}")));
                }
            }
            boundaries.push(InstructionAudit { index, line, counters, reloads, time: time.clone() });
            reloads = 0;
            if index >= max_cm_steps && !d.is_target(next.location) {
                break;
            }
        }
    }
    Ok(CanonicalReport { compiled: cm, run, states, reached_target, boundaries, timed_checks, sink_visits: 0 })
}
