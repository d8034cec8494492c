//! Brute-force solver on the grid of multiples of `1/granularity`.

use crate::constraint::{Constraint, Rel};
use crate::error::{Error, Result};
use crate::model::TimedGame;
use crate::semantics::Objective;

pub const ORACLE_MAX_CLOCKS: usize = 3;
pub const ORACLE_MAX_CONSTANT: i64 = 32;
const ORACLE_MAX_STATES: usize = 4_000_000;

struct Grid<'g> {
    g: &'g TimedGame,
    gran: i64,
    /// Values above `gran·M` are collapsed to `cap`.
    cap: i64,
    clocks: usize,
    per_loc: usize,
}

impl Grid<'_> {
    fn decode(&self, mut code: usize) -> Vec<i64> {
        let base = (self.cap + 1) as usize;
        let mut v = vec![0; self.clocks];
        for x in v.iter_mut() {
            *x = (code % base) as i64;
            code /= base;
        }
        v
    }

    fn encode(&self, loc: usize, v: &[i64]) -> usize {
        let base = (self.cap + 1) as usize;
        let mut code = 0;
        for x in v.iter().rev() {
            code = code * base + *x as usize;
        }
        loc * self.per_loc + code
    }

    fn holds(&self, c: &Constraint, v: &[i64]) -> bool {
        c.0.iter().all(|a| {
            let x = v[a.clock.0];
            let k = a.constant * self.gran;
            match a.rel {
                Rel::Le => x <= k,
                Rel::Ge => x >= k,
                Rel::Eq => x == k,
                Rel::Lt => x < k,
                Rel::Gt => x > k,
            }
        })
    }

    /// Successor of `edge` from `(loc, v)`, if enabled.
    fn fire(&self, edge: usize, v: &[i64]) -> Option<usize> {
        let a = &self.g.automaton;
        let e = &a.edges[edge];
        if !self.holds(&e.guard, v) {
            return None;
        }
        let mut w = v.to_vec();
        for c in &e.resets {
            w[c.0] = 0;
        }
        self.holds(&a.locations[e.target].invariant, &w).then(|| self.encode(e.target, &w))
    }

    fn delay(&self, loc: usize, v: &[i64]) -> Option<usize> {
        let w: Vec<i64> = v.iter().map(|x| (x + 1).min(self.cap)).collect();
        self.holds(&self.g.automaton.locations[loc].invariant, &w).then(|| self.encode(loc, &w))
    }
}

struct Moves {
    target: bool,
    uncontrolled: Vec<usize>,
    /// Successors per controllable action; an action counts if some edge is enabled.
    actions: Vec<Vec<usize>>,
    delay: Option<usize>,
}

fn check(g: &TimedGame, granularity: u32) -> Result<()> {
    let a = &g.automaton;
    let fail = |m: String| Err(Error::OraclePrecondition(m));
    if granularity == 0 {
        return fail("granularity must be positive".into());
    }
    if a.clock_count() > ORACLE_MAX_CLOCKS {
        return fail(format!("{} clocks, at most {ORACLE_MAX_CLOCKS} supported", a.clock_count()));
    }
    let constraints = a.locations.iter().map(|l| &l.invariant).chain(a.edges.iter().map(|e| &e.guard));
    for c in constraints {
        for atom in &c.0 {
            if matches!(atom.rel, Rel::Lt | Rel::Gt) {
                return fail("strict guard or invariant".into());
            }
            if atom.other.is_some() {
                return fail("diagonal constraint".into());
            }
            if atom.constant > ORACLE_MAX_CONSTANT {
                return fail(format!("constant {} above {ORACLE_MAX_CONSTANT}", atom.constant));
            }
        }
    }
    Ok(())
}

/// Whether the controller wins from the initial state on the grid.
pub fn oracle_solve(g: &TimedGame, granularity: u32, objective: Objective) -> Result<bool> {
    check(g, granularity)?;
    let a = &g.automaton;
    let gran = i64::from(granularity);
    let m = a.max_constants().into_iter().max().unwrap_or(0);
    let cap = gran * m + 1;
    let clocks = a.clock_count();
    let per_loc = ((cap + 1) as usize).pow(clocks as u32);
    let total = per_loc * a.locations.len();
    if total > ORACLE_MAX_STATES {
        return Err(Error::OraclePrecondition(format!("{total} grid states")));
    }
    let grid = Grid { g, gran, cap, clocks, per_loc };

    // None marks states outside the invariant.
    let moves: Vec<Option<Moves>> = (0..total)
        .map(|s| {
            let loc = s / per_loc;
            let v = grid.decode(s % per_loc);
            if !grid.holds(&a.locations[loc].invariant, &v) {
                return None;
            }
            let mut uncontrolled = Vec::new();
            let mut actions: Vec<(crate::model::Action, Vec<usize>)> = Vec::new();
            for (i, e) in a.outgoing(loc) {
                let Some(t) = grid.fire(i, &v) else { continue };
                if g.is_controllable(&e.action) {
                    match actions.iter_mut().find(|(x, _)| *x == e.action) {
                        Some((_, ts)) => ts.push(t),
                        None => actions.push((e.action.clone(), vec![t])),
                    }
                } else {
                    uncontrolled.push(t);
                }
            }
            Some(Moves {
                target: g.is_target(loc),
                uncontrolled,
                actions: actions.into_iter().map(|(_, t)| t).collect(),
                delay: grid.delay(loc, &v),
            })
        })
        .collect();

    let mut win = vec![false; total];
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..total {
            if win[s] {
                continue;
            }
            let Some(mv) = &moves[s] else { continue };
            let now = match objective {
                Objective::Reach => {
                    mv.target
                        || (mv.uncontrolled.iter().all(|&t| win[t])
                            && (mv.actions.iter().any(|ts| ts.iter().all(|&t| win[t]))
                                || mv.delay.is_some_and(|t| win[t])
                                || (mv.delay.is_none() && !mv.uncontrolled.is_empty())))
                }
                // `win` holds the environment's attractor to leaving the targets
                Objective::Safe => {
                    !mv.target
                        || mv.uncontrolled.iter().any(|&t| win[t])
                        || (mv.actions.iter().all(|ts| ts.iter().any(|&t| win[t])) && mv.delay.is_some_and(|t| win[t]))
                }
            };
            if now {
                win[s] = true;
                changed = true;
            }
        }
    }
    let init = grid.encode(a.initial, &vec![0; clocks]);
    if moves[init].is_none() {
        return Ok(false);
    }
    Ok(match objective {
        Objective::Reach => win[init],
        Objective::Safe => !win[init],
    })
}
