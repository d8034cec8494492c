//! Schedule-size bound from the simple cycles of the location graph.

use std::collections::BTreeSet;

use crate::constraint::Rel;
use crate::model::{Action, Automaton, DelayedGame};

/// `Tmin`, `Smax`, `Dmax` and the resulting bound; `None` is infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundAnalysis {
    pub tmin: Option<i64>,
    pub smax: usize,
    pub dmax: u32,
    pub bound: Option<usize>,
    pub cycles: usize,
}

/// All simple cycles as edge-index sequences; parallel edges give distinct cycles.
pub fn simple_cycles(a: &Automaton) -> Vec<Vec<usize>> {
    let n = a.locations.len();
    let mut out = Vec::new();
    for start in 0..n {
        // Johnson: cycles whose least vertex is `start`, in the subgraph of vertices >= start
        let mut blocked = vec![false; n];
        let mut blocked_by: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let mut path = Vec::new();
        circuit(a, start, start, &mut blocked, &mut blocked_by, &mut path, &mut out);
    }
    out
}

fn unblock(u: usize, blocked: &mut [bool], blocked_by: &mut [BTreeSet<usize>]) {
    blocked[u] = false;
    let waiting = std::mem::take(&mut blocked_by[u]);
    for w in waiting {
        if blocked[w] {
            unblock(w, blocked, blocked_by);
        }
    }
}

fn circuit(
    a: &Automaton,
    v: usize,
    start: usize,
    blocked: &mut Vec<bool>,
    blocked_by: &mut Vec<BTreeSet<usize>>,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) -> bool {
    let mut found = false;
    blocked[v] = true;
    let succ: Vec<(usize, usize)> =
        a.outgoing(v).filter(|(_, e)| e.target >= start).map(|(i, e)| (i, e.target)).collect();
    for &(i, w) in &succ {
        path.push(i);
        if w == start {
            out.push(path.clone());
            found = true;
        } else if !blocked[w] && circuit(a, w, start, blocked, blocked_by, path, out) {
            found = true;
        }
        path.pop();
    }
    if found {
        unblock(v, blocked, blocked_by);
    } else {
        for &(_, w) in &succ {
            blocked_by[w].insert(v);
        }
    }
    found
}

/// Largest `T'` such that some clock reset on the cycle is guarded by `x ≥ T'`
/// (or `>`, `==`) on the same cycle.
fn cycle_time(a: &Automaton, cycle: &[usize]) -> Option<i64> {
    let reset: BTreeSet<usize> = cycle.iter().flat_map(|&e| a.edges[e].resets.iter().map(|c| c.0)).collect();
    cycle
        .iter()
        .flat_map(|&e| a.edges[e].guard.0.iter())
        .filter(|atom| atom.other.is_none() && reset.contains(&atom.clock.0))
        .filter(|atom| matches!(atom.rel, Rel::Ge | Rel::Gt | Rel::Eq))
        .map(|atom| atom.constant)
        .max()
}

pub fn compute_schedule_bound(d: &DelayedGame) -> BoundAnalysis {
    let a = &d.automaton;
    let dmax = a
        .edges
        .iter()
        .filter_map(|e| match &e.action {
            Action::Push { delay, .. } => Some(*delay),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let cycles = simple_cycles(a);
    let mut tmin: Option<i64> = None;
    let mut qualifies = true;
    let mut smax = 0;
    let mut counted = 0;
    for c in &cycles {
        let pushes = c.iter().filter(|&&e| a.edges[e].action.is_push()).count();
        // cycles without scheduling cannot grow the schedule
        if pushes == 0 {
            continue;
        }
        counted += 1;
        smax = smax.max(pushes);
        match cycle_time(a, c) {
            Some(t) => tmin = Some(tmin.map_or(t, |m| m.min(t))),
            None => qualifies = false,
        }
    }
    let tmin = if qualifies { tmin } else { None };
    let bound = if smax == 0 {
        Some(0)
    } else {
        match tmin {
            Some(t) if t > 0 => {
                let t = t as u64;
                Some(((u64::from(dmax)).div_ceil(t) as usize + 1) * smax)
            }
            _ => None,
        }
    };
    BoundAnalysis { tmin, smax, dmax, bound, cycles: counted }
}
