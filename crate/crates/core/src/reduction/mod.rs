//! Bounded schedules encoded in locations: a delayed game with a schedule cap
//! becomes a classical timed game over `L × S` with `cap` fresh clocks.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::constraint::{Atom, ClockId, Constraint, Rel};
use crate::error::{Error, Result};
use crate::model::{fresh_name, is_deadlock_free, Action, Automaton, DelayedGame, Edge, Location, TimedGame};
use crate::rational::{int, Rational};
use crate::semantics::{DRun, DState, DStep, Decision, DelayedStrategy, Pending, TaRun, TaState, TaStep, TaStrategy};


/// `(cl, ac, dl)` over the common domain `0..len`; `cl` holds fresh-clock indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SEntry {
    pub cl: Vec<usize>,
    pub ac: Vec<String>,
    pub dl: Vec<u32>,
}

impl SEntry {
    pub fn empty() -> SEntry {
        SEntry { cl: Vec::new(), ac: Vec::new(), dl: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cl.is_empty()
    }

    pub fn is_valid(&self, cap: usize) -> bool {
        let k = self.cl.len();
        let distinct: BTreeSet<_> = self.cl.iter().collect();
        k <= cap && self.ac.len() == k && self.dl.len() == k && distinct.len() == k && self.cl.iter().all(|&c| c < cap)
    }

    /// `x*`: the least fresh clock not in use.
    pub fn free_clock(&self) -> usize {
        (0..).find(|i| !self.cl.contains(i)).unwrap()
    }

    pub fn shift_left(&self) -> SEntry {
        SEntry { cl: self.cl[1..].to_vec(), ac: self.ac[1..].to_vec(), dl: self.dl[1..].to_vec() }
    }

    pub fn insert(&self, at: usize, clock: usize, action: &str, delay: u32) -> SEntry {
        let mut e = self.clone();
        e.cl.insert(at, clock);
        e.ac.insert(at, action.to_string());
        e.dl.insert(at, delay);
        e
    }

    pub fn from_schedule(schedule: &[Pending]) -> SEntry {
        SEntry {
            cl: schedule.iter().map(|p| p.slot).collect(),
            ac: schedule.iter().map(|p| p.action.clone()).collect(),
            dl: schedule.iter().map(|p| p.delay).collect(),
        }
    }
}

/// All entries for the given cap, actions and delays, shortest first.
pub fn enumerate_s(cap: usize, actions: &[String], delays: &[u32]) -> Vec<SEntry> {
    fn extend(cap: usize, k: usize, actions: &[String], delays: &[u32], cur: &mut SEntry, out: &mut Vec<SEntry>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in 0..cap {
            if cur.cl.contains(&c) {
                continue;
            }
            for a in actions {
                for &t in delays {
                    cur.cl.push(c);
                    cur.ac.push(a.clone());
                    cur.dl.push(t);
                    extend(cap, k, actions, delays, cur, out);
                    cur.cl.pop();
                    cur.ac.pop();
                    cur.dl.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    for k in 0..=cap {
        extend(cap, k, actions, delays, &mut SEntry::empty(), &mut out);
    }
    out
}

/// `Σ_k cap!/(cap−k)! · |A|^k · |T|^k`.
pub fn s_count(cap: usize, actions: usize, delays: usize) -> u128 {
    let mut total = 0u128;
    let mut term = 1u128;
    for k in 0..=cap {
        total += term;
        term = term * (cap - k) as u128 * actions as u128 * delays as u128;
    }
    total
}

/// `log2` of the coarse bound `2^{cap(log(cap+1)+log(|A|+1)+log(|T|+1))}`.
pub fn s_bound_log2(cap: usize, actions: usize, delays: usize) -> f64 {
    let l = |n: usize| ((n + 1) as f64).log2();
    cap as f64 * (l(cap) + l(actions) + l(delays))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedLocation {
    pub base: usize,
    pub entry: SEntry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "position")]
pub enum OriginKind {
    Uncontrolled,
    Execute,
    Insert(usize),
}

/// The base edge a reduced edge comes from, and how.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeOrigin {
    pub base_edge: usize,
    #[serde(flatten)]
    pub kind: OriginKind,
}

/// The reduced game with its decomposition.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub game: TimedGame,
    pub cap: usize,
    pub base_clocks: usize,
    pub locations: Vec<ReducedLocation>,
    pub origins: Vec<EdgeOrigin>,
    index: HashMap<ReducedLocation, usize>,
    edge_index: HashMap<(usize, EdgeOrigin), usize>,
}

type Candidate = (EdgeOrigin, Constraint, Action, Vec<ClockId>, ReducedLocation);

fn fresh(n: usize, i: usize) -> ClockId {
    ClockId(n + i)
}

fn reduced_edges(d: &DelayedGame, cap: usize, loc: &ReducedLocation) -> Vec<Candidate> {
    let a = &d.automaton;
    let n = a.clock_count();
    let s = &loc.entry;
    let k = s.len();
    let mut out = Vec::new();
    for (ei, e) in a.outgoing(loc.base) {
        match &e.action {
            Action::Named(name) if d.control.contains(name) => {
                if k == 0 || s.ac[0] != *name {
                    continue;
                }
                let guard = e.guard.clone().and(Atom::new(fresh(n, s.cl[0]), Rel::Eq, i64::from(s.dl[0])));
                let target = ReducedLocation { base: e.target, entry: s.shift_left() };
                let origin = EdgeOrigin { base_edge: ei, kind: OriginKind::Execute };
                out.push((origin, guard, e.action.clone(), e.resets.clone(), target));
            }
            Action::Named(_) => {
                let target = ReducedLocation { base: e.target, entry: s.clone() };
                let origin = EdgeOrigin { base_edge: ei, kind: OriginKind::Uncontrolled };
                out.push((origin, e.guard.clone(), e.action.clone(), e.resets.clone(), target));
            }
            Action::Push { action, delay } => {
                if k >= cap {
                    continue;
                }
                let t = i64::from(*delay);
                let x = s.free_clock();
                let mut resets = e.resets.clone();
                if !resets.contains(&fresh(n, x)) {
                    resets.push(fresh(n, x));
                }
                for at in 0..=k {
                    let mut guard = e.guard.clone();
                    if at > 0 {
                        let c = i64::from(s.dl[at - 1]) - t;
                        if c > 0 {
                            guard = guard.and(Atom::new(fresh(n, s.cl[at - 1]), Rel::Ge, c));
                        }
                    }
                    if at < k {
                        let c = i64::from(s.dl[at]) - t;
                        if c < 0 {
                            continue;
                        }
                        guard = guard.and(Atom::new(fresh(n, s.cl[at]), Rel::Le, c));
                    }
                    let target = ReducedLocation { base: e.target, entry: s.insert(at, x, action, *delay) };
                    let origin = EdgeOrigin { base_edge: ei, kind: OriginKind::Insert(at) };
                    out.push((origin, guard, e.action.clone(), resets.clone(), target));
                }
            }
        }
    }
    out
}

fn location_name(d: &DelayedGame, clocks: &[String], loc: &ReducedLocation) -> String {
    let n = d.automaton.clock_count();
    let s = &loc.entry;
    let items: Vec<String> = (0..s.len()).map(|i| format!("{}@{}:{}", s.ac[i], s.dl[i], clocks[n + s.cl[i]])).collect();
    format!("{}|[{}]", d.automaton.locations[loc.base].name, items.join(","))
}

/// Reduces `d` under schedule cap `cap`; `full` builds all of `L × S`
/// instead of the part reachable from `(ℓ0, ∅)`.
pub fn reduce(d: &DelayedGame, cap: usize, full: bool) -> Result<Reduction> {
    if let Err(w) = is_deadlock_free(d) {
        return Err(Error::InvalidModel(format!(
            "not deadlock-free: location {} has no enabled {} edge everywhere",
            d.automaton.locations[w.location].name, w.action
        )));
    }
    let a = &d.automaton;
    let n = a.clock_count();
    let mut clocks = a.clocks.clone();
    for i in 0..cap {
        let name = fresh_name(&format!("fx{i}"), |c| clocks.iter().any(|x| x == c));
        clocks.push(name);
    }

    let mut locations: Vec<ReducedLocation> = Vec::new();
    let mut index: HashMap<ReducedLocation, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |l: ReducedLocation, locations: &mut Vec<ReducedLocation>, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = index.get(&l) {
            return i;
        }
        let i = locations.len();
        index.insert(l.clone(), i);
        locations.push(l);
        queue.push_back(i);
        i
    };
    let initial = intern(ReducedLocation { base: a.initial, entry: SEntry::empty() }, &mut locations, &mut queue);
    if full {
        let actions: Vec<String> = d.control.iter().cloned().collect();
        let delays: Vec<u32> = d.delays.iter().copied().collect();
        let entries = enumerate_s(cap, &actions, &delays);
        for base in 0..a.locations.len() {
            for entry in &entries {
                intern(ReducedLocation { base, entry: entry.clone() }, &mut locations, &mut queue);
            }
        }
    }

    let mut edges = Vec::new();
    let mut origins = Vec::new();
    let mut edge_index = HashMap::new();
    while let Some(i) = queue.pop_front() {
        let here = locations[i].clone();
        for (origin, guard, action, resets, target) in reduced_edges(d, cap, &here) {
            let t = intern(target, &mut locations, &mut queue);
            edge_index.insert((i, origin), edges.len());
            origins.push(origin);
            edges.push(Edge { source: i, guard, action, resets, target: t });
        }
    }

    let reduced_locations = locations
        .iter()
        .map(|l| {
            let mut inv = a.locations[l.base].invariant.clone();
            for j in 0..l.entry.len() {
                inv = inv.and(Atom::new(fresh(n, l.entry.cl[j]), Rel::Le, i64::from(l.entry.dl[j])));
            }
            Location { name: location_name(d, &clocks, l), invariant: inv }
        })
        .collect();
    let automaton = Automaton { clocks, locations: reduced_locations, initial, edges };
    let game = TimedGame {
        automaton,
        controllable: d.scheduling_actions().into_iter().collect(),
        uncontrollable: d.control.iter().chain(&d.uncontrollable).map(|a| Action::named(a)).collect(),
        targets: (0..locations.len()).filter(|&i| d.is_target(locations[i].base)).collect(),
    };
    Ok(Reduction { game, cap, base_clocks: n, locations, origins, index, edge_index })
}

impl Reduction {
    pub fn location_of(&self, base: usize, entry: &SEntry) -> Option<usize> {
        self.index.get(&ReducedLocation { base, entry: entry.clone() }).copied()
    }

    /// The reduced edge with this origin leaving `source`.
    pub fn edge_of(&self, source: usize, origin: EdgeOrigin) -> Option<usize> {
        self.edge_index.get(&(source, origin)).copied()
    }

    /// Fresh clocks of used slots hold `dl(i) − remaining(i)`; unused ones hold 0.
    pub fn state_forward(&self, s: &DState) -> Result<TaState> {
        if s.schedule.len() > self.cap || s.schedule.iter().any(|p| p.slot >= self.cap) {
            return Err(Error::CapExceeded(self.cap));
        }
        let entry = SEntry::from_schedule(&s.schedule);
        let location = self
            .location_of(s.location, &entry)
            .ok_or_else(|| Error::RunMapping("state outside the reduced game".into()))?;
        let mut valuation = s.valuation.clone();
        valuation.extend((0..self.cap).map(|j| {
            s.schedule
                .iter()
                .find(|p| p.slot == j)
                .map_or_else(Rational::zero, |p| int(i64::from(p.delay)) - &p.remaining)
        }));
        Ok(TaState { location, valuation })
    }

    pub fn state_back(&self, s: &TaState) -> Result<DState> {
        let l = self
            .locations
            .get(s.location)
            .ok_or_else(|| Error::RunMapping(format!("no reduced location {}", s.location)))?;
        let n = self.base_clocks;
        if s.valuation.len() != n + self.cap {
            return Err(Error::Dimension(s.valuation.len(), n + self.cap));
        }
        let e = &l.entry;
        let schedule = (0..e.len())
            .map(|i| Pending {
                action: e.ac[i].clone(),
                remaining: int(i64::from(e.dl[i])) - &s.valuation[n + e.cl[i]],
                delay: e.dl[i],
                slot: e.cl[i],
            })
            .collect();
        Ok(DState { location: l.base, valuation: s.valuation[..n].to_vec(), schedule })
    }

    pub fn map_run_forward(&self, run: &DRun) -> Result<TaRun> {
        let start = self.state_forward(&run.start)?;
        let mut at = start.location;
        let mut steps = Vec::with_capacity(run.steps.len());
        for (i, step) in run.steps.iter().enumerate() {
            let origin = match step {
                DStep::Delay(q) => {
                    steps.push(TaStep::Delay(q.clone()));
                    continue;
                }
                DStep::Uncontrolled(e) => EdgeOrigin { base_edge: *e, kind: OriginKind::Uncontrolled },
                DStep::Execute(e) => EdgeOrigin { base_edge: *e, kind: OriginKind::Execute },
                DStep::Schedule { edge, position } => {
                    EdgeOrigin { base_edge: *edge, kind: OriginKind::Insert(*position) }
                }
            };
            let e =
                self.edge_of(at, origin).ok_or_else(|| Error::RunMapping(format!("step {i} has no reduced edge")))?;
            at = self.game.automaton.edges[e].target;
            steps.push(TaStep::Edge(e));
        }
        Ok(TaRun { start, steps })
    }

    pub fn map_run_back(&self, run: &TaRun) -> Result<DRun> {
        let start = self.state_back(&run.start)?;
        let steps = run
            .steps
            .iter()
            .map(|step| match step {
                TaStep::Delay(q) => Ok(DStep::Delay(q.clone())),
                TaStep::Edge(e) => {
                    let o = self.origins.get(*e).ok_or_else(|| Error::RunMapping(format!("no reduced edge {e}")))?;
                    Ok(match o.kind {
                        OriginKind::Uncontrolled => DStep::Uncontrolled(o.base_edge),
                        OriginKind::Execute => DStep::Execute(o.base_edge),
                        OriginKind::Insert(position) => DStep::Schedule { edge: o.base_edge, position },
                    })
                }
            })
            .collect::<Result<_>>()?;
        Ok(DRun { start, steps })
    }

    pub fn sidecar(&self, d: &DelayedGame) -> Sidecar {
        let a = &self.game.automaton;
        let n = self.base_clocks;
        Sidecar {
            cap: self.cap,
            base_clocks: a.clocks[..n].to_vec(),
            fresh_clocks: a.clocks[n..].to_vec(),
            locations: self
                .locations
                .iter()
                .enumerate()
                .map(|(i, l)| SidecarLocation {
                    name: a.locations[i].name.clone(),
                    base: d.automaton.locations[l.base].name.clone(),
                    entry: (0..l.entry.len())
                        .map(|j| SidecarSlot {
                            action: l.entry.ac[j].clone(),
                            delay: l.entry.dl[j],
                            clock: a.clocks[n + l.entry.cl[j]].clone(),
                        })
                        .collect(),
                })
                .collect(),
            edges: self.origins.clone(),
        }
    }
}

/// Decomposition of a reduced game, written next to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub cap: usize,
    pub base_clocks: Vec<String>,
    pub fresh_clocks: Vec<String>,
    pub locations: Vec<SidecarLocation>,
    pub edges: Vec<EdgeOrigin>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarLocation {
    pub name: String,
    pub base: String,
    pub entry: Vec<SidecarSlot>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarSlot {
    pub action: String,
    pub delay: u32,
    pub clock: String,
}

/// A reduced-game strategy played in the delayed game.
pub struct MappedStrategy<'a> {
    pub reduction: &'a Reduction,
    pub inner: &'a dyn TaStrategy,
}

impl DelayedStrategy for MappedStrategy<'_> {
    fn decide(&self, s: &DState) -> Decision {
        match self.reduction.state_forward(s) {
            Ok(t) => self.inner.decide(&t),
            Err(_) => Decision::Wait,
        }
    }

    fn breakpoints(&self, s: &DState) -> Vec<Rational> {
        match self.reduction.state_forward(s) {
            Ok(t) => self.inner.breakpoints(&t),
            Err(_) => Vec::new(),
        }
    }
}
