//! Backward fixed points for reachability and safety timed games.

mod oracle;
mod strategy;

#[cfg(test)]
mod tests;

use crate::constraint::Rel;
use crate::error::{Error, Result};
use crate::model::{Action, TimedGame};
use crate::semantics::{Objective, TaState};
use crate::zone::{Dbm, Federation};

pub use oracle::oracle_solve;
pub use strategy::{Rule, Strategy, StrategyFile, StrategyRule};

/// One federation per location, always inside the location invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    pub sets: Vec<Federation>,
}

impl StateSet {
    pub fn empty(locations: usize, clocks: usize) -> StateSet {
        StateSet { sets: vec![Federation::empty(clocks); locations] }
    }

    pub fn contains(&self, s: &TaState) -> bool {
        self.sets[s.location].contains(&s.valuation).unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().all(Federation::is_empty)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.sets.iter().zip(&other.sets).all(|(a, b)| a.is_subset(b).expect("same dimension"))
    }

    pub fn set_eq(&self, other: &StateSet) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    fn zip(&self, other: &StateSet, f: impl Fn(&Federation, &Federation) -> Federation) -> StateSet {
        StateSet { sets: self.sets.iter().zip(&other.sets).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.zip(other, Federation::union)
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a.intersect(b).expect("same dimension"))
    }

    pub fn subtract(&self, other: &StateSet) -> StateSet {
        self.zip(other, |a, b| a.subtract(b).expect("same dimension"))
    }
}

/// Per-location and per-edge zones of a game, computed once.
pub struct Arena<'g> {
    pub game: &'g TimedGame,
    clocks: usize,
    inv: Vec<Dbm>,
    guard: Vec<Dbm>,
    enabled: Vec<Dbm>,
    timelock: Vec<Federation>,
    uncontrolled_enabled: Vec<Federation>,
    /// Controllable actions per location, ordered by their lowest edge index.
    actions: Vec<Vec<(Action, Vec<usize>)>>,
    uncontrolled: Vec<Vec<usize>>,
}

impl<'g> Arena<'g> {
    pub fn new(game: &'g TimedGame) -> Arena<'g> {
        let a = &game.automaton;
        let n = a.clock_count();
        let inv: Vec<Dbm> = (0..a.locations.len()).map(|l| a.invariant_zone(l)).collect();
        let guard: Vec<Dbm> = (0..a.edges.len()).map(|e| a.guard_zone(e)).collect();
        let enabled: Vec<Dbm> = a
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let post = inv[e.target].reset_pred(&e.resets);
                guard[i].intersect(&inv[e.source]).and_then(|g| g.intersect(&post)).expect("same dimension")
            })
            .collect();
        let mut actions = vec![Vec::<(Action, Vec<usize>)>::new(); a.locations.len()];
        let mut uncontrolled = vec![Vec::new(); a.locations.len()];
        for (i, e) in a.edges.iter().enumerate() {
            if game.is_controllable(&e.action) {
                let list = &mut actions[e.source];
                match list.iter_mut().find(|(act, _)| *act == e.action) {
                    Some((_, edges)) => edges.push(i),
                    None => list.push((e.action.clone(), vec![i])),
                }
            } else {
                uncontrolled[e.source].push(i);
            }
        }
        let timelock = (0..a.locations.len())
            .map(|l| {
                let mut f = Federation::empty(n);
                for atom in &a.locations[l].invariant.0 {
                    if atom.other.is_none() && matches!(atom.rel, Rel::Le | Rel::Eq) {
                        let mut d = inv[l].clone();
                        d.constrain(0, atom.clock.0 + 1, crate::zone::Bound::le(-atom.constant));
                        f.add(d);
                    }
                }
                f
            })
            .collect();
        let uncontrolled_enabled =
            uncontrolled.iter().map(|es| Federation::from_zones(n, es.iter().map(|&e| enabled[e].clone()))).collect();
        Arena { game, clocks: n, inv, guard, enabled, timelock, uncontrolled_enabled, actions, uncontrolled }
    }

    fn locations(&self) -> usize {
        self.inv.len()
    }

    /// All invariant-satisfying states.
    pub fn all(&self) -> StateSet {
        StateSet { sets: self.inv.iter().map(|d| Federation::from_dbm(d.clone())).collect() }
    }

    /// `F̂`: target locations with their invariants.
    pub fn targets(&self) -> StateSet {
        let mut s = StateSet::empty(self.locations(), self.clocks);
        for &l in &self.game.targets {
            s.sets[l] = Federation::from_dbm(self.inv[l].clone());
        }
        s
    }

    pub fn complement(&self, x: &StateSet) -> StateSet {
        self.all().subtract(x)
    }

    fn pred_edge(&self, e: usize, x: &StateSet) -> Federation {
        let edge = &self.game.automaton.edges[e];
        let post = x.sets[edge.target].intersect_dbm(&self.inv[edge.target]).expect("same dimension");
        post.reset_pred(&edge.resets)
            .intersect_dbm(&self.guard[e])
            .and_then(|f| f.intersect_dbm(&self.inv[edge.source]))
            .expect("same dimension")
    }

    /// States where choosing `edges` (one action) surely leads into `x`.
    fn cpred_action(&self, edges: &[usize], x: &StateSet) -> Federation {
        let mut good = Federation::empty(self.clocks);
        let mut bad = Federation::empty(self.clocks);
        for &e in edges {
            let p = self.pred_edge(e, x);
            for piece in
                Federation::from_dbm(self.enabled[e].clone()).subtract(&p).expect("same dimension").into_zones()
            {
                bad.add(piece);
            }
            good.union_with(&p);
        }
        good.subtract(&bad).expect("same dimension")
    }

    /// Per controllable action.
    pub fn cpred_by_action(&self, x: &StateSet) -> Vec<Vec<(Action, Federation)>> {
        (0..self.locations())
            .map(|l| self.actions[l].iter().map(|(a, es)| (a.clone(), self.cpred_action(es, x))).collect())
            .collect()
    }

    pub fn cpred(&self, x: &StateSet) -> StateSet {
        let sets = self
            .cpred_by_action(x)
            .into_iter()
            .map(|per| {
                let mut f = Federation::empty(self.clocks);
                for (_, p) in per {
                    f.union_with(&p);
                }
                f
            })
            .collect();
        StateSet { sets }
    }

    pub fn upred(&self, x: &StateSet) -> StateSet {
        let sets = (0..self.locations())
            .map(|l| {
                let mut f = Federation::empty(self.clocks);
                for &e in &self.uncontrolled[l] {
                    f.union_with(&self.pred_edge(e, x));
                }
                f
            })
            .collect();
        StateSet { sets }
    }

    /// States that can delay into `x`, staying out of `y` up to and including the endpoint.
    pub fn timed_pred_safe(&self, x: &StateSet, y: &StateSet) -> StateSet {
        let sets = (0..self.locations())
            .map(|l| pred_t(&x.sets[l], &y.sets[l]).intersect_dbm(&self.inv[l]).expect("same dimension"))
            .collect();
        StateSet { sets }
    }

    /// Time-locked states where the environment must move and every move lands in `x`.
    fn forced(&self, escape: &StateSet) -> StateSet {
        let sets = (0..self.locations())
            .map(|l| {
                self.timelock[l]
                    .intersect(&self.uncontrolled_enabled[l])
                    .and_then(|f| f.subtract(&escape.sets[l]))
                    .expect("same dimension")
            })
            .collect();
        StateSet { sets }
    }

    pub fn reach_step(&self, x: &StateSet) -> StateSet {
        let escape = self.upred(&self.complement(x));
        let bad = escape.subtract(x);
        let goal = x.union(&self.cpred(x)).union(&self.forced(&escape));
        x.union(&self.timed_pred_safe(&goal, &bad))
    }

    fn safety_parts(&self, x: &StateSet) -> (StateSet, StateSet) {
        let outside = self.complement(x);
        let bad = outside.union(&self.upred(&outside));
        let stay = StateSet {
            sets: (0..self.locations())
                .map(|l| {
                    Federation::from_dbm(self.inv[l].clone()).subtract(&bad.sets[l].down()).expect("same dimension")
                })
                .collect(),
        };
        (bad, stay)
    }

    pub fn safety_step(&self, x: &StateSet) -> StateSet {
        let (bad, stay) = self.safety_parts(x);
        x.intersect(&self.timed_pred_safe(&self.cpred(x).union(&stay), &bad))
    }
}

fn pred_t_zone(g: &Dbm, b: &Dbm) -> Federation {
    let bd = b.down();
    let mut out = Federation::from_dbm(g.down()).subtract_dbm(&bd).expect("same dimension");
    let meet = g.intersect(&bd).expect("same dimension");
    out.union_with(&Federation::from_dbm(meet).subtract_dbm(b).expect("same dimension").down());
    out
}

/// `Pred_t(G, B)` as `∪_i ∩_j Pred_t(g_i, b_j)`.
fn pred_t(g: &Federation, b: &Federation) -> Federation {
    if b.is_empty() {
        return g.down();
    }
    let mut out = Federation::empty(g.clocks());
    for gi in g.zones() {
        let mut acc: Option<Federation> = None;
        for bj in b.zones() {
            let p = pred_t_zone(gi, bj);
            acc = Some(match acc {
                None => p,
                Some(a) => a.intersect(&p).expect("same dimension"),
            });
            if acc.as_ref().is_some_and(Federation::is_empty) {
                break;
            }
        }
        out.union_with(&acc.expect("nonempty B"));
    }
    out
}

/// The outcome of a solve.
#[derive(Clone, Debug)]
pub struct Solution {
    pub objective: Objective,
    pub winning: bool,
    pub winning_set: StateSet,
    /// `X_0 ⊆ X_1 ⊆ …` for reachability; the single fixed point for safety.
    pub layers: Vec<StateSet>,
    pub strategy: Strategy,
}

impl Solution {
    pub fn iterations(&self) -> usize {
        self.layers.len()
    }
}

pub fn solve(g: &TimedGame, objective: Objective) -> Result<Solution> {
    match objective {
        Objective::Reach => solve_reachability(g),
        Objective::Safe => solve_safety(g),
    }
}

fn initial_in(g: &TimedGame, w: &StateSet) -> bool {
    w.contains(&TaState::initial(&g.automaton))
}

pub fn solve_reachability(g: &TimedGame) -> Result<Solution> {
    let arena = Arena::new(g);
    let mut layers = vec![arena.targets()];
    loop {
        let x = layers.last().unwrap();
        let next = arena.reach_step(x);
        if next.is_subset(x) {
            break;
        }
        layers.push(next);
    }
    let winning_set = layers.last().unwrap().clone();
    let strategy = reach_strategy(&arena, &layers);
    Ok(Solution { objective: Objective::Reach, winning: initial_in(g, &winning_set), winning_set, layers, strategy })
}

pub fn solve_safety(g: &TimedGame) -> Result<Solution> {
    let arena = Arena::new(g);
    let mut x = arena.targets();
    loop {
        let next = arena.safety_step(&x);
        if x.is_subset(&next) {
            break;
        }
        x = next;
    }
    let strategy = safety_strategy(&arena, &x);
    Ok(Solution {
        objective: Objective::Safe,
        winning: initial_in(g, &x),
        winning_set: x.clone(),
        layers: vec![x],
        strategy,
    })
}

/// Fails unless one more operator application leaves `w` unchanged.
pub fn check_fixed_point(g: &TimedGame, objective: Objective, w: &StateSet) -> Result<()> {
    let arena = Arena::new(g);
    let next = match objective {
        Objective::Reach => arena.reach_step(w),
        Objective::Safe => arena.safety_step(w),
    };
    if next.set_eq(w) {
        Ok(())
    } else {
        Err(Error::NotFixedPoint(format!("{objective:?} operator changes the set")))
    }
}

fn push_rules(rules: &mut Vec<Rule>, location: usize, f: &Federation, decision: &Option<Action>) {
    for z in f.zones() {
        rules.push(Rule { location, zone: z.clone(), action: decision.clone() });
    }
}

fn reach_strategy(arena: &Arena<'_>, layers: &[StateSet]) -> Strategy {
    let mut rules = Vec::new();
    for i in 1..layers.len() {
        let fresh = layers[i].subtract(&layers[i - 1]);
        let cp = arena.cpred_by_action(&layers[i - 1]);
        for (l, per) in cp.iter().enumerate() {
            for (a, p) in per {
                let here = fresh.sets[l].intersect(p).expect("same dimension");
                push_rules(&mut rules, l, &here, &Some(a.clone()));
            }
        }
    }
    Strategy { rules }
}

fn safety_strategy(arena: &Arena<'_>, w: &StateSet) -> Strategy {
    let (_, stay) = arena.safety_parts(w);
    let mut rules = Vec::new();
    for (l, f) in stay.sets.iter().enumerate() {
        push_rules(&mut rules, l, f, &None);
    }
    for (l, per) in arena.cpred_by_action(w).iter().enumerate() {
        for (a, p) in per {
            let here = w.sets[l].intersect(p).expect("same dimension");
            push_rules(&mut rules, l, &here, &Some(a.clone()));
        }
    }
    Strategy { rules }
}

/// Recomputes a strategy for a claimed fixed point `w`.
pub fn extract_strategy(g: &TimedGame, w: &StateSet, objective: Objective) -> Result<Strategy> {
    check_fixed_point(g, objective, w)?;
    let arena = Arena::new(g);
    match objective {
        Objective::Safe => Ok(safety_strategy(&arena, w)),
        Objective::Reach => {
            let mut layers = vec![arena.targets()];
            loop {
                let x = layers.last().unwrap();
                let next = arena.reach_step(x);
                if next.is_subset(x) {
                    break;
                }
                layers.push(next);
            }
            if !layers.last().unwrap().set_eq(w) {
                return Err(Error::NotFixedPoint("not the least fixed point".into()));
            }
            Ok(reach_strategy(&arena, &layers))
        }
    }
}
