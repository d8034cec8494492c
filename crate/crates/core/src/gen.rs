//! Seeded random closed-guard timed games for the test harnesses.

use std::collections::BTreeSet;

use rand::Rng;

use crate::constraint::{Atom, ClockId, Constraint, Rel};
use crate::model::{Action, Automaton, Edge, Location, TimedGame};

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_locations: usize,
    pub max_clocks: usize,
    pub max_constant: i64,
    pub max_edges: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_locations: 4, max_clocks: 2, max_constant: 5, max_edges: 7 }
    }
}

fn closed_atom(rng: &mut impl Rng, clocks: usize, max: i64) -> Atom {
    let clock = ClockId(rng.gen_range(0..clocks));
    let rel = [Rel::Le, Rel::Ge, Rel::Eq][rng.gen_range(0..3)];
    Atom::new(clock, rel, rng.gen_range(0..=max))
}

/// Every edge carries its own action name, so controllable names are unique.
pub fn random_game(rng: &mut impl Rng, cfg: &GenConfig) -> TimedGame {
    let nloc = rng.gen_range(2..=cfg.max_locations.max(2));
    let nclk = rng.gen_range(1..=cfg.max_clocks.max(1));
    let clocks: Vec<String> = ["x", "y", "z"].iter().take(nclk).map(|s| s.to_string()).collect();
    let locations = (0..nloc)
        .map(|i| {
            let mut inv = Constraint::top();
            if i > 0 && rng.gen_bool(0.4) {
                let c = rng.gen_range(1..=cfg.max_constant);
                inv = inv.and(Atom::new(ClockId(rng.gen_range(0..nclk)), Rel::Le, c));
            }
            Location { name: format!("l{i}"), invariant: inv }
        })
        .collect();
    let nedges = rng.gen_range(1..=cfg.max_edges.max(1));
    let mut controllable = BTreeSet::new();
    let mut uncontrollable = BTreeSet::new();
    let edges = (0..nedges)
        .map(|i| {
            let mut guard = Constraint::top();
            for _ in 0..rng.gen_range(0..=2) {
                guard = guard.and(closed_atom(rng, nclk, cfg.max_constant));
            }
            let resets = (0..nclk).filter(|_| rng.gen_bool(0.4)).map(ClockId).collect();
            let action = if rng.gen_bool(0.5) {
                let a = Action::named(&format!("c{i}"));
                controllable.insert(a.clone());
                a
            } else {
                let a = Action::named(&format!("u{i}"));
                uncontrollable.insert(a.clone());
                a
            };
            Edge { source: rng.gen_range(0..nloc), guard, action, resets, target: rng.gen_range(0..nloc) }
        })
        .collect();
    let targets = [rng.gen_range(0..nloc)].into_iter().collect();
    TimedGame { automaton: Automaton { clocks, locations, initial: 0, edges }, controllable, uncontrollable, targets }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::validate_timed;

    #[test]
    fn generated_games_validate() {
        for seed in 0..200 {
            let g = random_game(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
            assert!(validate_timed(&g).is_empty(), "seed {seed}: {:?}", validate_timed(&g));
            assert!(g.automaton.max_constants().iter().all(|&c| c <= 5));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_game(&mut ChaCha8Rng::seed_from_u64(7), &GenConfig::default());
        let b = random_game(&mut ChaCha8Rng::seed_from_u64(7), &GenConfig::default());
        assert_eq!(a, b);
    }
}
