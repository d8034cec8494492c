//! Classical timed games as delayed games with `T = {0}` and schedules of length at most one.

use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::model::{complete_deadlock_freedom, Action, Automaton, DelayedGame, Edge, Location, TimedGame};
use crate::rational::Rational;
use crate::reduction::reduce;
use crate::semantics::{
    simulate, DRun, DState, DStep, Decision, DelayedStrategy, Environment, SimOutcome, TaRun, TaState, TaStep,
    TaStrategy,
};
use crate::solver::solve_reachability;

/// Where an edge of the classical game went.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddedEdge {
    Copied(usize),
    Pair { push: usize, execute: usize },
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub game: DelayedGame,
    pub edges: Vec<EmbeddedEdge>,
    /// Base edge of each embedded edge; `None` for completion edges.
    pub origin: Vec<Option<usize>>,
}

pub fn phase_location(base: usize, phase: u8) -> usize {
    2 * base + usize::from(phase)
}

/// `(base, phase)` of an embedded location, `None` for the sink.
pub fn split_location(emb: &Embedding, loc: usize) -> Option<(usize, u8)> {
    let bases = emb.game.automaton.locations.len() / 2;
    (loc < 2 * bases).then_some((loc / 2, (loc % 2) as u8))
}

pub fn embed(g: &TimedGame) -> Result<Embedding> {
    let a = &g.automaton;
    let named = |act: &Action| match act {
        Action::Named(n) => Ok(n.clone()),
        Action::Push { .. } => Err(Error::InvalidModel(format!("scheduling action {act} in a classical game"))),
    };
    let mut locations = Vec::with_capacity(2 * a.locations.len());
    for l in &a.locations {
        locations.push(Location { name: format!("{}#0", l.name), invariant: l.invariant.clone() });
        locations.push(Location { name: format!("{}#1", l.name), invariant: Constraint::top() });
    }
    let mut edges = Vec::new();
    let mut map = Vec::with_capacity(a.edges.len());
    let mut origin = Vec::new();
    for (i, e) in a.edges.iter().enumerate() {
        let name = named(&e.action)?;
        if g.is_controllable(&e.action) {
            let push = edges.len();
            edges.push(Edge {
                source: phase_location(e.source, 0),
                guard: e.guard.clone(),
                action: Action::push(&name, 0),
                resets: e.resets.clone(),
                target: phase_location(e.source, 1),
            });
            edges.push(Edge {
                source: phase_location(e.source, 1),
                guard: Constraint::top(),
                action: e.action.clone(),
                resets: Vec::new(),
                target: phase_location(e.target, 0),
            });
            origin.extend([Some(i), Some(i)]);
            map.push(EmbeddedEdge::Pair { push, execute: push + 1 });
        } else {
            map.push(EmbeddedEdge::Copied(edges.len()));
            origin.push(Some(i));
            edges.push(Edge { source: phase_location(e.source, 0), target: phase_location(e.target, 0), ..e.clone() });
        }
    }
    let d = DelayedGame {
        automaton: Automaton { clocks: a.clocks.clone(), locations, initial: phase_location(a.initial, 0), edges },
        control: g.controllable.iter().map(named).collect::<Result<_>>()?,
        uncontrollable: g.uncontrollable.iter().map(named).collect::<Result<_>>()?,
        delays: [0].into_iter().collect(),
        targets: g.targets.iter().flat_map(|&l| [phase_location(l, 0), phase_location(l, 1)]).collect(),
        cap: Some(1),
    };
    let game = complete_deadlock_freedom(&d)?;
    origin.resize(game.automaton.edges.len(), None);
    Ok(Embedding { game, edges: map, origin })
}

impl Embedding {
    pub fn state_forward(&self, s: &TaState) -> DState {
        DState { location: phase_location(s.location, 0), valuation: s.valuation.clone(), schedule: Vec::new() }
    }

    /// Controllable steps become a push at position 0 followed by the execution.
    pub fn map_run_forward(&self, run: &TaRun) -> Result<DRun> {
        let mut steps = Vec::new();
        for step in &run.steps {
            match step {
                TaStep::Delay(q) => steps.push(DStep::Delay(q.clone())),
                TaStep::Edge(e) => match self.edges.get(*e) {
                    Some(EmbeddedEdge::Copied(c)) => steps.push(DStep::Uncontrolled(*c)),
                    Some(EmbeddedEdge::Pair { push, execute }) => {
                        steps.push(DStep::Schedule { edge: *push, position: 0 });
                        steps.push(DStep::Execute(*execute));
                    }
                    None => return Err(Error::RunMapping(format!("no edge {e}"))),
                },
            }
        }
        Ok(DRun { start: self.state_forward(&run.start), steps })
    }

    pub fn map_run_back(&self, run: &DRun) -> Result<TaRun> {
        let start = match split_location(self, run.start.location) {
            Some((l, 0)) if run.start.schedule.is_empty() => {
                TaState { location: l, valuation: run.start.valuation.clone() }
            }
            _ => return Err(Error::RunMapping("start is not a phase-0 state".into())),
        };
        let mut steps = Vec::new();
        for step in &run.steps {
            match step {
                DStep::Delay(q) => steps.push(TaStep::Delay(q.clone())),
                DStep::Schedule { .. } => {}
                DStep::Uncontrolled(e) | DStep::Execute(e) => {
                    let base = self
                        .origin
                        .get(*e)
                        .copied()
                        .flatten()
                        .ok_or_else(|| Error::RunMapping(format!("edge {e} leaves the embedded game")))?;
                    steps.push(TaStep::Edge(base));
                }
            }
        }
        Ok(TaRun { start, steps })
    }
}

/// A classical strategy played through the embedding.
pub struct LiftedStrategy<'a> {
    pub embedding: &'a Embedding,
    pub inner: &'a dyn TaStrategy,
}

impl LiftedStrategy<'_> {
    fn base(&self, s: &DState) -> Option<TaState> {
        match split_location(self.embedding, s.location) {
            Some((l, 0)) if s.schedule.is_empty() => Some(TaState { location: l, valuation: s.valuation.clone() }),
            _ => None,
        }
    }
}

impl DelayedStrategy for LiftedStrategy<'_> {
    fn decide(&self, s: &DState) -> Decision {
        match self.base(s).map(|t| self.inner.decide(&t)) {
            Some(Decision::Act(a)) => Decision::Act(Action::push(a.name(), 0)),
            _ => Decision::Wait,
        }
    }

    fn breakpoints(&self, s: &DState) -> Vec<Rational> {
        self.base(s).map(|t| self.inner.breakpoints(&t)).unwrap_or_default()
    }
}

/// Simulates a classical strategy from the initial state of `g`.
pub fn simulate_timed(
    emb: &Embedding,
    strategy: &dyn TaStrategy,
    env: &mut dyn Environment,
    max_steps: usize,
) -> Result<SimOutcome> {
    let lifted = LiftedStrategy { embedding: emb, inner: strategy };
    let start = crate::semantics::initial_state(&emb.game);
    simulate(&emb.game, &lifted, env, start, max_steps)
}

/// Reachability verdicts of `g` and of the cap-1 reduction of its embedding.
pub fn equivalence_verdicts(g: &TimedGame) -> Result<(bool, bool)> {
    let direct = solve_reachability(g)?.winning;
    let emb = embed(g)?;
    let reduced = reduce(&emb.game, 1, false)?;
    Ok((direct, solve_reachability(&reduced.game)?.winning))
}

pub fn equivalence_check(g: &TimedGame) -> Result<bool> {
    let (a, b) = equivalence_verdicts(g)?;
    Ok(a == b)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::format::read_model;
    use crate::gen::{random_game, GenConfig};
    use crate::model::{is_deadlock_free, validate_delayed, Model};
    use crate::semantics::{replay_delayed, replay_ta, RandomEnv};

    fn timed(text: &str) -> TimedGame {
        match read_model(text).unwrap() {
            Model::Timed(g) => g,
            _ => unreachable!(),
        }
    }

    fn top() -> TimedGame {
        timed(include_str!("../../../models/fig2-top.tgdc"))
    }

    #[test]
    fn top_game_counts() {
        let emb = embed(&top()).unwrap();
        let a = &emb.game.automaton;
        assert_eq!(a.locations.len(), 19);
        assert_eq!(a.locations[a.initial].name, "On#0");
        let pairs = emb.edges.iter().filter(|e| matches!(e, EmbeddedEdge::Pair { .. })).count();
        assert_eq!(pairs, 4);
        assert!(validate_delayed(&emb.game).is_empty());
        assert!(is_deadlock_free(&emb.game).is_ok());
        assert!(!emb.game.is_target(a.locations.len() - 1));
        let succ = top().automaton.location_index("Succ").unwrap();
        assert!(emb.game.is_target(phase_location(succ, 0)) && emb.game.is_target(phase_location(succ, 1)));
    }

    #[test]
    fn initial_target_is_embedded_target() {
        let mut g = top();
        g.targets = [g.automaton.initial].into_iter().collect();
        let emb = embed(&g).unwrap();
        assert!(emb.game.is_target(emb.game.automaton.initial));
    }

    #[test]
    fn top_games_are_equivalent() {
        assert_eq!(equivalence_verdicts(&top()).unwrap(), (true, true));
        let weak = timed(include_str!("../../../models/fig2-top-guard6.tgdc"));
        assert!(equivalence_check(&weak).unwrap());
    }

    #[test]
    fn extracted_strategy_wins_in_simulation() {
        let g = top();
        let sol = solve_reachability(&g).unwrap();
        let emb = embed(&g).unwrap();
        for seed in 0..50 {
            let out = simulate_timed(&emb, &sol.strategy, &mut RandomEnv::new(seed, 2), 30).unwrap();
            assert!(out.visits(|l| emb.game.is_target(l)), "seed {seed}");
        }
    }

    #[test]
    fn random_runs_round_trip() {
        for seed in 0..30 {
            let g = random_game(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
            let emb = embed(&g).unwrap();
            let sol = solve_reachability(&g).unwrap();
            let out = simulate_timed(&emb, &sol.strategy, &mut RandomEnv::new(seed, 2), 20).unwrap();
            let back = emb.map_run_back(&out.run);
            let Ok(back) = back else { continue };
            replay_ta(&g.automaton, &back).unwrap();
            let again = emb.map_run_forward(&back).unwrap();
            let mut expect = out.run.clone();
            if matches!(expect.steps.last(), Some(DStep::Schedule { .. })) {
                expect.steps.pop();
            }
            assert_eq!(again, expect, "seed {seed}");
            let states = replay_delayed(&emb.game, &again).unwrap();
            assert!(states.iter().all(|s| s.schedule.len() <= 1));
            assert!(states
                .iter()
                .all(|s| s.location % 2 == 0 || s.location == emb.game.automaton.locations.len() - 1 || s.head_due()));
        }
    }
}
