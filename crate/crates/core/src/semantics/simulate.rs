use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{d_step, d_successors, d_time_step, DRun, DState, DStep, MaxDelay, TaState};
use crate::error::{Error, Result};
use crate::model::{Action, DelayedGame};
use crate::rational::{int, Rational};
use crate::zone::Dbm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Wait,
    Act(Action),
}

/// A state-based strategy over delayed-game states.
pub trait DelayedStrategy {
    fn decide(&self, s: &DState) -> Decision;

    /// Positive delays from `s` at which the decision may change.
    fn breakpoints(&self, s: &DState) -> Vec<Rational>;
}

/// A state-based strategy over timed-automaton states.
pub trait TaStrategy {
    fn decide(&self, s: &TaState) -> Decision;

    fn breakpoints(&self, s: &TaState) -> Vec<Rational>;
}

pub struct AlwaysWait;

impl DelayedStrategy for AlwaysWait {
    fn decide(&self, _: &DState) -> Decision {
        Decision::Wait
    }

    fn breakpoints(&self, _: &DState) -> Vec<Rational> {
        Vec::new()
    }
}

impl TaStrategy for AlwaysWait {
    fn decide(&self, _: &TaState) -> Decision {
        Decision::Wait
    }

    fn breakpoints(&self, _: &TaState) -> Vec<Rational> {
        Vec::new()
    }
}

/// What the environment sees before moving.
pub struct EnvView<'a> {
    pub state: &'a DState,
    /// Enabled uncontrolled and execute steps.
    pub options: &'a [(DStep, DState)],
    /// How long time may pass before the controller acts or time is blocked.
    pub limit: MaxDelay,
    /// Earliest delay at which some uncontrolled edge becomes enabled, with strictness.
    pub earliest: Option<(Rational, bool)>,
    /// The controller wants to schedule right now.
    pub controller_now: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvMove {
    Take(usize),
    Delay(Rational),
    /// Let the controller act, or give up if it does not want to.
    Yield,
    Fault(String),
}

pub trait Environment {
    fn choose(&mut self, view: &EnvView<'_>) -> EnvMove;

    /// Picks among the ways to realise a scheduling decision (edges and insertion positions).
    fn resolve(&mut self, candidates: &[(DStep, DState)]) -> usize;
}

/// Seeded random environment moving on a grid of `1/denominator`.
pub struct RandomEnv {
    rng: ChaCha8Rng,
    denominator: i64,
    horizon: Rational,
}

impl RandomEnv {
    pub fn new(seed: u64, denominator: u32) -> RandomEnv {
        RandomEnv { rng: ChaCha8Rng::seed_from_u64(seed), denominator: i64::from(denominator.max(1)), horizon: int(10) }
    }

    fn grid(&self, lo: &Rational, lo_strict: bool, limit: &MaxDelay, hi_cap: &Rational) -> Vec<Rational> {
        let d = int(self.denominator);
        let start = (lo * &d).ceil().to_integer();
        let mut out = Vec::new();
        let mut k = start;
        loop {
            let p = Rational::new(k.clone(), d.to_integer());
            k += 1;
            if p > *hi_cap || !limit.admits(&p) {
                break;
            }
            if (lo_strict && p == *lo) || p.is_zero() {
                continue;
            }
            out.push(p);
        }
        out
    }
}

impl Environment for RandomEnv {
    fn choose(&mut self, view: &EnvView<'_>) -> EnvMove {
        if !view.options.is_empty() {
            if view.controller_now && self.rng.gen_bool(0.5) {
                return EnvMove::Yield;
            }
            return EnvMove::Take(self.rng.gen_range(0..view.options.len()));
        }
        if view.controller_now {
            return EnvMove::Yield;
        }
        if let Some((e, strict)) = &view.earliest {
            let cap = match &view.limit.bound {
                Some(b) => b.clone(),
                None => e + &self.horizon,
            };
            let points = self.grid(e, *strict, &view.limit, &cap);
            if !points.is_empty() {
                let i = self.rng.gen_range(0..points.len());
                return EnvMove::Delay(points[i].clone());
            }
        }
        match &view.limit.bound {
            Some(b) if b.is_zero() => EnvMove::Yield,
            Some(b) if view.limit.attained => EnvMove::Delay(b.clone()),
            Some(b) => EnvMove::Delay(b / int(2)),
            None => EnvMove::Yield,
        }
    }

    fn resolve(&mut self, candidates: &[(DStep, DState)]) -> usize {
        self.rng.gen_range(0..candidates.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptItem {
    Delay(Rational),
    Edge(usize),
    /// Insertion position for the next scheduling step.
    Position(usize),
}

/// Replays a fixed script, then falls back to eager behaviour.
pub struct ScriptedEnv {
    items: VecDeque<ScriptItem>,
}

impl ScriptedEnv {
    pub fn new(items: impl IntoIterator<Item = ScriptItem>) -> ScriptedEnv {
        ScriptedEnv { items: items.into_iter().collect() }
    }
}

impl Environment for ScriptedEnv {
    fn choose(&mut self, view: &EnvView<'_>) -> EnvMove {
        match self.items.front() {
            Some(ScriptItem::Delay(_) | ScriptItem::Position(_)) if view.controller_now => EnvMove::Yield,
            Some(ScriptItem::Delay(q)) => {
                let q = q.clone();
                self.items.pop_front();
                if view.limit.admits(&q) {
                    EnvMove::Delay(q)
                } else if view.limit.attained {
                    EnvMove::Delay(view.limit.bound.clone().expect("bounded"))
                } else {
                    EnvMove::Fault(format!("scripted delay {} exceeds the limit", crate::rational::format(&q)))
                }
            }
            Some(ScriptItem::Edge(e)) => {
                let e = *e;
                self.items.pop_front();
                match view.options.iter().position(|(s, _)| s.edge() == Some(e)) {
                    Some(i) => EnvMove::Take(i),
                    None => EnvMove::Fault(format!("scripted edge {e} is not enabled")),
                }
            }
            Some(ScriptItem::Position(_)) | None => {
                if !view.options.is_empty() {
                    EnvMove::Take(0)
                } else if view.controller_now {
                    EnvMove::Yield
                } else {
                    match &view.limit.bound {
                        Some(b) if view.limit.attained && !b.is_zero() => EnvMove::Delay(b.clone()),
                        _ => EnvMove::Yield,
                    }
                }
            }
        }
    }

    fn resolve(&mut self, candidates: &[(DStep, DState)]) -> usize {
        if let Some(ScriptItem::Position(p)) = self.items.front() {
            let p = *p;
            if let Some(i) =
                candidates.iter().position(|(s, _)| matches!(s, DStep::Schedule { position, .. } if *position == p))
            {
                self.items.pop_front();
                return i;
            }
        }
        0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndReason {
    StepLimit,
    /// No successors and no time can pass.
    Maximal,
    /// Nobody moves: only unbounded waiting remains.
    Stalled,
    EnvFault(String),
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub run: DRun,
    pub states: Vec<DState>,
    pub end: EndReason,
}

impl SimOutcome {
    pub fn last(&self) -> &DState {
        self.states.last().unwrap()
    }

    pub fn visits(&self, pred: impl Fn(usize) -> bool) -> bool {
        self.states.iter().any(|s| pred(s.location))
    }
}

/// Delay points probed along the ray: 0, each breakpoint, and a point inside
/// each open stretch between them.
fn probe_points(mut bps: Vec<Rational>, limit: &MaxDelay) -> Vec<Rational> {
    bps.retain(|b| b.is_positive());
    bps.sort();
    bps.dedup();
    let mut points = vec![Rational::zero()];
    let mut prev = Rational::zero();
    for b in bps {
        points.push((&prev + &b) / int(2));
        points.push(b.clone());
        prev = b;
    }
    points.push(&prev + Rational::one());
    if let Some(bound) = &limit.bound {
        if !points.contains(bound) {
            points.push(bound.clone());
        }
        points.sort();
    }
    points.retain(|p| limit.admits(p));
    points
}

/// First point along the delay ray where the strategy schedules, if any.
fn controller_plan(
    d: &DelayedGame,
    strategy: &dyn DelayedStrategy,
    s: &DState,
    limit: &MaxDelay,
) -> Result<Option<(Rational, Action)>> {
    for p in probe_points(strategy.breakpoints(s), limit) {
        let Ok(at) = d_time_step(d, s, &p) else { continue };
        if let Decision::Act(a) = strategy.decide(&at) {
            if !a.is_push() {
                return Err(Error::StrategyFault(format!("strategy emitted non-scheduling action {a}")));
            }
            return Ok(Some((p, a)));
        }
    }
    Ok(None)
}

fn earliest_env(d: &DelayedGame, s: &DState) -> Option<(Rational, bool)> {
    let mut best: Option<(Rational, bool)> = None;
    for (_, e) in d.automaton.outgoing(s.location) {
        if !d.is_uncontrollable(&e.action) {
            continue;
        }
        let zone: Dbm = crate::model::enabled_zone(d, e);
        if let Some(w) = zone.delay_window(&s.valuation) {
            let better = match &best {
                None => true,
                Some((b, bs)) => w.lo < *b || (w.lo == *b && *bs && !w.lo_strict),
            };
            if better {
                best = Some((w.lo, w.lo_strict));
            }
        }
    }
    best
}

/// Runs `strategy` against `env` for at most `max_steps` steps.
pub fn simulate(
    d: &DelayedGame,
    strategy: &dyn DelayedStrategy,
    env: &mut dyn Environment,
    start: DState,
    max_steps: usize,
) -> Result<SimOutcome> {
    let mut run = DRun { start: start.clone(), steps: Vec::new() };
    let mut states = vec![start];
    let mut end = EndReason::StepLimit;
    while run.steps.len() < max_steps {
        let state = states.last().unwrap().clone();
        let (succ, maxd) = d_successors(d, &state);
        let plan = controller_plan(d, strategy, &state, &maxd)?;
        let controller_now = plan.as_ref().is_some_and(|(p, _)| p.is_zero());
        let limit = match &plan {
            Some((p, _)) => MaxDelay { bound: Some(p.clone()), attained: true },
            None => maxd.clone(),
        };
        let options: Vec<(DStep, DState)> =
            succ.iter().filter(|(s, _)| !matches!(s, DStep::Schedule { .. })).cloned().collect();
        if options.is_empty() && maxd.is_zero() && !controller_now {
            end = EndReason::Maximal;
            break;
        }
        let view = EnvView {
            state: &state,
            options: &options,
            limit: limit.clone(),
            earliest: earliest_env(d, &state),
            controller_now,
        };
        let (step, next) = match env.choose(&view) {
            EnvMove::Take(i) => options[i].clone(),
            EnvMove::Delay(q) => {
                if !q.is_positive() || !limit.admits(&q) {
                    end = EndReason::EnvFault(format!("delay {} not admissible", crate::rational::format(&q)));
                    break;
                }
                let step = DStep::Delay(q);
                let next = d_step(d, &state, &step).map_err(|r| Error::StrategyFault(r.to_string()))?;
                (step, next)
            }
            EnvMove::Yield => {
                let Some((_, action)) = plan.filter(|_| controller_now) else {
                    end = if maxd.is_zero() && options.is_empty() { EndReason::Maximal } else { EndReason::Stalled };
                    break;
                };
                let candidates: Vec<(DStep, DState)> = succ
                    .iter()
                    .filter(
                        |(s, _)| matches!(s, DStep::Schedule { edge, .. } if d.automaton.edges[*edge].action == action),
                    )
                    .cloned()
                    .collect();
                if candidates.is_empty() {
                    return Err(Error::StrategyFault(format!(
                        "{action} is not enabled in {}",
                        d.automaton.locations[state.location].name
                    )));
                }
                candidates[env.resolve(&candidates)].clone()
            }
            EnvMove::Fault(msg) => {
                end = EndReason::EnvFault(msg);
                break;
            }
        };
        run.steps.push(step);
        states.push(next);
    }
    Ok(SimOutcome { run, states, end })
}
