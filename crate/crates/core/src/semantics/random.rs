use num_traits::Zero;
use rand::Rng;

use super::{d_step, d_successors, DRun, DState, DStep};
use crate::model::DelayedGame;
use crate::rational::{int, Rational};

/// A random walk through the transition system: discrete steps and grid delays
/// (`1/denominator`) chosen uniformly.
pub fn random_run(d: &DelayedGame, start: DState, rng: &mut impl Rng, steps: usize, denominator: u32) -> DRun {
    let mut run = DRun { start: start.clone(), steps: Vec::new() };
    let mut state = start;
    let den = i64::from(denominator.max(1));
    for _ in 0..steps {
        let (succ, maxd) = d_successors(d, &state);
        let horizon = int(10);
        let cap = maxd.bound.clone().unwrap_or(horizon);
        let top = (&cap * int(den)).floor().to_integer();
        let top: i64 = top.try_into().unwrap_or(i64::MAX);
        let grid: Vec<Rational> =
            (1..=top).map(|k| Rational::new(k.into(), den.into())).filter(|p| maxd.admits(p)).collect();
        let delay_possible = !grid.is_empty() && !(maxd.bound.as_ref().is_some_and(Zero::is_zero));
        let pick_discrete = !succ.is_empty() && (!delay_possible || rng.gen_bool(0.5));
        let (step, next) = if pick_discrete {
            succ[rng.gen_range(0..succ.len())].clone()
        } else if delay_possible {
            let step = DStep::Delay(grid[rng.gen_range(0..grid.len())].clone());
            let next = d_step(d, &state, &step).expect("admissible delay");
            (step, next)
        } else {
            break;
        };
        run.steps.push(step);
        state = next;
    }
    run
}
