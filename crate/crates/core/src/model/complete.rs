use super::{Action, DelayedGame, Edge, Location};
use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::zone::{Dbm, Federation};

/// A location and control action with valuations where no edge is enabled.
#[derive(Clone, Debug)]
pub struct DeadlockWitness {
    pub location: usize,
    pub action: String,
    pub uncovered: Federation,
}

/// Valuations in which edge `e` can fire: `g ∧ v[X'] ⊨ Inv(ℓ')`.
pub fn enabled_zone(d: &DelayedGame, e: &Edge) -> Dbm {
    let a = &d.automaton;
    let n = a.clock_count();
    let guard = Dbm::from_constraint(&e.guard, n).expect("validated guard");
    let inv = a.invariant_zone(e.target).reset_pred(&e.resets);
    guard.intersect(&inv).expect("same dimension")
}

fn uncovered(d: &DelayedGame, loc: usize, action: &str) -> Federation {
    let n = d.automaton.clock_count();
    let covered = Federation::from_zones(
        n,
        d.automaton
            .outgoing(loc)
            .filter(|(_, e)| matches!(&e.action, Action::Named(a) if a == action))
            .map(|(_, e)| enabled_zone(d, e)),
    );
    Federation::universe(n).subtract(&covered).expect("same dimension")
}

/// Checks every location and control action over all nonnegative valuations.
pub fn is_deadlock_free(d: &DelayedGame) -> std::result::Result<(), DeadlockWitness> {
    for loc in 0..d.automaton.locations.len() {
        for a in &d.control {
            let rest = uncovered(d, loc, a);
            if !rest.is_empty() {
                return Err(DeadlockWitness { location: loc, action: a.clone(), uncovered: rest });
            }
        }
    }
    Ok(())
}

/// Adds a fresh non-target sink with control self-loops, and for every
/// uncovered `(ℓ, a)` one `a`-edge into the sink per uncovered box.
/// Deadlock-free games come back unchanged.
pub fn complete_deadlock_freedom(d: &DelayedGame) -> Result<DelayedGame> {
    let mut out = d.clone();
    let sink = out.automaton.locations.len();
    let name = out.automaton.fresh_location_name("sink");
    let mut added = Vec::new();
    for loc in 0..d.automaton.locations.len() {
        for a in &d.control {
            for zone in uncovered(d, loc, a).into_zones() {
                let guard = zone.to_rectangular_constraint().ok_or_else(|| {
                    Error::Unsupported(format!(
                        "uncovered set of {} / {a} is not rectangular",
                        d.automaton.locations[loc].name
                    ))
                })?;
                added.push(Edge { source: loc, guard, action: Action::named(a), resets: Vec::new(), target: sink });
            }
        }
    }
    if added.is_empty() {
        return Ok(out);
    }
    out.automaton.locations.push(Location { name, invariant: Constraint::top() });
    out.automaton.edges.extend(added);
    for a in &d.control {
        out.automaton.edges.push(Edge {
            source: sink,
            guard: Constraint::top(),
            action: Action::named(a),
            resets: Vec::new(),
            target: sink,
        });
    }
    Ok(out)
}
