use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::constraint::Constraint;
use crate::format::read_model;
use crate::gen::{random_game, GenConfig};
use crate::model::{Automaton, Edge, Location, Model};
use crate::rational::{int, ratio, Rational};
use crate::semantics::{Decision, TaStrategy};
use crate::zone::Dbm;

fn timed(text: &str) -> TimedGame {
    match read_model(text).unwrap() {
        Model::Timed(g) => g,
        _ => unreachable!(),
    }
}

fn top() -> TimedGame {
    timed(include_str!("../../../../models/fig2-top.tgdc"))
}

fn zone(g: &TimedGame, text: &str) -> Dbm {
    let a = &g.automaton;
    Dbm::from_constraint(&Constraint::parse(text, &a.clocks).unwrap(), a.clock_count()).unwrap()
}

fn set(g: &TimedGame, parts: &[(&str, &str)]) -> StateSet {
    let a = &g.automaton;
    let mut s = StateSet::empty(a.locations.len(), a.clock_count());
    for (l, z) in parts {
        s.sets[a.location_index(l).unwrap()].add(zone(g, z));
    }
    s
}

fn only(s: &StateSet, g: &TimedGame, loc: &str, z: &str) -> bool {
    let l = g.automaton.location_index(loc).unwrap();
    s.sets.iter().enumerate().all(|(i, f)| {
        if i == l {
            f.set_eq(&Federation::from_dbm(zone(g, z))).unwrap()
        } else {
            f.is_empty()
        }
    })
}

#[test]
fn cpred_into_succ_is_all_of_piston() {
    let g = top();
    let arena = Arena::new(&g);
    let x = set(&g, &[("Succ", "")]);
    assert!(only(&arena.cpred(&x), &g, "Piston", "x <= 10"));
    assert!(arena.cpred(&StateSet::empty(9, 1)).is_empty());
}

#[test]
fn upred_examples() {
    let g = top();
    let arena = Arena::new(&g);
    assert!(arena.upred(&set(&g, &[("Err1", "")])).is_empty());
    assert!(only(&arena.upred(&set(&g, &[("Hole", "x == 0")])), &g, "On", "x >= 8 && x <= 10"));
    assert!(arena.upred(&StateSet::empty(9, 1)).is_empty());
}

#[test]
fn timed_pred_examples() {
    let g = top();
    let arena = Arena::new(&g);
    let x = set(&g, &[("On", "x >= 4 && x <= 5")]);
    let none = StateSet::empty(9, 1);
    assert!(only(&arena.timed_pred_safe(&x, &none), &g, "On", "x <= 5"));
    // the endpoint and the start count as visited
    let all = arena.all();
    assert!(arena.timed_pred_safe(&all, &all).is_empty());
    let y = set(&g, &[("On", "x >= 2 && x <= 3")]);
    assert!(only(&arena.timed_pred_safe(&x, &y), &g, "On", "x > 3 && x <= 5"));
}

/// Membership by definition on a fine delay grid, for one-clock sets.
#[test]
fn timed_pred_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = top();
    let arena = Arena::new(&g);
    let rels = ["<", "<=", ">", ">="];
    for _ in 0..200 {
        let piece = |rng: &mut ChaCha8Rng| {
            let a = rng.gen_range(0..8);
            let b = a + rng.gen_range(0..4);
            format!("x {} {a} && x {} {b}", rels[2 + rng.gen_range(0..2)], rels[rng.gen_range(0..2)])
        };
        let xs = piece(&mut rng);
        let ys = piece(&mut rng);
        let x = set(&g, &[("On", &xs)]);
        let y = set(&g, &[("On", &ys)]);
        let got = arena.timed_pred_safe(&x, &y);
        let zx = zone(&g, &xs);
        let zy = zone(&g, &ys);
        for k in 0..=44 {
            let v = ratio(k, 4);
            let mut expect = false;
            for d in 0..=(44 - k) * 8 {
                let p = vec![&v + ratio(d, 32)];
                if zy.contains(&p).unwrap() {
                    break;
                }
                if zx.contains(&p).unwrap() {
                    expect = v <= int(10);
                    break;
                }
            }
            let state = TaState { location: 0, valuation: vec![v.clone()] };
            assert_eq!(got.contains(&state), expect, "x: {xs}, y: {ys}, v = {v}");
        }
    }
}

#[test]
fn top_game_strategy() {
    let g = top();
    let sol = solve_reachability(&g).unwrap();
    assert!(sol.winning);
    let acts: Vec<&Rule> = sol.strategy.rules.iter().filter(|r| r.action.is_some()).collect();
    assert_eq!(acts.len(), 1);
    let piston = g.automaton.location_index("Piston").unwrap();
    assert_eq!(acts[0].location, piston);
    assert_eq!(acts[0].zone, zone(&g, "x < 8"));
    assert_eq!(acts[0].action, Some(Action::named("kick")));
    check_fixed_point(&g, Objective::Reach, &sol.winning_set).unwrap();
    assert!(oracle_solve(&g, 2, Objective::Reach).unwrap());
}

#[test]
fn weakened_top_game_stays_winning() {
    // kicking on entry to Piston beats the earlier mov
    let g = timed(include_str!("../../../../models/fig2-top-guard6.tgdc"));
    let sol = solve_reachability(&g).unwrap();
    assert!(sol.winning);
    assert!(oracle_solve(&g, 2, Objective::Reach).unwrap());
}

fn one_location(target: bool, bad_edge: bool) -> TimedGame {
    let mut locations = vec![Location { name: "l0".into(), invariant: Constraint::top() }];
    let mut edges = Vec::new();
    let mut uncontrollable = std::collections::BTreeSet::new();
    if bad_edge {
        locations.push(Location { name: "bad".into(), invariant: Constraint::top() });
        edges.push(Edge { source: 0, guard: Constraint::top(), action: Action::named("u"), resets: vec![], target: 1 });
        uncontrollable.insert(Action::named("u"));
    }
    TimedGame {
        automaton: Automaton { clocks: vec!["x".into()], locations, initial: 0, edges },
        controllable: Default::default(),
        uncontrollable,
        targets: if target { [0].into_iter().collect() } else { Default::default() },
    }
}

#[test]
fn initial_target_wins_with_no_rules() {
    let g = one_location(true, false);
    let sol = solve_reachability(&g).unwrap();
    assert!(sol.winning);
    assert!(sol.strategy.rules.is_empty());
    assert!(oracle_solve(&g, 1, Objective::Reach).unwrap());
}

#[test]
fn safety_examples() {
    let g = one_location(true, false);
    let sol = solve_safety(&g).unwrap();
    assert!(sol.winning);
    assert!(sol.winning_set.set_eq(&Arena::new(&g).all()));
    assert!(sol.strategy.is_all_wait());
    let g = one_location(true, true);
    assert!(!solve_safety(&g).unwrap().winning);
    assert!(!oracle_solve(&g, 2, Objective::Safe).unwrap());
}

#[test]
fn extraction_rejects_non_fixed_points() {
    let g = top();
    let f = Arena::new(&g).targets();
    assert!(matches!(extract_strategy(&g, &f, Objective::Reach), Err(Error::NotFixedPoint(_))));
    let sol = solve_reachability(&g).unwrap();
    assert_eq!(extract_strategy(&g, &sol.winning_set, Objective::Reach).unwrap(), sol.strategy);
}

#[test]
fn oracle_rejects_strict_guards() {
    let mut g = top();
    g.automaton.edges[0].guard = Constraint::parse("x > 8", &g.automaton.clocks).unwrap();
    assert!(matches!(oracle_solve(&g, 2, Objective::Reach), Err(Error::OraclePrecondition(_))));
}

fn random_set(rng: &mut ChaCha8Rng, g: &TimedGame) -> StateSet {
    let a = &g.automaton;
    let mut s = StateSet::empty(a.locations.len(), a.clock_count());
    for l in 0..a.locations.len() {
        for _ in 0..rng.gen_range(0..3) {
            let c = a.clocks[rng.gen_range(0..a.clock_count())].clone();
            let lo = rng.gen_range(0..5);
            let text = format!("{c} >= {lo} && {c} <= {}", lo + rng.gen_range(0..3));
            let z = zone(g, &text).intersect(&a.invariant_zone(l)).unwrap();
            s.sets[l].add(z);
        }
    }
    s
}

#[test]
fn operators_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..40 {
        let g = random_game(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
        let arena = Arena::new(&g);
        let x = random_set(&mut rng, &g);
        let bigger = x.union(&random_set(&mut rng, &g));
        assert!(arena.cpred(&x).is_subset(&arena.cpred(&bigger)));
        assert!(arena.upred(&x).is_subset(&arena.upred(&bigger)));
        assert!(arena.reach_step(&x).is_subset(&arena.reach_step(&bigger)), "seed {seed}");
        assert!(arena.safety_step(&x).is_subset(&arena.safety_step(&bigger)), "seed {seed}");
    }
}

#[test]
fn random_games_agree_with_oracle() {
    for seed in 0..40 {
        let g = random_game(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
        for obj in [Objective::Reach, Objective::Safe] {
            let sol = solve(&g, obj).unwrap();
            check_fixed_point(&g, obj, &sol.winning_set).unwrap();
            let all = Arena::new(&g).all();
            assert!(sol.winning_set.is_subset(&all));
            assert_eq!(sol.winning, oracle_solve(&g, 2, obj).unwrap(), "seed {seed} {obj:?}");
        }
    }
}

#[test]
fn strategy_file_round_trip() {
    let g = top();
    let sol = solve_reachability(&g).unwrap();
    let file = sol.strategy.to_file(&g, "abc".into(), Objective::Reach, None);
    assert_eq!(file.rules[0].zone, "x < 8");
    assert_eq!(file.rules[0].decision, "kick");
    let text = serde_json::to_string(&file).unwrap();
    let back = Strategy::from_file(&g, &serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, sol.strategy);
}

#[test]
fn strategy_breakpoints_cover_rule_edges() {
    let g = top();
    let sol = solve_reachability(&g).unwrap();
    let piston = g.automaton.location_index("Piston").unwrap();
    let s = TaState { location: piston, valuation: vec![Rational::from_integer(2.into())] };
    assert_eq!(sol.strategy.breakpoints(&s), vec![int(0), int(6)]);
    assert_eq!(sol.strategy.decide(&s), Decision::Act(Action::named("kick")));
}
