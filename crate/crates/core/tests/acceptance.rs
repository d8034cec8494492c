//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tgdc::bound::compute_schedule_bound;
use tgdc::cli::{resolve_cap, run_cli};
use tgdc::counter::{canonical_simulate, cm_run, TwoCounterMachine};
use tgdc::embedding::{embed, simulate_timed};
use tgdc::format::read_model;
use tgdc::gen::{random_game, GenConfig};
use tgdc::model::{complete_deadlock_freedom, DelayedGame, Model, TimedGame};
use tgdc::reduction::{enumerate_s, reduce, s_count, MappedStrategy};
use tgdc::semantics::{
    initial_state, random_run, replay_delayed, replay_ta, simulate, validate_delayed_run, validate_ta_run, Objective,
    RandomEnv, SimOutcome,
};
use tgdc::solver::{check_fixed_point, oracle_solve, solve, Solution};

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn delayed(name: &str) -> DelayedGame {
    match read_model(&fs::read_to_string(models().join(name)).unwrap()).unwrap() {
        Model::Delayed(d) => d,
        Model::Timed(_) => panic!("{name} is not a tgdc model"),
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("tgdc").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

/// Fixed-point and strategy-simulation bookkeeping shared with criterion 9.
#[derive(Default)]
struct Soundness {
    games: usize,
    fixed_point_failures: Vec<String>,
    runs: usize,
    losing_runs: Vec<String>,
}

impl Soundness {
    fn solve(&mut self, label: &str, g: &TimedGame, obj: Objective) -> Solution {
        let sol = solve(g, obj).unwrap_or_else(|e| panic!("{label}: {e}"));
        self.games += 1;
        if let Err(e) = check_fixed_point(g, obj, &sol.winning_set) {
            self.fixed_point_failures.push(format!("{label}: {e}"));
        }
        sol
    }

    fn run(&mut self, label: String, o: &SimOutcome, lost: bool) {
        self.runs += 1;
        if lost {
            self.losing_runs.push(format!("{label}: ended {:?} after {} steps", o.end, o.run.steps.len()));
        }
    }
}

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, Box<dyn FnOnce(&mut Soundness) -> Check>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_product_synthesis(s: &mut Soundness) -> Check {
    let (code, out) =
        cli(&["solve", models().join("fig2-product.tgdc").to_str().unwrap(), "--objective", "reach", "--cap", "1"]);
    ensure(code == 0 && out.contains("winning: true"), || format!("solve exited {code}: {out}"))?;
    let d = complete_deadlock_freedom(&delayed("fig2-product.tgdc")).unwrap();
    ensure(resolve_cap(&d, None).unwrap() == 1, || "shipped model does not carry cap 1".into())?;
    let red = reduce(&d, 1, false).map_err(|e| e.to_string())?;
    let sol = s.solve("product cap 1", &red.game, Objective::Reach);
    ensure(sol.winning, || "reduced game not winning".into())?;
    let mapped = MappedStrategy { reduction: &red, inner: &sol.strategy };
    let mut reached = 0;
    for seed in 0..200 {
        let o =
            simulate(&d, &mapped, &mut RandomEnv::new(seed, 2), initial_state(&d), 12).map_err(|e| e.to_string())?;
        ensure(validate_delayed_run(&d, &o.run).is_ok(), || format!("seed {seed}: invalid run"))?;
        let hit = o.visits(|l| d.is_target(l));
        reached += usize::from(hit);
        s.run(format!("product seed {seed}"), &o, !hit);
    }
    ensure(reached == 200, || format!("{reached}/200 runs reach Succ"))?;
    Ok(format!("winning at cap 1; {reached}/200 runs reach Succ within 12 steps"))
}

fn c2_negative_control(s: &mut Soundness) -> Check {
    let (code, out) =
        cli(&["solve", models().join("fig2-product-guard6.tgdc").to_str().unwrap(), "--objective", "reach"]);
    ensure(code == 1, || format!("solve exited {code}: {out}"))?;
    let d = complete_deadlock_freedom(&delayed("fig2-product-guard6.tgdc")).unwrap();
    let red = reduce(&d, resolve_cap(&d, None).unwrap(), false).map_err(|e| e.to_string())?;
    let sol = s.solve("product x>=6", &red.game, Objective::Reach);
    ensure(!sol.winning, || "weakened product reported winning".into())?;
    Ok("not winning, exit 1".into())
}

fn c3_bound() -> Check {
    let (code, out) = cli(&["bound", models().join("fig2-product.tgdc").to_str().unwrap()]);
    ensure(code == 0, || format!("bound exited {code}"))?;
    let lines: Vec<&str> = out.lines().collect();
    for want in ["tmin=8", "smax=1", "dmax=22", "bound=4"] {
        ensure(lines.contains(&want), || format!("missing {want} in {out:?}"))?;
    }
    let b = compute_schedule_bound(&delayed("fig2-product.tgdc"));
    ensure((b.tmin, b.smax, b.dmax, b.bound) == (Some(8), 1, 22, Some(4)), || format!("{b:?}"))?;
    Ok("Tmin=8 Smax=1 Dmax=22 bound=4".into())
}

fn c4_conservative_extension(s: &mut Soundness) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = GenConfig::default();
    let mut agree = 0;
    let mut winning = 0;
    for i in 0..100 {
        let g = random_game(&mut rng, &cfg);
        let direct = s.solve(&format!("game {i}"), &g, Objective::Reach);
        let emb = embed(&g).map_err(|e| e.to_string())?;
        let red = reduce(&emb.game, 1, false).map_err(|e| format!("game {i}: {e}"))?;
        let via = s.solve(&format!("game {i} embedded"), &red.game, Objective::Reach);
        let oracle = oracle_solve(&g, 2, Objective::Reach).map_err(|e| format!("game {i}: {e}"))?;
        let safe = s.solve(&format!("game {i} safety"), &g, Objective::Safe);
        let safe_oracle = oracle_solve(&g, 2, Objective::Safe).map_err(|e| format!("game {i}: {e}"))?;
        if direct.winning == via.winning && direct.winning == oracle && safe.winning == safe_oracle {
            agree += 1;
        } else {
            return Err(format!(
                "game {i}: direct {} embedded {} oracle {} (safety {} vs {})",
                direct.winning, via.winning, oracle, safe.winning, safe_oracle
            ));
        }
        for (sol, obj) in [(&direct, Objective::Reach), (&safe, Objective::Safe)] {
            if !sol.winning {
                continue;
            }
            winning += 1;
            for seed in 0..5 {
                let o =
                    simulate_timed(&emb, &sol.strategy, &mut RandomEnv::new(seed, 2), 60).map_err(|e| e.to_string())?;
                let lost = match obj {
                    Objective::Reach => !o.visits(|l| emb.game.is_target(l)),
                    Objective::Safe => !o.states.iter().all(|st| emb.game.is_target(st.location)),
                };
                s.run(format!("game {i} {obj:?} seed {seed}"), &o, lost);
            }
        }
    }
    Ok(format!(
        "{agree}/100 agree (solve = reduce(embed) = oracle, reach and safety); {winning} winning strategies simulated"
    ))
}

fn c5_bijection() -> Check {
    let mut d = complete_deadlock_freedom(&delayed("fig2-product.tgdc")).unwrap();
    d.cap = Some(2);
    let red = reduce(&d, 2, false).map_err(|e| e.to_string())?;
    let mut ok = 0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let run = random_run(&d, initial_state(&d), &mut rng, 30, 2);
        let fwd = red.map_run_forward(&run).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(validate_ta_run(&red.game.automaton, &fwd).is_ok(), || format!("seed {seed}: reduced run invalid"))?;
        let back = red.map_run_back(&fwd).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(back == run, || format!("seed {seed}: map back differs"))?;
        let ta = replay_ta(&red.game.automaton, &fwd).unwrap();
        let ds = replay_delayed(&d, &run).unwrap();
        for (t, x) in ta.iter().zip(&ds) {
            ensure(red.state_back(t).map_err(|e| e.to_string())? == *x, || format!("seed {seed}: states differ"))?;
        }
        ok += 1;
    }
    Ok(format!("{ok}/1000 runs map forward validly and back exactly"))
}

fn falling(n: u128, k: u128) -> u128 {
    (0..k).map(|i| n - i).product()
}

fn c6_s_counting() -> Check {
    let mut cases = 0;
    for cap in 0..=3usize {
        for na in 0..=2usize {
            for nt in 0..=2usize {
                let actions: Vec<String> = (0..na).map(|i| format!("a{i}")).collect();
                let delays: Vec<u32> = (1..=nt as u32).collect();
                let all = enumerate_s(cap, &actions, &delays);
                let distinct: HashSet<_> = all.iter().collect();
                let closed: u128 =
                    (0..=cap as u128).map(|k| falling(cap as u128, k) * (na as u128 * nt as u128).pow(k as u32)).sum();
                let coarse = ((cap + 1) * (na + 1) * (nt + 1)) as u128;
                let coarse = coarse.pow(cap as u32);
                ensure(all.len() as u128 == closed && distinct.len() == all.len(), || {
                    format!("cap {cap} |A| {na} |T| {nt}: {} entries, closed form {closed}", all.len())
                })?;
                ensure(s_count(cap, na, nt) == closed, || format!("s_count({cap},{na},{nt}) != {closed}"))?;
                ensure(closed <= coarse, || format!("cap {cap} |A| {na} |T| {nt}: {closed} > {coarse}"))?;
                ensure(all.iter().all(|e| e.is_valid(cap)), || "invalid entry enumerated".into())?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} parameter triples match the closed form and the coarse bound"))
}

fn c7_counter_machines() -> Check {
    let dir = models().join("2cm");
    let mut files: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    ensure(files.len() == 5, || format!("{} machines in the corpus", files.len()))?;
    let mut summary = Vec::new();
    for f in files {
        let name = f.file_stem().unwrap().to_string_lossy().into_owned();
        let m = TwoCounterMachine::parse(&fs::read_to_string(&f).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let interp = cm_run(&m, 50);
        let rep = canonical_simulate(&m, 50).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.reached_target == interp.terminated, || {
            format!("{name}: target {} vs halts {}", rep.reached_target, interp.terminated)
        })?;
        ensure(rep.sink_visits == 0, || format!("{name}: sink visited"))?;
        ensure(rep.timed_checks > 0, || format!("{name}: no audits ran"))?;
        summary.push(format!("{name}:{}", if rep.reached_target { "halts" } else { "runs" }));
    }
    Ok(summary.join(" "))
}

fn c8_zone_laws() -> Check {
    use common::zone_laws::{run_law, CASES, LAWS, POINTS};
    for (name, law) in LAWS {
        run_law(*law).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} laws, {CASES} cases each, {POINTS} sample points per case, 0 violations", LAWS.len()))
}

fn c9_soundness(s: &mut Soundness) -> Check {
    for name in ["fig2-top.tgdc", "fig2-top-guard6.tgdc"] {
        let g = match read_model(&fs::read_to_string(models().join(name)).unwrap()).unwrap() {
            Model::Timed(g) => g,
            Model::Delayed(_) => unreachable!(),
        };
        for obj in [Objective::Reach, Objective::Safe] {
            s.solve(&format!("{name} {obj:?}"), &g, obj);
        }
    }
    ensure(s.fixed_point_failures.is_empty(), || s.fixed_point_failures.join("; "))?;
    ensure(s.losing_runs.is_empty(), || format!("{} losing runs, first: {}", s.losing_runs.len(), s.losing_runs[0]))?;
    ensure(s.games > 0 && s.runs > 0, || "nothing was checked".into())?;
    Ok(format!("{} solved games are fixed points; {} strategy runs, 0 losing", s.games, s.runs))
}

fn main() -> ExitCode {
    let mut s = Soundness::default();
    let secs = Duration::from_secs;
    let criteria: Vec<Criterion> = vec![
        ("product synthesis", secs(10), Box::new(c1_product_synthesis)),
        ("negative control", secs(10), Box::new(c2_negative_control)),
        ("bound heuristic", secs(1), Box::new(|_| c3_bound())),
        ("conservative extension", secs(300), Box::new(c4_conservative_extension)),
        ("run bijection", secs(60), Box::new(|_| c5_bijection())),
        ("schedule entry counting", secs(1), Box::new(|_| c6_s_counting())),
        ("two-counter simulation", secs(30), Box::new(|_| c7_counter_machines())),
        ("zone algebra", secs(60), Box::new(|_| c8_zone_laws())),
        ("fixed-point soundness", secs(60), Box::new(c9_soundness)),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| check(&mut s))).unwrap_or_else(|p| {
            Err(format!(
                "panic: {:?}",
                p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied())
            ))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            r => r,
        };
        match result {
            Ok(msg) => println!("criterion {} [{name}]: PASS ({msg}; {took:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({msg}; {took:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
