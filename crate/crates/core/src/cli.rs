//! The `tgdc` command line.
//!
//! Exit codes: 0 success or winning, 1 not winning (or not clean, or
//! infinite bound), 2 error. Errors are reported as one JSON line on
//! standard error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bound::compute_schedule_bound;
use crate::counter::{canonical_simulate, compile_2cm, TwoCounterMachine};
use crate::embedding::{embed, LiftedStrategy};
use crate::error::{Error, Result};
use crate::format::{check_model, game_hash, read_model, write_model};
use crate::model::{complete_deadlock_freedom, DelayedGame, Model, TimedGame};
use crate::rational::{self, Rational};
use crate::reduction::{reduce, MappedStrategy, Reduction};
use crate::semantics::{
    initial_state, simulate, AlwaysWait, DelayedStrategy, Environment, Objective, RandomEnv, ScriptItem, ScriptedEnv,
    Trace,
};
use crate::solver::{check_fixed_point, oracle_solve, solve, Solution, Strategy, StrategyFile};

#[derive(Parser, Debug)]
#[command(name = "tgdc", version, about = "Timed games under delayed control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Reach,
    Safe,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Objective {
        match o {
            ObjectiveArg::Reach => Objective::Reach,
            ObjectiveArg::Safe => Objective::Safe,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnvKind {
    Random,
    Script,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a model file; diagnostics go to standard error.
    Validate { model: PathBuf },
    /// Decide a game and optionally write a strategy.
    Solve {
        model: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduce a delayed game to a classical one with a sidecar mapping.
    Reduce {
        model: PathBuf,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
        /// Defaults to OUTPUT with `.map.json` appended.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Keep unreachable schedule entries.
        #[arg(long)]
        full: bool,
    },
    /// Embed a classical game into a delayed one.
    Embed {
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Schedule-length bound from simple cycles.
    Bound { model: PathBuf },
    /// Simulate a strategy against an environment and write the trace.
    Simulate {
        model: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "random")]
        env: EnvKind,
        /// Script file for `--env script`.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Random delays are multiples of 1/GRID.
        #[arg(long, default_value_t = 2)]
        grid: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile a two-counter machine into a delayed game.
    #[command(name = "compile-2cm")]
    Compile2cm {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also run the canonical strategy for at most N instructions.
        #[arg(long)]
        canonical: Option<usize>,
    },
    /// Decide a game by brute force on a grid.
    Oracle {
        model: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 2)]
        granularity: u32,
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum ScriptEntry {
    Delay(String),
    Edge(usize),
    Position(usize),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load(path: &Path) -> Result<Model> {
    read_model(&read(path)?)
}

fn delayed(m: Model, what: &str) -> Result<DelayedGame> {
    match m {
        Model::Delayed(d) => Ok(d),
        Model::Timed(_) => Err(Error::Unsupported(format!("{what} needs a tgdc model"))),
    }
}

/// Flag, then the model's own cap, then the computed bound.
pub fn resolve_cap(d: &DelayedGame, flag: Option<usize>) -> Result<usize> {
    if let Some(c) = flag.or(d.cap) {
        return Ok(c);
    }
    compute_schedule_bound(d)
        .bound
        .ok_or_else(|| Error::Unsupported("no cap given and the schedule bound is infinite".into()))
}

fn reduce_model(d: &DelayedGame, cap: Option<usize>) -> Result<(DelayedGame, Reduction)> {
    let completed = complete_deadlock_freedom(d)?;
    let cap = resolve_cap(&completed, cap)?;
    let red = reduce(&completed, cap, false)?;
    Ok((completed, red))
}

/// A solved model: the classical game actually solved and its solution.
pub struct ModelSolution {
    pub game: TimedGame,
    /// Set for delayed games, which are solved through their reduction.
    pub cap: Option<usize>,
    pub solution: Solution,
}

/// Solves a classical game directly and a delayed one through
/// completion and reduction; the fixed point is re-checked.
pub fn solve_model(m: &Model, objective: Objective, cap: Option<usize>) -> Result<ModelSolution> {
    let (game, cap) = match m {
        Model::Timed(g) => (g.clone(), None),
        Model::Delayed(d) => {
            let (_, red) = reduce_model(d, cap)?;
            (red.game, Some(red.cap))
        }
    };
    let solution = solve(&game, objective)?;
    check_fixed_point(&game, objective, &solution.winning_set)?;
    Ok(ModelSolution { game, cap, solution })
}

/// Stable short name of an error variant.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::UnknownClock(_) => "unknown-clock",
        Error::Dimension(..) => "dimension",
        Error::InvalidModel(_) => "invalid-model",
        Error::CapExceeded(_) => "cap-exceeded",
        Error::RunMapping(_) => "run-mapping",
        Error::StrategyFault(_) => "strategy-fault",
        Error::NotFixedPoint(_) => "not-fixed-point",
        Error::Audit(_) => "audit",
        Error::OraclePrecondition(_) => "oracle-precondition",
        Error::Unsupported(_) => "unsupported",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn verdict_code(winning: bool) -> i32 {
    if winning {
        0
    } else {
        1
    }
}

fn run_command(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate { model } => match check_model(&read(&model)?) {
            Ok(m) => {
                let a = m.automaton();
                writeln!(
                    out,
                    "ok: {} locations, {} edges, {} clocks",
                    a.locations.len(),
                    a.edges.len(),
                    a.clocks.len()
                )?;
                Ok(0)
            }
            Err(diags) => {
                for d in &diags {
                    writeln!(err, "{d}")?;
                }
                Ok(1)
            }
        },
        Command::Solve { model, objective, cap, output } => {
            let m = load(&model)?;
            let hash = game_hash(&m);
            let obj = Objective::from(objective);
            let ms = solve_model(&m, obj, cap)?;
            if let Some(c) = ms.cap {
                writeln!(out, "cap: {c}")?;
                writeln!(
                    out,
                    "reduced: {} locations, {} clocks",
                    ms.game.automaton.locations.len(),
                    ms.game.automaton.clock_count()
                )?;
            }
            let (game, cap, sol) = (ms.game, ms.cap, ms.solution);
            writeln!(out, "iterations: {}", sol.iterations())?;
            writeln!(out, "rules: {}", sol.strategy.rules.len())?;
            writeln!(out, "winning: {}", sol.winning)?;
            if let Some(p) = output {
                let file = sol.strategy.to_file(&game, hash, obj, cap);
                fs::write(p, serde_json::to_string_pretty(&file)? + "\n")?;
            }
            Ok(verdict_code(sol.winning))
        }
        Command::Reduce { model, cap, output, sidecar, full } => {
            let d = delayed(load(&model)?, "reduce")?;
            let completed = complete_deadlock_freedom(&d)?;
            let cap = resolve_cap(&completed, cap)?;
            let red = reduce(&completed, cap, full)?;
            fs::write(&output, write_model(&Model::Timed(red.game.clone())))?;
            let side = sidecar.unwrap_or_else(|| {
                let mut s = output.clone().into_os_string();
                s.push(".map.json");
                PathBuf::from(s)
            });
            fs::write(&side, serde_json::to_string_pretty(&red.sidecar(&completed))? + "\n")?;
            writeln!(out, "cap: {cap}")?;
            writeln!(out, "locations: {}", red.game.automaton.locations.len())?;
            writeln!(out, "edges: {}", red.game.automaton.edges.len())?;
            writeln!(out, "clocks: {}", red.game.automaton.clock_count())?;
            Ok(0)
        }
        Command::Embed { model, output } => {
            let g = match load(&model)? {
                Model::Timed(g) => g,
                Model::Delayed(_) => return Err(Error::Unsupported("embed needs a tg model".into())),
            };
            let emb = embed(&g)?;
            fs::write(&output, write_model(&Model::Delayed(emb.game.clone())))?;
            writeln!(out, "locations: {}", emb.game.automaton.locations.len())?;
            writeln!(out, "edges: {}", emb.game.automaton.edges.len())?;
            Ok(0)
        }
        Command::Bound { model } => {
            let d = delayed(load(&model)?, "bound")?;
            let b = compute_schedule_bound(&d);
            let show = |v: Option<String>| v.unwrap_or_else(|| "inf".into());
            writeln!(out, "tmin={}", show(b.tmin.map(|t| t.to_string())))?;
            writeln!(out, "smax={}", b.smax)?;
            writeln!(out, "dmax={}", b.dmax)?;
            writeln!(out, "bound={}", show(b.bound.map(|t| t.to_string())))?;
            writeln!(out, "cycles={}", b.cycles)?;
            Ok(if b.bound.is_some() { 0 } else { 1 })
        }
        Command::Simulate { model, strategy, env, script, seed, steps, grid, output } => {
            let m = load(&model)?;
            let hash = game_hash(&m);
            let file: Option<StrategyFile> = match &strategy {
                Some(p) => Some(serde_json::from_str(&read(p)?)?),
                None => None,
            };
            if let Some(f) = &file {
                if f.game_hash != hash {
                    return Err(Error::StrategyFault("strategy was computed for a different game".into()));
                }
            }
            let mut environment: Box<dyn Environment> = match env {
                EnvKind::Random => Box::new(RandomEnv::new(seed, grid)),
                EnvKind::Script => {
                    let p = script.ok_or_else(|| Error::Parse("--env script needs --script FILE".into()))?;
                    let entries: Vec<ScriptEntry> = serde_json::from_str(&read(&p)?)?;
                    let items = entries
                        .into_iter()
                        .map(|e| {
                            Ok(match e {
                                ScriptEntry::Delay(q) => ScriptItem::Delay(rational::parse(&q)?),
                                ScriptEntry::Edge(i) => ScriptItem::Edge(i),
                                ScriptEntry::Position(i) => ScriptItem::Position(i),
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Box::new(ScriptedEnv::new(items))
                }
            };
            writeln!(out, "# seed={seed} env={env:?} grid={grid} steps={steps}")?;
            let outcome = match m {
                Model::Delayed(d) => {
                    let cap = file.as_ref().and_then(|f| f.cap);
                    let (completed, red) = reduce_model(&d, cap)?;
                    let inner = match &file {
                        Some(f) => Strategy::from_file(&red.game, f)?,
                        None => Strategy::default(),
                    };
                    let mapped = MappedStrategy { reduction: &red, inner: &inner };
                    let strat: &dyn DelayedStrategy = if file.is_some() { &mapped } else { &AlwaysWait };
                    let o = simulate(&completed, strat, environment.as_mut(), initial_state(&completed), steps)?;
                    let hit = o.visits(|l| completed.is_target(l));
                    (o, hit)
                }
                Model::Timed(g) => {
                    let emb = embed(&g)?;
                    let inner = match &file {
                        Some(f) => Strategy::from_file(&g, f)?,
                        None => Strategy::default(),
                    };
                    let lifted = LiftedStrategy { embedding: &emb, inner: &inner };
                    let o = simulate(&emb.game, &lifted, environment.as_mut(), initial_state(&emb.game), steps)?;
                    let hit = o.visits(|l| emb.game.is_target(l));
                    (o, hit)
                }
            };
            let (o, hit) = outcome;
            let elapsed: Rational = o
                .run
                .steps
                .iter()
                .filter_map(|s| match s {
                    crate::semantics::DStep::Delay(q) => Some(q.clone()),
                    _ => None,
                })
                .sum();
            writeln!(out, "steps: {}", o.run.steps.len())?;
            writeln!(out, "time: {}", rational::format(&elapsed))?;
            writeln!(out, "end: {:?}", o.end)?;
            writeln!(out, "target reached: {hit}")?;
            let mut trace = Trace::from_run(&o.run);
            trace.game_hash = Some(hash);
            trace.seed = Some(seed);
            if let Some(p) = output {
                fs::write(p, serde_json::to_string_pretty(&trace)? + "\n")?;
            }
            Ok(0)
        }
        Command::Compile2cm { file, output, canonical } => {
            let m = TwoCounterMachine::parse(&read(&file)?)?;
            let cm = compile_2cm(&m)?;
            emit(output.as_deref(), &write_model(&Model::Delayed(cm.game.clone())), out)?;
            if let Some(budget) = canonical {
                let rep = canonical_simulate(&m, budget)?;
                let last = rep.boundaries.last().expect("line 0 is always entered");
                let msg = format!(
                    "canonical: instructions={} target={} line={} counters={:?} steps={}\n",
                    rep.boundaries.len() - 1,
                    rep.reached_target,
                    last.line,
                    last.counters,
                    rep.run.steps.len()
                );
                // Keep stdout a clean model file when it carries one.
                if output.is_some() {
                    out.write_all(msg.as_bytes())?;
                } else {
                    err.write_all(msg.as_bytes())?;
                }
            }
            Ok(0)
        }
        Command::Oracle { model, objective, granularity, cap } => {
            let g = match load(&model)? {
                Model::Timed(g) => g,
                Model::Delayed(d) => reduce_model(&d, cap)?.1.game,
            };
            let win = oracle_solve(&g, granularity, objective.into())?;
            writeln!(out, "granularity: {granularity}")?;
            writeln!(out, "winning: {win}")?;
            Ok(verdict_code(win))
        }
    }
}

/// Runs one command; returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match run_command(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let line = serde_json::json!({ "error": error_kind(&e), "message": e.to_string() });
            let _ = writeln!(err, "{line}");
            2
        }
    }
}
