use std::collections::BTreeSet;

use super::{Instr, TwoCounterMachine};
use crate::constraint::{Atom, ClockId, Constraint, Rel};
use crate::error::Result;
use crate::model::{complete_deadlock_freedom, Action, Automaton, DelayedGame, Edge, Location};

pub const SYMBOLS: [&str; 3] = ["Z", "O", "#"];

pub fn counter_symbol(i: u8) -> &'static str {
    SYMBOLS[usize::from(i)]
}

/// Role of a location in the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocKind {
    Line(usize),
    Init,
    Sink,
    /// Reload auxiliary: reschedules this action at once (invariant `x <= 0`).
    Reload(String),
    /// The increment's forced scheduling of the counter symbol.
    Push(String),
    /// The increment's free waiting location before scheduling `#`.
    Wait,
    /// Intermediate location of a decrement or jump.
    Middle,
}

#[derive(Clone, Debug)]
pub struct CompiledMachine {
    pub game: DelayedGame,
    pub kinds: Vec<LocKind>,
    pub init: usize,
    pub sink: usize,
}

impl CompiledMachine {
    pub fn line_location(&self, line: usize) -> usize {
        line
    }
}

struct Builder {
    locations: Vec<Location>,
    kinds: Vec<LocKind>,
    edges: Vec<Edge>,
    sink: usize,
}

fn x_le_zero() -> Constraint {
    Constraint::top().and(Atom::new(ClockId(0), Rel::Le, 0))
}

impl Builder {
    fn location(&mut self, name: String, invariant: Constraint, kind: LocKind) -> usize {
        self.locations.push(Location { name, invariant });
        self.kinds.push(kind);
        self.locations.len() - 1
    }

    fn edge(&mut self, source: usize, guard: Constraint, action: Action, reset: bool, target: usize) {
        let resets = if reset { vec![ClockId(0)] } else { Vec::new() };
        self.edges.push(Edge { source, guard, action, resets, target });
    }

    fn sink_edges(&mut self, from: usize) {
        for a in SYMBOLS {
            self.edge(from, Constraint::top(), Action::named(a), false, self.sink);
        }
    }

    fn loops(&mut self, at: usize) {
        for a in SYMBOLS {
            self.edge(at, Constraint::top(), Action::named(a), false, at);
        }
        for a in SYMBOLS {
            self.edge(at, Constraint::top(), Action::push(a, 1), false, at);
        }
    }

    /// Executes `a`, then reschedules it at the end.
    fn reload(&mut self, from: usize, to: usize, a: &str) {
        let name = format!("{}~r{a}~{}", self.locations[from].name, self.locations[to].name);
        let m = self.location(name, x_le_zero(), LocKind::Reload(a.into()));
        self.edge(from, Constraint::top(), Action::named(a), true, m);
        self.edge(m, Constraint::top(), Action::push(a, 1), false, to);
        self.sink_edges(m);
    }
}

pub fn compile_2cm(m: &TwoCounterMachine) -> Result<CompiledMachine> {
    let k = m.instructions.len();
    let mut b = Builder { locations: Vec::new(), kinds: Vec::new(), edges: Vec::new(), sink: k + 1 };
    for i in 0..k {
        b.location(i.to_string(), Constraint::top(), LocKind::Line(i));
    }
    let init = b.location("init".into(), Constraint::top(), LocKind::Init);
    let sink = b.location("sink".into(), Constraint::top(), LocKind::Sink);
    b.edge(init, x_le_zero(), Action::push("#", 1), false, 0);
    b.sink_edges(init);
    b.loops(sink);
    for (l, ins) in m.instructions.iter().enumerate() {
        match *ins {
            Instr::Stop => b.loops(l),
            Instr::Inc(i) => {
                b.reload(l, l, "Z");
                b.reload(l, l, "O");
                let m0 = b.location(format!("{l}~m0"), x_le_zero(), LocKind::Push(counter_symbol(i).into()));
                let m1 = b.location(format!("{l}~m1"), Constraint::top(), LocKind::Wait);
                b.edge(l, Constraint::top(), Action::named("#"), true, m0);
                b.edge(m0, Constraint::top(), Action::push(counter_symbol(i), 1), false, m1);
                b.edge(
                    m1,
                    Constraint::top().and(Atom::new(ClockId(0), Rel::Gt, 0)),
                    Action::push("#", 1),
                    false,
                    l + 1,
                );
                b.sink_edges(m0);
                b.sink_edges(m1);
            }
            Instr::Dec(i) => {
                let (c, o) = (counter_symbol(i), counter_symbol(1 - i));
                let mid = b.location(format!("{l}~m"), Constraint::top(), LocKind::Middle);
                b.reload(l, l, o);
                b.edge(l, Constraint::top(), Action::named(c), false, mid);
                b.reload(mid, mid, c);
                b.reload(mid, mid, o);
                b.reload(mid, l + 1, "#");
                b.reload(l, l + 1, "#");
            }
            Instr::IfZero { counter, then, other } => {
                let (c, o) = (counter_symbol(counter), counter_symbol(1 - counter));
                let mid = b.location(format!("{l}~m"), Constraint::top(), LocKind::Middle);
                b.reload(l, l, o);
                b.reload(l, mid, c);
                b.reload(mid, mid, c);
                b.reload(mid, mid, o);
                b.reload(mid, other, "#");
                b.reload(l, then, "#");
            }
        }
    }
    let d = DelayedGame {
        automaton: Automaton { clocks: vec!["x".into()], locations: b.locations, initial: init, edges: b.edges },
        control: SYMBOLS.iter().map(|s| s.to_string()).collect(),
        uncontrollable: BTreeSet::new(),
        delays: [1].into_iter().collect(),
        targets: [k - 1].into_iter().collect(),
        cap: None,
    };
    let game = complete_deadlock_freedom(&d)?;
    let mut kinds = b.kinds;
    kinds.resize(game.automaton.locations.len(), LocKind::Sink);
    Ok(CompiledMachine { game, kinds, init, sink })
}

/// Closed-form `(locations, edges)` of the compiled model.
pub fn gadget_counts(m: &TwoCounterMachine) -> (usize, usize) {
    let k = m.instructions.len();
    let (mut locs, mut edges) = (k + 2, 4 + 6);
    for ins in &m.instructions {
        let (l, e) = match ins {
            Instr::Stop => (0, 6),
            Instr::Inc(_) => (4, 19),
            Instr::Dec(_) => (6, 26),
            Instr::IfZero { .. } => (7, 30),
        };
        locs += l;
        edges += e;
    }
    (locs, edges)
}
