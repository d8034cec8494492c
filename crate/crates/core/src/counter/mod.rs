//! Two-counter machines and their encoding as delayed games with unbounded schedules.

mod canonical;
mod compile;


use std::fmt;

use crate::error::{Error, Result};

pub use canonical::{canonical_simulate, CanonicalReport, InstructionAudit};
pub use compile::{compile_2cm, gadget_counts, CompiledMachine, LocKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    Inc(u8),
    Dec(u8),
    IfZero { counter: u8, then: usize, other: usize },
    Stop,
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Inc(i) => write!(f, "INC {i}"),
            Instr::Dec(i) => write!(f, "DEC {i}"),
            Instr::IfZero { counter, then, other } => write!(f, "IFZ {counter} GOTO {then} ELSE {other}"),
            Instr::Stop => f.write_str("STOP"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCounterMachine {
    pub instructions: Vec<Instr>,
}

/// `(line, c0, c1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CmConfig {
    pub line: usize,
    pub counters: [u64; 2],
}

impl CmConfig {
    pub fn initial() -> CmConfig {
        CmConfig { line: 0, counters: [0, 0] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmRun {
    pub terminated: bool,
    pub steps: usize,
    /// Configurations from the initial one on.
    pub trace: Vec<CmConfig>,
}

impl CmRun {
    pub fn last(&self) -> CmConfig {
        *self.trace.last().unwrap()
    }
}

impl TwoCounterMachine {
    pub fn new(instructions: Vec<Instr>) -> Result<TwoCounterMachine> {
        let m = TwoCounterMachine { instructions };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let k = self.instructions.len();
        let bad = |m: String| Err(Error::InvalidModel(m));
        if self.instructions.last() != Some(&Instr::Stop) {
            return bad("the last instruction must be STOP".into());
        }
        for (i, ins) in self.instructions.iter().enumerate() {
            match ins {
                Instr::Stop if i + 1 != k => return bad(format!("line {i}: STOP before the last line")),
                Instr::Inc(c) | Instr::Dec(c) | Instr::IfZero { counter: c, .. } if *c > 1 => {
                    return bad(format!("line {i}: counter {c} does not exist"))
                }
                Instr::IfZero { then, other, .. } if *then >= k || *other >= k => {
                    return bad(format!("line {i}: jump target out of range"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// One instruction per line; blank lines and `//` comments are skipped.
    pub fn parse(text: &str) -> Result<TwoCounterMachine> {
        let mut instructions = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split("//").next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: `{line}`", n + 1));
            let w: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
            let counter = |s: &str| s.parse::<u8>().map_err(|_| bad());
            let ins = match w.as_slice() {
                ["INC", c] => Instr::Inc(counter(c)?),
                ["DEC", c] => Instr::Dec(counter(c)?),
                ["IFZ", c, "GOTO", a, "ELSE", b] => {
                    Instr::IfZero { counter: counter(c)?, then: num(a)?, other: num(b)? }
                }
                ["STOP"] => Instr::Stop,
                _ => return Err(bad()),
            };
            instructions.push(ins);
        }
        TwoCounterMachine::new(instructions)
    }

    pub fn to_text(&self) -> String {
        self.instructions.iter().map(|i| format!("{i}\n")).collect()
    }
}

/// `None` when halted.
pub fn cm_step(m: &TwoCounterMachine, c: &CmConfig) -> Option<CmConfig> {
    let mut next = *c;
    match m.instructions[c.line] {
        Instr::Stop => return None,
        Instr::Inc(i) => {
            next.counters[usize::from(i)] += 1;
            next.line += 1;
        }
        Instr::Dec(i) => {
            let v = &mut next.counters[usize::from(i)];
            *v = v.saturating_sub(1);
            next.line += 1;
        }
        Instr::IfZero { counter, then, other } => {
            next.line = if c.counters[usize::from(counter)] == 0 { then } else { other };
        }
    }
    Some(next)
}

pub fn cm_run(m: &TwoCounterMachine, max_steps: usize) -> CmRun {
    let mut trace = vec![CmConfig::initial()];
    for _ in 0..max_steps {
        match cm_step(m, trace.last().unwrap()) {
            Some(c) => trace.push(c),
            None => break,
        }
    }
    let last = *trace.last().unwrap();
    CmRun { terminated: m.instructions[last.line] == Instr::Stop, steps: trace.len() - 1, trace }
}
