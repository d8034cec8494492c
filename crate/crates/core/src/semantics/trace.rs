use serde::{Deserialize, Serialize};

use super::{DRun, DState, DStep};
use crate::rational::{serde_rational, Rational};

/// One step of a trace file; delays are exact rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TraceStep {
    Delay {
        #[serde(with = "serde_rational")]
        delay: Rational,
    },
    Uncontrolled {
        edge: usize,
    },
    Execute {
        edge: usize,
    },
    Schedule {
        edge: usize,
        position: usize,
    },
}

/// A run from the initial state, as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trace {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub steps: Vec<TraceStep>,
}

impl From<&DStep> for TraceStep {
    fn from(s: &DStep) -> TraceStep {
        match s {
            DStep::Delay(q) => TraceStep::Delay { delay: q.clone() },
            DStep::Uncontrolled(e) => TraceStep::Uncontrolled { edge: *e },
            DStep::Execute(e) => TraceStep::Execute { edge: *e },
            DStep::Schedule { edge, position } => TraceStep::Schedule { edge: *edge, position: *position },
        }
    }
}

impl From<&TraceStep> for DStep {
    fn from(s: &TraceStep) -> DStep {
        match s {
            TraceStep::Delay { delay } => DStep::Delay(delay.clone()),
            TraceStep::Uncontrolled { edge } => DStep::Uncontrolled(*edge),
            TraceStep::Execute { edge } => DStep::Execute(*edge),
            TraceStep::Schedule { edge, position } => DStep::Schedule { edge: *edge, position: *position },
        }
    }
}

impl Trace {
    pub fn from_run(run: &DRun) -> Trace {
        Trace { game_hash: None, seed: None, steps: run.steps.iter().map(TraceStep::from).collect() }
    }

    pub fn to_run(&self, start: DState) -> DRun {
        DRun { start, steps: self.steps.iter().map(DStep::from).collect() }
    }
}
