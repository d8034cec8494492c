//! JSON model files.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constraint::{parse_raw, ClockId, Constraint};
use crate::error::{Error, Result};
use crate::model::{Action, Automaton, DelayedGame, Diagnostic, Edge, Location, Model, TimedGame};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Tg,
    Tgdc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationEntry {
    pub name: String,
    #[serde(default)]
    pub invariant: String,
    #[serde(default)]
    pub initial: bool,
    #[serde(default)]
    pub target: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionsEntry {
    #[serde(default)]
    pub controllable: Vec<String>,
    #[serde(default)]
    pub uncontrollable: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delays: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: String,
    pub to: String,
    pub action: String,
    #[serde(default)]
    pub guard: String,
    #[serde(default)]
    pub resets: Vec<String>,
}

/// The on-disk shape of a model.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: Kind,
    #[serde(default)]
    pub clocks: Vec<String>,
    pub locations: Vec<LocationEntry>,
    #[serde(default)]
    pub actions: ActionsEntry,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

impl ModelFile {
    pub fn from_model(m: &Model) -> ModelFile {
        let a = m.automaton();
        let (kind, actions, targets, cap) = match m {
            Model::Timed(g) => (
                Kind::Tg,
                ActionsEntry {
                    controllable: g.controllable.iter().map(Action::to_string).collect(),
                    uncontrollable: g.uncontrollable.iter().map(Action::to_string).collect(),
                    delays: Vec::new(),
                },
                &g.targets,
                None,
            ),
            Model::Delayed(d) => (
                Kind::Tgdc,
                ActionsEntry {
                    controllable: d.control.iter().cloned().collect(),
                    uncontrollable: d.uncontrollable.iter().cloned().collect(),
                    delays: d.delays.iter().copied().collect(),
                },
                &d.targets,
                d.cap,
            ),
        };
        ModelFile {
            kind,
            clocks: a.clocks.clone(),
            locations: a
                .locations
                .iter()
                .enumerate()
                .map(|(i, l)| LocationEntry {
                    name: l.name.clone(),
                    invariant: l.invariant.display(&a.clocks).to_string(),
                    initial: i == a.initial,
                    target: targets.contains(&i),
                })
                .collect(),
            actions,
            edges: a
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    from: a.locations[e.source].name.clone(),
                    to: a.locations[e.target].name.clone(),
                    action: e.action.to_string(),
                    guard: e.guard.display(&a.clocks).to_string(),
                    resets: e.resets.iter().map(|c| a.clocks[c.0].clone()).collect(),
                })
                .collect(),
            cap,
        }
    }

    /// Resolves names; every unresolvable reference becomes one diagnostic.
    pub fn to_model(&self) -> std::result::Result<Model, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let clock = |name: &str| self.clocks.iter().position(|c| c == name).map(ClockId);
        let constraint = |diags: &mut Vec<Diagnostic>, subject: &str, text: &str| {
            let raw = match parse_raw(text) {
                Ok(r) => r,
                Err(e) => {
                    diags.push(Diagnostic::new(subject, e.to_string()));
                    return Constraint::top();
                }
            };
            for r in &raw {
                for name in std::iter::once(&r.clock).chain(r.other.as_ref()) {
                    if clock(name).is_none() {
                        diags.push(Diagnostic::new(subject, format!("unknown clock `{name}`")));
                        return Constraint::top();
                    }
                }
            }
            Constraint::parse(text, &self.clocks).expect("names checked")
        };

        let mut locations = Vec::new();
        let mut targets = BTreeSet::new();
        let initials: Vec<usize> =
            self.locations.iter().enumerate().filter(|(_, l)| l.initial).map(|(i, _)| i).collect();
        match initials.len() {
            1 => {}
            0 => diags.push(Diagnostic::new("model", "no initial location")),
            _ => diags.push(Diagnostic::new("model", "more than one initial location")),
        }
        for (i, l) in self.locations.iter().enumerate() {
            let invariant = constraint(&mut diags, &format!("location {}", l.name), &l.invariant);
            locations.push(Location { name: l.name.clone(), invariant });
            if l.target {
                targets.insert(i);
            }
        }
        let loc = |name: &str| self.locations.iter().position(|l| l.name == name);
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let subject = format!("edge {i} ({} -> {})", e.from, e.to);
            let (Some(source), Some(target)) = (loc(&e.from), loc(&e.to)) else {
                diags.push(Diagnostic::new(&subject, "unknown location"));
                continue;
            };
            let Some(action) = Action::parse(&e.action) else {
                diags.push(Diagnostic::new(&subject, format!("malformed action `{}`", e.action)));
                continue;
            };
            let guard = constraint(&mut diags, &subject, &e.guard);
            let mut resets = Vec::new();
            for r in &e.resets {
                match clock(r) {
                    Some(c) => resets.push(c),
                    None => diags.push(Diagnostic::new(&subject, format!("reset of unknown clock `{r}`"))),
                }
            }
            edges.push(Edge { source, guard, action, resets, target });
        }
        let automaton = Automaton {
            clocks: self.clocks.clone(),
            locations,
            initial: initials.first().copied().unwrap_or(0),
            edges,
        };
        let model = match self.kind {
            Kind::Tg => {
                if !self.actions.delays.is_empty() || self.cap.is_some() {
                    diags.push(Diagnostic::new("model", "delays and cap belong to tgdc models"));
                }
                let mut set = |names: &[String]| {
                    let mut out = BTreeSet::new();
                    for n in names {
                        match Action::parse(n) {
                            Some(a) => {
                                out.insert(a);
                            }
                            None => diags.push(Diagnostic::new("model", format!("malformed action `{n}`"))),
                        }
                    }
                    out
                };
                let controllable = set(&self.actions.controllable);
                let uncontrollable = set(&self.actions.uncontrollable);
                Model::Timed(TimedGame { automaton, controllable, uncontrollable, targets })
            }
            Kind::Tgdc => Model::Delayed(DelayedGame {
                automaton,
                control: self.actions.controllable.iter().cloned().collect(),
                uncontrollable: self.actions.uncontrollable.iter().cloned().collect(),
                delays: self.actions.delays.iter().copied().collect(),
                targets,
                cap: self.cap,
            }),
        };
        if diags.is_empty() {
            Ok(model)
        } else {
            Err(diags)
        }
    }
}

/// Parses model text and reports both file-level and model-level problems.
pub fn check_model(text: &str) -> std::result::Result<Model, Vec<Diagnostic>> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| vec![Diagnostic::new("file", e.to_string())])?;
    let model = file.to_model()?;
    let diags = model.validate();
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(diags)
    }
}

pub fn read_model(text: &str) -> Result<Model> {
    check_model(text)
        .map_err(|d| Error::InvalidModel(d.iter().map(Diagnostic::to_string).collect::<Vec<_>>().join("; ")))
}

pub fn write_model(m: &Model) -> String {
    let mut s = serde_json::to_string_pretty(&ModelFile::from_model(m)).expect("serializable");
    s.push('\n');
    s
}

/// SHA-256 over the compact canonical rendering.
pub fn game_hash(m: &Model) -> String {
    let compact = serde_json::to_string(&ModelFile::from_model(m)).expect("serializable");
    hex::encode(Sha256::digest(compact.as_bytes()))
}
