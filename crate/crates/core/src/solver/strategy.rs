use serde::{Deserialize, Serialize};

use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::model::{Action, TimedGame};
use crate::rational::Rational;
use crate::semantics::{Decision, Objective, TaState, TaStrategy};
use crate::zone::Dbm;

/// `None` is wait.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub location: usize,
    pub zone: Dbm,
    pub action: Option<Action>,
}

/// Ordered rules; the first match decides, and no match means wait.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    pub rules: Vec<Rule>,
}

impl Strategy {
    pub fn rule_for(&self, s: &TaState) -> Option<&Rule> {
        self.rules.iter().find(|r| r.location == s.location && r.zone.contains(&s.valuation).unwrap_or(false))
    }

    pub fn is_all_wait(&self) -> bool {
        self.rules.iter().all(|r| r.action.is_none())
    }

    pub fn to_file(&self, g: &TimedGame, game_hash: String, objective: Objective, cap: Option<usize>) -> StrategyFile {
        let a = &g.automaton;
        StrategyFile {
            game_hash,
            objective: match objective {
                Objective::Reach => "reach".into(),
                Objective::Safe => "safe".into(),
            },
            cap,
            rules: self
                .rules
                .iter()
                .map(|r| StrategyRule {
                    location: a.locations[r.location].name.clone(),
                    zone: r.zone.to_constraint().display(&a.clocks).to_string(),
                    decision: r.action.as_ref().map_or_else(|| "wait".to_string(), Action::to_string),
                })
                .collect(),
        }
    }

    pub fn from_file(g: &TimedGame, file: &StrategyFile) -> Result<Strategy> {
        let a = &g.automaton;
        let rules = file
            .rules
            .iter()
            .map(|r| {
                let location = a
                    .location_index(&r.location)
                    .ok_or_else(|| Error::Parse(format!("unknown location `{}`", r.location)))?;
                let zone = Dbm::from_constraint(&Constraint::parse(&r.zone, &a.clocks)?, a.clock_count())?;
                let action = if r.decision == "wait" {
                    None
                } else {
                    let act = Action::parse(&r.decision)
                        .ok_or_else(|| Error::Parse(format!("bad decision `{}`", r.decision)))?;
                    if !g.is_controllable(&act) {
                        return Err(Error::Parse(format!("`{act}` is not controllable")));
                    }
                    Some(act)
                };
                Ok(Rule { location, zone, action })
            })
            .collect::<Result<_>>()?;
        Ok(Strategy { rules })
    }
}

impl TaStrategy for Strategy {
    fn decide(&self, s: &TaState) -> Decision {
        match self.rule_for(s).and_then(|r| r.action.clone()) {
            Some(a) => Decision::Act(a),
            None => Decision::Wait,
        }
    }

    fn breakpoints(&self, s: &TaState) -> Vec<Rational> {
        let mut out = Vec::new();
        for r in self.rules.iter().filter(|r| r.location == s.location) {
            if let Some(w) = r.zone.delay_window(&s.valuation) {
                out.push(w.lo);
                if let Some((h, _)) = w.hi {
                    out.push(h);
                }
            }
        }
        out
    }
}

/// On-disk strategy paired with the game by content hash.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub game_hash: String,
    pub objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    pub rules: Vec<StrategyRule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyRule {
    pub location: String,
    pub zone: String,
    pub decision: String,
}
