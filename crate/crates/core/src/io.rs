//! JSON documents for models and norms.
//!
//! Actions are 1-based in files and 0-based in memory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coalition::AgentId;
use crate::model::{ActionSet, Guard, ModelBuilder, ModelError, Rcgs1Model, StateId, TransitionSpec, MAX_ACTIONS};
use crate::norm::NormativeSystem;
use crate::profile::Profile;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{what}: {source}")]
    Json {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl LoadError {
    /// Line and column of a JSON syntax or shape error.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            LoadError::Json { source, .. } => Some((source.line(), source.column())),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub agents: u32,
    #[serde(default)]
    pub propositions: Vec<String>,
    pub states: Vec<StateDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub id: String,
    #[serde(default)]
    pub label: Vec<String>,
    pub actions: usize,
    pub transitions: TransitionsDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<TableRowDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<RuleDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRowDoc {
    pub profile: Vec<u32>,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub guards: Vec<GuardDoc>,
    pub to: String,
}

/// `max` defaults to the number of agents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuardDoc {
    pub action: usize,
    #[serde(default)]
    pub min: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormDoc {
    pub rules: Vec<NormRuleDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormRuleDoc {
    pub state: String,
    pub agents: Vec<AgentSpec>,
    pub forbid: Vec<usize>,
}

/// A single agent or an inclusive range written `"i-j"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AgentSpec {
    One(u32),
    Range(String),
}

impl AgentSpec {
    fn expand(&self) -> Result<std::ops::RangeInclusive<u32>, LoadError> {
        match self {
            AgentSpec::One(a) => Ok(*a..=*a),
            AgentSpec::Range(text) => {
                let bad = || LoadError::Format(format!("bad agent range `{text}`, expected \"i-j\""));
                let (lo, hi) = text.split_once('-').ok_or_else(bad)?;
                let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                Ok(lo..=hi)
            }
        }
    }
}

fn zero_based(action: usize, context: &str) -> Result<usize, LoadError> {
    if action == 0 || action > MAX_ACTIONS {
        Err(LoadError::Format(format!(
            "{context}: action {action} outside 1..{MAX_ACTIONS}"
        )))
    } else {
        Ok(action - 1)
    }
}

pub fn model_from_doc(doc: &ModelDoc) -> Result<Rcgs1Model, LoadError> {
    let mut b = ModelBuilder::new(doc.agents).propositions(doc.propositions.iter().cloned());
    for s in &doc.states {
        let t = &s.transitions;
        let default = t.default.as_deref();
        b = match (&t.table, &t.rules) {
            (Some(_), Some(_)) => {
                return Err(LoadError::Format(format!(
                    "state `{}` gives both a table and rules",
                    s.id
                )))
            }
            (Some(rows), None) => {
                let entries = rows
                    .iter()
                    .map(|r| (Profile::new(r.profile.clone()), r.to.clone()))
                    .collect();
                b.table_state(&s.id, s.label.iter().cloned(), s.actions, entries, default)
            }
            (None, rules) => {
                if rules.is_none() && default.is_none() {
                    return Err(LoadError::Format(format!(
                        "state `{}` needs a table, rules or a default",
                        s.id
                    )));
                }
                let mut out = Vec::new();
                for (i, r) in rules.iter().flatten().enumerate() {
                    let context = format!("state `{}` rule {}", s.id, i + 1);
                    let guards = r
                        .guards
                        .iter()
                        .map(|g| {
                            Ok(Guard::new(
                                zero_based(g.action, &context)?,
                                g.min,
                                g.max.unwrap_or(doc.agents),
                            ))
                        })
                        .collect::<Result<Vec<_>, LoadError>>()?;
                    out.push((guards, r.to.clone()));
                }
                b.rule_state(&s.id, s.label.iter().cloned(), s.actions, out, default)
            }
        };
    }
    Ok(b.build()?)
}

pub fn model_to_doc(model: &Rcgs1Model) -> ModelDoc {
    let name = |q| model.name(q).to_owned();
    ModelDoc {
        agents: model.agents(),
        propositions: model.propositions().iter().cloned().collect(),
        states: model
            .state_ids()
            .map(|q| {
                let st = model.state(q);
                let transitions = match &st.transitions {
                    TransitionSpec::Table { entries, default, .. } => TransitionsDoc {
                        table: Some(
                            entries
                                .iter()
                                .map(|(p, t)| TableRowDoc {
                                    profile: p.counts().to_vec(),
                                    to: name(*t),
                                })
                                .collect(),
                        ),
                        rules: None,
                        default: default.map(name),
                    },
                    TransitionSpec::Rules { rules, default } => TransitionsDoc {
                        table: None,
                        rules: (!rules.is_empty()).then(|| {
                            rules
                                .iter()
                                .map(|r| RuleDoc {
                                    guards: r
                                        .guards
                                        .iter()
                                        .map(|g| GuardDoc {
                                            action: g.action + 1,
                                            min: g.min,
                                            max: (g.max != model.agents()).then_some(g.max),
                                        })
                                        .collect(),
                                    to: name(r.target),
                                })
                                .collect()
                        }),
                        default: default.map(name),
                    },
                };
                StateDoc {
                    id: st.name.clone(),
                    label: st.label.iter().cloned().collect(),
                    actions: st.actions,
                    transitions,
                }
            })
            .collect(),
    }
}

pub fn norm_from_doc(model: &Rcgs1Model, doc: &NormDoc) -> Result<NormativeSystem, LoadError> {
    let mut norm = NormativeSystem::empty();
    for (i, rule) in doc.rules.iter().enumerate() {
        let context = format!("norm rule {}", i + 1);
        let q = model
            .state_id(&rule.state)
            .ok_or_else(|| LoadError::Format(format!("{context}: unknown state `{}`", rule.state)))?;
        let forbid = rule
            .forbid
            .iter()
            .map(|&a| zero_based(a, &context))
            .collect::<Result<ActionSet, _>>()?;
        for spec in &rule.agents {
            for agent in spec.expand()? {
                norm.forbid(q, AgentId(agent), forbid);
            }
        }
    }
    Ok(norm)
}

/// One rule per run of consecutive agents sharing a state and forbidden set.
pub fn norm_to_doc(model: &Rcgs1Model, norm: &NormativeSystem) -> NormDoc {
    let mut rules: Vec<(StateId, u32, u32, ActionSet)> = Vec::new();
    for (q, agent, set) in norm.entries() {
        match rules.last_mut() {
            Some((lq, _, hi, lset)) if *lq == q && *lset == set && *hi + 1 == agent.0 => *hi = agent.0,
            _ => rules.push((q, agent.0, agent.0, set)),
        }
    }
    NormDoc {
        rules: rules
            .into_iter()
            .map(|(q, lo, hi, set)| NormRuleDoc {
                state: model.name(q).to_owned(),
                agents: vec![if lo == hi {
                    AgentSpec::One(lo)
                } else {
                    AgentSpec::Range(format!("{lo}-{hi}"))
                }],
                forbid: set.iter().map(|a| a + 1).collect(),
            })
            .collect(),
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn parse_model(text: &str) -> Result<Rcgs1Model, LoadError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|source| LoadError::Json { what: "model", source })?;
    model_from_doc(&doc)
}

pub fn parse_norm(model: &Rcgs1Model, text: &str) -> Result<NormativeSystem, LoadError> {
    let doc: NormDoc = serde_json::from_str(text).map_err(|source| LoadError::Json { what: "norm", source })?;
    norm_from_doc(model, &doc)
}

pub fn load_model(path: &Path) -> Result<Rcgs1Model, LoadError> {
    parse_model(&read(path)?)
}

pub fn load_norm(model: &Rcgs1Model, path: &Path) -> Result<NormativeSystem, LoadError> {
    parse_norm(model, &read(path)?)
}

pub fn model_to_json(model: &Rcgs1Model) -> String {
    serde_json::to_string_pretty(&model_to_doc(model)).expect("documents always serialize")
}

pub fn norm_to_json(model: &Rcgs1Model, norm: &NormativeSystem) -> String {
    serde_json::to_string_pretty(&norm_to_doc(model, norm)).expect("documents always serialize")
}
