use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use super::{power, BudgetExceeded};
use crate::model::{ModelError, Rcgs1Model, StateId};
use crate::profile::Profile;

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpandError {
    #[error("explicit expansion refused: {0}")]
    BudgetExceeded(#[from] BudgetExceeded),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug)]
struct ExplicitState {
    name: String,
    label: Vec<String>,
    actions: usize,
    /// Successor per action tuple, tuples encoded in base `actions` with
    /// agent 1 as the most significant digit.
    delta: Vec<usize>,
}

/// The concurrent game structure a single-role model stands for, with one
/// transition per action tuple.
#[derive(Clone, Debug)]
pub struct ExplicitCgs {
    agents: usize,
    states: Vec<ExplicitState>,
}

/// A tuple and transposition on which the transition function is not
/// symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnonymityViolation {
    pub state: String,
    pub tuple: Vec<usize>,
    pub swapped: (usize, usize),
}

fn decode(mut code: usize, agents: usize, m: usize) -> Vec<usize> {
    let mut tuple = vec![0; agents];
    for slot in tuple.iter_mut().rev() {
        *slot = code % m;
        code /= m;
    }
    tuple
}

fn encode(tuple: &[usize], m: usize) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * m + a)
}

/// Expands `model`, refusing when the total number of tuples exceeds `budget`.
pub fn expand(model: &Rcgs1Model, budget: u128) -> Result<ExplicitCgs, ExpandError> {
    let n = model.agents() as usize;
    let needed = model
        .state_ids()
        .map(|q| power(model.actions(q), n))
        .fold(0u128, u128::saturating_add);
    if needed > budget {
        return Err(BudgetExceeded { needed, budget }.into());
    }
    let mut states = Vec::with_capacity(model.state_count());
    for q in model.state_ids() {
        let m = model.actions(q);
        let rows = power(m, n) as usize;
        let mut delta = Vec::with_capacity(rows);
        for code in 0..rows {
            let tuple = decode(code, n, m);
            let mut counts = vec![0u32; m];
            for &a in &tuple {
                counts[a] += 1;
            }
            delta.push(model.successor(q, &Profile::new(counts))?.index());
        }
        states.push(ExplicitState {
            name: model.name(q).to_owned(),
            label: model.label(q).iter().cloned().collect(),
            actions: m,
            delta,
        });
    }
    Ok(ExplicitCgs { agents: n, states })
}

impl ExplicitCgs {
    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn actions(&self, q: StateId) -> usize {
        self.states[q.index()].actions
    }

    /// Number of rows in the full transition table.
    pub fn transition_count(&self) -> usize {
        self.states.iter().map(|s| s.delta.len()).sum()
    }

    /// Successor of `q` under an action tuple (0-based actions, one per agent).
    pub fn delta(&self, q: StateId, tuple: &[usize]) -> StateId {
        let s = &self.states[q.index()];
        StateId(s.delta[encode(tuple, s.actions)])
    }

    fn swap_agrees(&self, q: usize, code: usize, i: usize, j: usize) -> Result<(), AnonymityViolation> {
        let s = &self.states[q];
        let mut tuple = decode(code, self.agents, s.actions);
        let before = s.delta[code];
        tuple.swap(i, j);
        if s.delta[encode(&tuple, s.actions)] == before {
            Ok(())
        } else {
            tuple.swap(i, j);
            Err(AnonymityViolation {
                state: s.name.clone(),
                tuple: tuple.iter().map(|a| a + 1).collect(),
                swapped: (i + 1, j + 1),
            })
        }
    }

    /// Checks every state, tuple and transposition.
    pub fn check_anonymity(&self) -> Result<(), AnonymityViolation> {
        for (q, s) in self.states.iter().enumerate() {
            for code in 0..s.delta.len() {
                for i in 0..self.agents {
                    for j in i + 1..self.agents {
                        self.swap_agrees(q, code, i, j)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks `samples` random (state, tuple, transposition) triples.
    pub fn check_anonymity_sampled<R: Rng>(&self, rng: &mut R, samples: usize) -> Result<(), AnonymityViolation> {
        if self.agents < 2 || self.states.is_empty() {
            return Ok(());
        }
        for _ in 0..samples {
            let q = rng.gen_range(0..self.states.len());
            let code = rng.gen_range(0..self.states[q].delta.len());
            let i = rng.gen_range(0..self.agents);
            let mut j = rng.gen_range(0..self.agents - 1);
            if j >= i {
                j += 1;
            }
            self.swap_agrees(q, code, i, j)?;
        }
        Ok(())
    }

    /// Serializable form with 1-based actions.
    pub fn to_doc(&self) -> ExplicitDoc {
        ExplicitDoc {
            agents: self.agents,
            states: self
                .states
                .iter()
                .map(|s| ExplicitStateDoc {
                    id: s.name.clone(),
                    label: s.label.clone(),
                    actions: s.actions,
                    transitions: s
                        .delta
                        .iter()
                        .enumerate()
                        .map(|(code, &to)| ExplicitRow {
                            tuple: decode(code, self.agents, s.actions).iter().map(|a| a + 1).collect(),
                            to: self.states[to].name.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExplicitDoc {
    pub agents: usize,
    pub states: Vec<ExplicitStateDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExplicitStateDoc {
    pub id: String,
    pub label: Vec<String>,
    pub actions: usize,
    pub transitions: Vec<ExplicitRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExplicitRow {
    pub tuple: Vec<usize>,
    pub to: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::figure1;
    use crate::model::ModelBuilder;

    #[test]
    fn three_agents_give_eight_rows_from_q0() {
        let m = figure1(3).unwrap();
        let e = expand(&m, DEFAULT_BUDGET).unwrap();
        let doc = e.to_doc();
        let q0 = doc.states.iter().find(|s| s.id == "q0").unwrap();
        assert_eq!(q0.transitions.len(), 8);
        assert_eq!(q0.transitions[0].tuple, vec![1, 1, 1]);
        e.check_anonymity().unwrap();
    }

    #[test]
    fn large_family_is_refused() {
        let m = figure1(10_000).unwrap();
        assert!(matches!(expand(&m, DEFAULT_BUDGET), Err(ExpandError::BudgetExceeded(_))));
    }

    #[test]
    fn one_action_single_state() {
        let m = ModelBuilder::new(2).sink("s", Vec::<String>::new()).build().unwrap();
        let e = expand(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.transition_count(), 1);
        assert_eq!(e.delta(StateId(0), &[0, 0]), StateId(0));
    }

    #[test]
    fn tampered_table_is_caught() {
        let m = figure1(3).unwrap();
        let mut e = expand(&m, DEFAULT_BUDGET).unwrap();
        // Tuple (1,1,2) and its transposition (1,2,1) must agree; break that.
        let q0 = m.state_id("q0").unwrap().index();
        let other = e.states[q0].delta[2];
        e.states[q0].delta[1] = (other + 1) % e.states.len();
        assert!(e.check_anonymity().is_err());
    }
}
