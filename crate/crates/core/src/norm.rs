//! Normative systems: per-(state, agent) sets of forbidden actions.

use std::collections::BTreeMap;

use crate::coalition::{AgentId, Coalition};
use crate::model::{ActionSet, StateId};

/// Sparse map `(q, a) -> forbidden actions`; absent pairs forbid nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormativeSystem {
    forbids: BTreeMap<(StateId, AgentId), ActionSet>,
}

impl NormativeSystem {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Adds to the forbidden set of `(q, agent)`; repeated calls union.
    pub fn forbid(&mut self, q: StateId, agent: AgentId, actions: ActionSet) {
        if actions.is_empty() {
            return;
        }
        let entry = self.forbids.entry((q, agent)).or_default();
        *entry = entry.union(actions);
    }

    /// Forbids `actions` for every member of `agents` at `q`.
    pub fn forbid_all(&mut self, q: StateId, agents: &Coalition, actions: ActionSet) {
        for a in agents.iter() {
            self.forbid(q, a, actions);
        }
    }

    pub fn forbidden(&self, q: StateId, agent: AgentId) -> ActionSet {
        self.forbids.get(&(q, agent)).copied().unwrap_or_default()
    }

    /// Actions available to `agent` at a state with `actions` actions.
    pub fn legal(&self, q: StateId, agent: AgentId, actions: usize) -> ActionSet {
        ActionSet::all(actions).difference(self.forbidden(q, agent))
    }

    pub fn is_empty(&self) -> bool {
        self.forbids.is_empty()
    }

    /// Non-empty entries in `(state, agent)` order.
    pub fn entries(&self) -> impl Iterator<Item = (StateId, AgentId, ActionSet)> + '_ {
        self.forbids.iter().map(|(&(q, a), &s)| (q, a, s))
    }

    /// `η↾C`: keep entries of agents in `coalition`, drop the rest.
    pub fn restrict(&self, coalition: &Coalition) -> NormativeSystem {
        NormativeSystem {
            forbids: self
                .forbids
                .iter()
                .filter(|((_, a), _)| coalition.contains(*a))
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    /// True when every forbidden set of `self` is contained in the one of `other`.
    pub fn weaker_than(&self, other: &NormativeSystem) -> bool {
        self.entries()
            .all(|(q, a, s)| s.is_subset(other.forbidden(q, a)))
    }
}

/// Free-function form of [`NormativeSystem::restrict`].
pub fn restrict_norm(norm: &NormativeSystem, coalition: &Coalition) -> NormativeSystem {
    norm.restrict(coalition)
}
