//! Single-role concurrent game structures.
//!
//! Transitions depend only on how many agents take each action, so a model
//! stores, per state, an action count and a rule that maps count vectors to
//! successor states.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::coalition::Coalition;
use crate::profile::Profile;

/// Dense index of a state in its model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Upper bound on actions per state. Action subsets are `u64` bitmasks and
/// the Hall test walks all `2^m` of them.
pub const MAX_ACTIONS: usize = 32;

/// A set of 0-based action indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSet(u64);

impl ActionSet {
    pub const EMPTY: ActionSet = ActionSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ActionSet(bits)
    }

    /// `{0, .., m-1}`.
    pub fn all(m: usize) -> Self {
        if m >= 64 {
            ActionSet(u64::MAX)
        } else {
            ActionSet((1u64 << m) - 1)
        }
    }

    pub fn singleton(action: usize) -> Self {
        ActionSet(1u64 << action)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, action: usize) -> bool {
        action < 64 && self.0 & (1u64 << action) != 0
    }

    pub fn insert(&mut self, action: usize) {
        self.0 |= 1u64 << action;
    }

    pub fn union(self, other: ActionSet) -> ActionSet {
        ActionSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ActionSet) -> ActionSet {
        ActionSet(self.0 & other.0)
    }

    pub fn difference(self, other: ActionSet) -> ActionSet {
        ActionSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: ActionSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits & (1u64 << i) != 0)
    }
}

impl FromIterator<usize> for ActionSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ActionSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

/// Prints 1-based action indices, e.g. `{1,3}`.
impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|a| (a + 1).to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Inclusive bounds on the number of agents taking one action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    /// 0-based action index.
    pub action: usize,
    pub min: u32,
    pub max: u32,
}

impl Guard {
    pub fn new(action: usize, min: u32, max: u32) -> Self {
        Guard { action, min, max }
    }
}

/// A conjunction of count guards and the state it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedRule {
    pub guards: Vec<Guard>,
    pub target: StateId,
}

impl GuardedRule {
    /// Guards on actions the profile does not have never match.
    pub fn matches(&self, profile: &Profile) -> bool {
        self.guards.iter().all(|g| {
            g.action < profile.len() && (g.min..=g.max).contains(&profile.get(g.action))
        })
    }
}

#[derive(Clone, Debug)]
pub enum TransitionSpec {
    Table {
        entries: Vec<(Profile, StateId)>,
        default: Option<StateId>,
        lookup: HashMap<Profile, StateId>,
    },
    /// First matching rule wins; `default` catches the rest.
    Rules {
        rules: Vec<GuardedRule>,
        default: Option<StateId>,
    },
}

impl TransitionSpec {
    /// Earlier entries win when a profile is listed twice.
    pub fn table(entries: Vec<(Profile, StateId)>, default: Option<StateId>) -> Self {
        let mut lookup = HashMap::with_capacity(entries.len());
        for (p, t) in &entries {
            lookup.entry(p.clone()).or_insert(*t);
        }
        TransitionSpec::Table {
            entries,
            default,
            lookup,
        }
    }

    pub fn rules(rules: Vec<GuardedRule>, default: Option<StateId>) -> Self {
        TransitionSpec::Rules { rules, default }
    }

    /// Every profile goes to `target`.
    pub fn constant(target: StateId) -> Self {
        TransitionSpec::rules(Vec::new(), Some(target))
    }

    pub fn default_target(&self) -> Option<StateId> {
        match self {
            TransitionSpec::Table { default, .. } | TransitionSpec::Rules { default, .. } => {
                *default
            }
        }
    }

    pub fn resolve(&self, profile: &Profile) -> Option<StateId> {
        match self {
            TransitionSpec::Table {
                lookup, default, ..
            } => lookup.get(profile).copied().or(*default),
            TransitionSpec::Rules { rules, default } => rules
                .iter()
                .find(|r| r.matches(profile))
                .map(|r| r.target)
                .or(*default),
        }
    }

    /// Every state id this spec can produce.
    pub fn targets(&self) -> Vec<StateId> {
        let mut out: Vec<StateId> = match self {
            TransitionSpec::Table { entries, .. } => entries.iter().map(|(_, t)| *t).collect(),
            TransitionSpec::Rules { rules, .. } => rules.iter().map(|r| r.target).collect(),
        };
        out.extend(self.default_target());
        out
    }
}

#[derive(Clone, Debug)]
pub struct State {
    pub name: String,
    pub label: BTreeSet<String>,
    pub actions: usize,
    pub transitions: TransitionSpec,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("profile {profile} unresolved at {state}")]
    Unresolved { state: String, profile: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateIndex(usize),
    #[error("profile {profile} has wrong shape for {state} ({actions} actions, {agents} agents)")]
    BadProfile {
        state: String,
        profile: String,
        actions: usize,
        agents: u32,
    },
}

/// A single-role concurrent game structure over agents `1..=n`.
///
/// Construction does not validate; run [`crate::validate::validate_model`]
/// before checking formulas.
#[derive(Clone, Debug)]
pub struct Rcgs1Model {
    agents: u32,
    propositions: BTreeSet<String>,
    states: Vec<State>,
    by_name: HashMap<String, StateId>,
}

impl Rcgs1Model {
    /// Duplicate names are kept (validation reports them); lookups by name
    /// find the first occurrence.
    pub fn new(agents: u32, propositions: BTreeSet<String>, states: Vec<State>) -> Self {
        let mut by_name = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            by_name.entry(s.name.clone()).or_insert(StateId(i));
        }
        Rcgs1Model {
            agents,
            propositions,
            states,
            by_name,
        }
    }

    pub fn agents(&self) -> u32 {
        self.agents
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::grand(self.agents)
    }

    pub fn propositions(&self) -> &BTreeSet<String> {
        &self.propositions
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: StateId) -> &str {
        &self.states[id.0].name
    }

    pub fn actions(&self, id: StateId) -> usize {
        self.states[id.0].actions
    }

    pub fn label(&self, id: StateId) -> &BTreeSet<String> {
        &self.states[id.0].label
    }

    /// The state a full profile at `q` leads to.
    pub fn successor(&self, q: StateId, profile: &Profile) -> Result<StateId, ModelError> {
        let state = self.states.get(q.0).ok_or(ModelError::StateIndex(q.0))?;
        if profile.len() != state.actions || profile.total() != u64::from(self.agents) {
            return Err(ModelError::BadProfile {
                state: state.name.clone(),
                profile: profile.to_string(),
                actions: state.actions,
                agents: self.agents,
            });
        }
        state
            .transitions
            .resolve(profile)
            .ok_or_else(|| ModelError::Unresolved {
                state: state.name.clone(),
                profile: profile.to_string(),
            })
    }
}

/// Name-based construction helper; targets are resolved at [`ModelBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    agents: u32,
    propositions: BTreeSet<String>,
    states: Vec<PendingState>,
}

#[derive(Clone, Debug)]
struct PendingState {
    name: String,
    label: BTreeSet<String>,
    actions: usize,
    transitions: PendingTransitions,
}

#[derive(Clone, Debug)]
enum PendingTransitions {
    Table(Vec<(Profile, String)>, Option<String>),
    Rules(Vec<(Vec<Guard>, String)>, Option<String>),
}

impl ModelBuilder {
    pub fn new(agents: u32) -> Self {
        ModelBuilder {
            agents,
            ..Default::default()
        }
    }

    pub fn proposition(mut self, p: impl Into<String>) -> Self {
        self.propositions.insert(p.into());
        self
    }

    pub fn propositions<I, S>(mut self, ps: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.propositions.extend(ps.into_iter().map(Into::into));
        self
    }

    /// A state driven by guarded rules (guards use 0-based actions).
    pub fn rule_state<L, S>(
        mut self,
        name: impl Into<String>,
        label: L,
        actions: usize,
        rules: Vec<(Vec<Guard>, String)>,
        default: Option<&str>,
    ) -> Self
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.push(PendingState {
            name: name.into(),
            label: label.into_iter().map(Into::into).collect(),
            actions,
            transitions: PendingTransitions::Rules(rules, default.map(str::to_owned)),
        });
        self
    }

    pub fn table_state<L, S>(
        mut self,
        name: impl Into<String>,
        label: L,
        actions: usize,
        entries: Vec<(Profile, String)>,
        default: Option<&str>,
    ) -> Self
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.push(PendingState {
            name: name.into(),
            label: label.into_iter().map(Into::into).collect(),
            actions,
            transitions: PendingTransitions::Table(entries, default.map(str::to_owned)),
        });
        self
    }

    /// A one-action state that loops to itself.
    pub fn sink<L, S>(self, name: impl Into<String>, label: L) -> Self
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let me = name.clone();
        self.rule_state(name, label, 1, Vec::new(), Some(&me))
    }

    pub fn build(self) -> Result<Rcgs1Model, ModelError> {
        let mut by_name: HashMap<&str, StateId> = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            by_name.entry(s.name.as_str()).or_insert(StateId(i));
        }
        let resolve = |n: &str| {
            by_name
                .get(n)
                .copied()
                .ok_or_else(|| ModelError::UnknownState(n.to_owned()))
        };
        let mut states = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let transitions = match &s.transitions {
                PendingTransitions::Table(entries, default) => {
                    let entries = entries
                        .iter()
                        .map(|(p, t)| Ok((p.clone(), resolve(t)?)))
                        .collect::<Result<Vec<_>, ModelError>>()?;
                    let default = default.as_deref().map(resolve).transpose()?;
                    TransitionSpec::table(entries, default)
                }
                PendingTransitions::Rules(rules, default) => {
                    let rules = rules
                        .iter()
                        .map(|(guards, t)| {
                            Ok(GuardedRule {
                                guards: guards.clone(),
                                target: resolve(t)?,
                            })
                        })
                        .collect::<Result<Vec<_>, ModelError>>()?;
                    let default = default.as_deref().map(resolve).transpose()?;
                    TransitionSpec::rules(rules, default)
                }
            };
            states.push(State {
                name: s.name.clone(),
                label: s.label.clone(),
                actions: s.actions,
                transitions,
            });
        }
        Ok(Rcgs1Model::new(self.agents, self.propositions, states))
    }
}
