//! Structural validation of models and norms.
//!
//! Violations are reported as data. Rule coverage is checked by enumerating
//! every full profile when there are few of them, and otherwise by splitting
//! count boxes against the rule guards so the cost does not depend on `n`.

use std::collections::HashSet;
use std::fmt;

use crate::coalition::AgentId;
use crate::model::{ActionSet, GuardedRule, Rcgs1Model, StateId, TransitionSpec, MAX_ACTIONS};
use crate::norm::NormativeSystem;
use crate::profile::{composition_count, compositions, Profile};

/// Unresolved profiles listed individually before summarising.
const MAX_LISTED: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoAgents,
    NoStates,
    DuplicateStateName(String),
    NoActions { state: String },
    TooManyActions { state: String, actions: usize },
    UnknownLabel { state: String, symbol: String },
    BadTarget { state: String, index: usize },
    GuardActionOutOfRange { state: String, rule: usize, action: usize, actions: usize },
    GuardBounds { state: String, rule: usize, min: u32, max: u32, agents: u32 },
    MalformedTableProfile { state: String, profile: String },
    DuplicateTableProfile { state: String, profile: String },
    UnresolvedProfile { state: String, profile: String },
    MoreUnresolved { state: String, count: u128 },
    IncompleteTable { state: String, covered: u128, total: u128 },
    NormStateOutOfRange { index: usize },
    NormAgentOutOfRange { agent: u32 },
    ForbiddenOutOfRange { state: String, agent: u32, action: usize },
    NoLegalAction { state: String, agent: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoAgents => write!(f, "model has no agents"),
            NoStates => write!(f, "model has no states"),
            DuplicateStateName(n) => write!(f, "duplicate state name {n}"),
            NoActions { state } => write!(f, "state {state} has no actions"),
            TooManyActions { state, actions } => {
                write!(f, "state {state} has {actions} actions (limit {MAX_ACTIONS})")
            }
            UnknownLabel { state, symbol } => {
                write!(f, "label symbol {symbol} at {state} not in propositions")
            }
            BadTarget { state, index } => write!(f, "state {state} targets unknown state #{index}"),
            GuardActionOutOfRange { state, rule, action, actions } => write!(
                f,
                "guard action out of range: rule {} at {state} names action {} (state has {actions})",
                rule + 1,
                action + 1
            ),
            GuardBounds { state, rule, min, max, agents } => write!(
                f,
                "guard bounds [{min},{max}] invalid in rule {} at {state} (n = {agents})",
                rule + 1
            ),
            MalformedTableProfile { state, profile } => {
                write!(f, "table profile {profile} at {state} has wrong length or sum")
            }
            DuplicateTableProfile { state, profile } => {
                write!(f, "table profile {profile} listed twice at {state}")
            }
            UnresolvedProfile { state, profile } => {
                write!(f, "profile {profile} unresolved at {state}")
            }
            MoreUnresolved { state, count } => {
                write!(f, "{count} more unresolved profiles at {state}")
            }
            IncompleteTable { state, covered, total } => write!(
                f,
                "table at {state} resolves {covered} of {total} profiles and has no default"
            ),
            NormStateOutOfRange { index } => write!(f, "norm names unknown state #{index}"),
            NormAgentOutOfRange { agent } => write!(f, "norm names agent {agent} outside the model"),
            ForbiddenOutOfRange { state, agent, action } => write!(
                f,
                "forbidden action {} out of range for agent {agent} at {state}",
                action + 1
            ),
            NoLegalAction { state, agent } => {
                write!(f, "no legal action for agent {agent} at {state}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    /// States with more full profiles than this are checked symbolically.
    pub exhaustive_threshold: u128,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            exhaustive_threshold: 10_000,
        }
    }
}

pub fn validate_model(model: &Rcgs1Model) -> ValidationReport {
    validate_model_with(model, ValidateOptions::default())
}

pub fn validate_model_with(model: &Rcgs1Model, opts: ValidateOptions) -> ValidationReport {
    let mut out = Vec::new();
    let n = model.agents();
    if n == 0 {
        out.push(Violation::NoAgents);
    }
    if model.state_count() == 0 {
        out.push(Violation::NoStates);
    }
    let mut seen = HashSet::new();
    for s in model.states() {
        if !seen.insert(s.name.as_str()) {
            out.push(Violation::DuplicateStateName(s.name.clone()));
        }
    }
    for (i, s) in model.states().iter().enumerate() {
        let q = StateId(i);
        let name = &s.name;
        for sym in &s.label {
            if !model.propositions().contains(sym) {
                out.push(Violation::UnknownLabel {
                    state: name.clone(),
                    symbol: sym.clone(),
                });
            }
        }
        for t in s.transitions.targets() {
            if t.0 >= model.state_count() {
                out.push(Violation::BadTarget {
                    state: name.clone(),
                    index: t.0,
                });
            }
        }
        if s.actions == 0 {
            out.push(Violation::NoActions { state: name.clone() });
            continue;
        }
        if s.actions > MAX_ACTIONS {
            out.push(Violation::TooManyActions {
                state: name.clone(),
                actions: s.actions,
            });
            continue;
        }
        let shape_ok = check_shape(model, q, &mut out);
        if shape_ok && n > 0 {
            check_coverage(model, q, opts, &mut out);
        }
    }
    ValidationReport { violations: out }
}

/// Guard ranges and table entries; returns whether coverage can be checked.
fn check_shape(model: &Rcgs1Model, q: StateId, out: &mut Vec<Violation>) -> bool {
    let s = model.state(q);
    let n = model.agents();
    let before = out.len();
    match &s.transitions {
        TransitionSpec::Rules { rules, .. } => {
            for (ri, rule) in rules.iter().enumerate() {
                for g in &rule.guards {
                    if g.action >= s.actions {
                        out.push(Violation::GuardActionOutOfRange {
                            state: s.name.clone(),
                            rule: ri,
                            action: g.action,
                            actions: s.actions,
                        });
                    }
                    if g.min > g.max || g.max > n {
                        out.push(Violation::GuardBounds {
                            state: s.name.clone(),
                            rule: ri,
                            min: g.min,
                            max: g.max,
                            agents: n,
                        });
                    }
                }
            }
        }
        TransitionSpec::Table { entries, .. } => {
            let mut seen = HashSet::new();
            for (p, _) in entries {
                if p.len() != s.actions || p.total() != u64::from(n) {
                    out.push(Violation::MalformedTableProfile {
                        state: s.name.clone(),
                        profile: p.to_string(),
                    });
                } else if !seen.insert(p) {
                    out.push(Violation::DuplicateTableProfile {
                        state: s.name.clone(),
                        profile: p.to_string(),
                    });
                }
            }
        }
    }
    out.len() == before
}

fn check_coverage(model: &Rcgs1Model, q: StateId, opts: ValidateOptions, out: &mut Vec<Violation>) {
    let s = model.state(q);
    if s.transitions.default_target().is_some() {
        return;
    }
    let n = model.agents();
    let total = composition_count(n, s.actions);
    if total <= opts.exhaustive_threshold {
        report_unresolved(
            &s.name,
            compositions(n, s.actions).filter(|p| s.transitions.resolve(p).is_none()),
            out,
        );
        return;
    }
    match &s.transitions {
        TransitionSpec::Table { lookup, .. } => {
            // Shape checks passed, so every key is a distinct full profile.
            let covered = lookup.len() as u128;
            if covered < total {
                out.push(Violation::IncompleteTable {
                    state: s.name.clone(),
                    covered,
                    total,
                });
            }
        }
        TransitionSpec::Rules { rules, .. } => {
            let mut witnesses = Vec::new();
            let region = Region::full(n, s.actions);
            uncovered(region, rules, n, &mut witnesses);
            report_unresolved(&s.name, witnesses.into_iter(), out);
        }
    }
}

fn report_unresolved(state: &str, unresolved: impl Iterator<Item = Profile>, out: &mut Vec<Violation>) {
    let mut extra: u128 = 0;
    for (i, p) in unresolved.enumerate() {
        if i < MAX_LISTED {
            out.push(Violation::UnresolvedProfile {
                state: state.to_owned(),
                profile: p.to_string(),
            });
        } else {
            extra += 1;
        }
    }
    if extra > 0 {
        out.push(Violation::MoreUnresolved {
            state: state.to_owned(),
            count: extra,
        });
    }
}

/// Per-action inclusive count bounds, intersected with `sum = n`.
#[derive(Clone, Debug)]
struct Region {
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl Region {
    fn full(n: u32, m: usize) -> Region {
        Region {
            lo: vec![0; m],
            hi: vec![n; m],
        }
    }

    /// Shrinks each bound to what is reachable on the hyperplane; `None` if empty.
    fn tighten(mut self, n: u32) -> Option<Region> {
        let n = u64::from(n);
        let sum_lo: u64 = self.lo.iter().map(|&x| u64::from(x)).sum();
        let sum_hi: u64 = self.hi.iter().map(|&x| u64::from(x)).sum();
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l > h) || sum_lo > n || sum_hi < n {
            return None;
        }
        for i in 0..self.lo.len() {
            let (l, h) = (u64::from(self.lo[i]), u64::from(self.hi[i]));
            let others_hi = sum_hi - h;
            let others_lo = sum_lo - l;
            self.lo[i] = l.max(n.saturating_sub(others_hi)) as u32;
            self.hi[i] = h.min(n - others_lo) as u32;
        }
        Some(self)
    }

    fn witness(&self, n: u32) -> Profile {
        let mut counts = self.lo.clone();
        let mut left = n - counts.iter().sum::<u32>();
        for (c, h) in counts.iter_mut().zip(&self.hi) {
            let add = left.min(h - *c);
            *c += add;
            left -= add;
        }
        Profile::new(counts)
    }

    fn clamp(&self, rule: &GuardedRule) -> Region {
        let mut r = self.clone();
        for g in &rule.guards {
            r.lo[g.action] = r.lo[g.action].max(g.min);
            r.hi[g.action] = r.hi[g.action].min(g.max);
        }
        r
    }
}

/// Collects one witness profile per uncovered sub-region, up to `MAX_LISTED + 1`.
fn uncovered(region: Region, rules: &[GuardedRule], n: u32, witnesses: &mut Vec<Profile>) {
    if witnesses.len() > MAX_LISTED {
        return;
    }
    let Some(region) = region.tighten(n) else {
        return;
    };
    for (ri, rule) in rules.iter().enumerate() {
        if region.clamp(rule).tighten(n).is_none() {
            continue;
        }
        // The rule meets the region. Find a guard that cuts it; if none, the
        // rule swallows the whole region.
        let cut = rule
            .guards
            .iter()
            .find(|g| region.lo[g.action] < g.min || region.hi[g.action] > g.max);
        let Some(g) = cut else {
            return;
        };
        let a = g.action;
        let mut pieces = Vec::with_capacity(3);
        if region.lo[a] < g.min {
            let mut below = region.clone();
            below.hi[a] = g.min - 1;
            pieces.push((below, ri + 1));
        }
        let mut inside = region.clone();
        inside.lo[a] = region.lo[a].max(g.min);
        inside.hi[a] = region.hi[a].min(g.max);
        pieces.push((inside, ri));
        if region.hi[a] > g.max {
            let mut above = region.clone();
            above.lo[a] = g.max + 1;
            pieces.push((above, ri + 1));
        }
        for (piece, from) in pieces {
            uncovered(piece, &rules[from..], n, witnesses);
        }
        return;
    }
    witnesses.push(region.witness(n));
}

pub fn validate_norm(model: &Rcgs1Model, norm: &NormativeSystem) -> ValidationReport {
    let mut out = Vec::new();
    let n = model.agents();
    for (q, agent, forbidden) in norm.entries() {
        if q.0 >= model.state_count() {
            out.push(Violation::NormStateOutOfRange { index: q.0 });
            continue;
        }
        if agent.0 == 0 || agent.0 > n {
            out.push(Violation::NormAgentOutOfRange { agent: agent.0 });
            continue;
        }
        let s = model.state(q);
        for action in forbidden.difference(ActionSet::all(s.actions)).iter() {
            out.push(Violation::ForbiddenOutOfRange {
                state: s.name.clone(),
                agent: agent.0,
                action,
            });
        }
    }
    // Legality only fails where some entry exists, so scanning entries suffices.
    for (q, AgentId(a), _) in norm.entries() {
        if q.0 < model.state_count() && a >= 1 && a <= n {
            let s = model.state(q);
            if norm.legal(q, AgentId(a), s.actions).is_empty() {
                out.push(Violation::NoLegalAction {
                    state: s.name.clone(),
                    agent: a,
                });
            }
        }
    }
    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalition::Coalition;
    use crate::family::figure1;
    use crate::model::{Guard, ModelBuilder};
    use proptest::prelude::*;

    fn no_label() -> Vec<String> {
        Vec::new()
    }

    #[test]
    fn figure1_is_valid() {
        assert!(validate_model(&figure1(10).unwrap()).is_valid());
        assert!(validate_model(&figure1(10_000).unwrap()).is_valid());
    }

    #[test]
    fn single_profile_unresolved() {
        let m = ModelBuilder::new(4)
            .rule_state("q0", no_label(), 1, Vec::new(), None)
            .build()
            .unwrap();
        assert_eq!(validate_model(&m).messages(), vec!["profile (4) unresolved at q0"]);
    }

    #[test]
    fn guard_out_of_range() {
        let m = ModelBuilder::new(2)
            .rule_state("q0", no_label(), 2, vec![(vec![Guard::new(2, 0, 1)], "q0".into())], Some("q0"))
            .build()
            .unwrap();
        let msgs = validate_model(&m).messages();
        assert_eq!(msgs.len(), 1);
        assert!(msgs[0].starts_with("guard action out of range"), "{msgs:?}");
    }

    #[test]
    fn duplicate_names_and_labels() {
        let m = ModelBuilder::new(1)
            .proposition("p")
            .sink("q", ["p"])
            .sink("q", ["zz"])
            .build()
            .unwrap();
        let msgs = validate_model(&m).messages();
        assert!(msgs.contains(&"duplicate state name q".to_string()));
        assert!(msgs.contains(&"label symbol zz at q not in propositions".to_string()));
    }

    #[test]
    fn table_problems() {
        let m = ModelBuilder::new(2)
            .table_state(
                "q0",
                no_label(),
                2,
                vec![
                    (Profile::new(vec![1, 1]), "q0".into()),
                    (Profile::new(vec![1, 1]), "q0".into()),
                    (Profile::new(vec![3, 0]), "q0".into()),
                ],
                None,
            )
            .build()
            .unwrap();
        let v = validate_model(&m).violations;
        assert!(v.iter().any(|x| matches!(x, Violation::DuplicateTableProfile { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::MalformedTableProfile { .. })));
    }

    #[test]
    fn symbolic_coverage_finds_gap() {
        // Rules cover a1 <= 400 and a1 >= 600; the middle band is open.
        let n = 1000;
        let m = ModelBuilder::new(n)
            .rule_state(
                "q0",
                no_label(),
                2,
                vec![
                    (vec![Guard::new(0, 0, 400)], "q0".into()),
                    (vec![Guard::new(0, 600, n)], "q0".into()),
                ],
                None,
            )
            .build()
            .unwrap();
        let opts = ValidateOptions { exhaustive_threshold: 10 };
        let report = validate_model_with(&m, opts);
        assert_eq!(report.messages(), vec!["profile (599,401) unresolved at q0"]);
    }

    #[test]
    fn norm_examples() {
        let m = figure1(10).unwrap();
        let q0 = m.state_id("q0").unwrap();
        assert!(validate_norm(&m, &NormativeSystem::empty()).is_valid());

        let mut eta = NormativeSystem::empty();
        eta.forbid_all(q0, &Coalition::from_indices([9, 10]), ActionSet::singleton(1));
        assert!(validate_norm(&m, &eta).is_valid());

        let mut bad = NormativeSystem::empty();
        bad.forbid(q0, AgentId(1), ActionSet::all(2));
        assert_eq!(validate_norm(&m, &bad).messages(), vec!["no legal action for agent 1 at q0"]);

        let mut range = NormativeSystem::empty();
        range.forbid(q0, AgentId(1), ActionSet::singleton(4));
        range.forbid(q0, AgentId(11), ActionSet::singleton(0));
        let msgs = validate_norm(&m, &range).messages();
        assert_eq!(msgs.len(), 2, "{msgs:?}");
    }

    fn arb_rules(n: u32, m: usize) -> impl Strategy<Value = Vec<Vec<Guard>>> {
        let guard = (0..m, 0..=n, 0..=n).prop_map(|(a, x, y)| Guard::new(a, x.min(y), x.max(y)));
        prop::collection::vec(prop::collection::vec(guard, 0..3), 0..5)
    }

    proptest! {
        #[test]
        fn symbolic_and_exhaustive_coverage_agree(
            n in 1u32..7,
            m in 1usize..4,
            rules in arb_rules(6, 3),
        ) {
            let rules: Vec<(Vec<Guard>, String)> = rules
                .into_iter()
                .map(|gs| (gs.into_iter().filter(|g| g.action < m && g.max <= n).collect(), "q0".to_string()))
                .collect();
            let model = ModelBuilder::new(n)
                .rule_state("q0", Vec::<String>::new(), m, rules, None)
                .build()
                .unwrap();
            let exhaustive = validate_model_with(&model, ValidateOptions { exhaustive_threshold: u128::MAX });
            let symbolic = validate_model_with(&model, ValidateOptions { exhaustive_threshold: 0 });
            prop_assert_eq!(exhaustive.is_valid(), symbolic.is_valid());
            // Every symbolic witness really is unresolved.
            for v in &symbolic.violations {
                if let Violation::UnresolvedProfile { profile, .. } = v {
                    let listed = exhaustive.violations.iter().any(|e| matches!(e, Violation::UnresolvedProfile { profile: p, .. } if p == profile))
                        || exhaustive.violations.iter().any(|e| matches!(e, Violation::MoreUnresolved { .. }));
                    prop_assert!(listed, "witness {} not unresolved", profile);
                }
            }
        }
    }
}
