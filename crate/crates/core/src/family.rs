//! The two-task coordination model, parameterised by the number of agents.
//!
//! Action 1 contributes to task `p1`, action 2 to task `p2`. Task `p1`
//! succeeds when 80–90 % of the agents pick action 1, task `p2` when 20–60 %
//! pick action 2. From `q0` every profile moves to an absorbing outcome state.
//!
//! When `n` is a multiple of ten there is one outcome state `q{i}_{j}` per
//! decile split (`i` percent on action 1, `j = 100 - i` on action 2). Splits
//! that fall between deciles go to band states `q_p1p2`, `q_p1`, `q_p2`, and
//! everything else to `q_else`.

use thiserror::Error;

use crate::coalition::Coalition;
use crate::model::{ActionSet, Guard, ModelBuilder, Rcgs1Model};
use crate::norm::NormativeSystem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("the coordination family needs at least one agent")]
    NoAgents,
    #[error("{0} agents is not a multiple of 10")]
    NotMultipleOfTen(u32),
}

/// Smallest count that is at least `pct` percent of `n`.
fn ceil_pct(n: u32, pct: u32) -> u32 {
    ((u64::from(n) * u64::from(pct)).div_ceil(100)) as u32
}

/// Largest count that is at most `pct` percent of `n`.
fn floor_pct(n: u32, pct: u32) -> u32 {
    (u64::from(n) * u64::from(pct) / 100) as u32
}

fn labels(p1: bool, p2: bool) -> Vec<&'static str> {
    let mut l = Vec::new();
    if p1 {
        l.push("p1");
    }
    if p2 {
        l.push("p2");
    }
    l
}

pub fn figure1(n: u32) -> Result<Rcgs1Model, FamilyError> {
    if n == 0 {
        return Err(FamilyError::NoAgents);
    }
    let p1 = (ceil_pct(n, 80), floor_pct(n, 90));
    let p2 = (ceil_pct(n, 20), floor_pct(n, 60));
    let in_band = |c: u32, band: (u32, u32)| band.0 <= c && c <= band.1;

    let mut rules = Vec::new();
    let mut sinks = Vec::new();
    if n.is_multiple_of(10) {
        for decile in 0..=10u32 {
            let on_first = n / 10 * decile;
            let name = format!("q{}_{}", decile * 10, 100 - decile * 10);
            rules.push((vec![Guard::new(0, on_first, on_first)], name.clone()));
            sinks.push((name, labels(in_band(on_first, p1), in_band(n - on_first, p2))));
        }
    }
    let band = |b: (u32, u32), action: usize| (b.0 <= b.1).then(|| Guard::new(action, b.0, b.1));
    if let (Some(g1), Some(g2)) = (band(p1, 0), band(p2, 1)) {
        rules.push((vec![g1, g2], "q_p1p2".to_string()));
    }
    if let Some(g) = band(p1, 0) {
        rules.push((vec![g], "q_p1".to_string()));
    }
    if let Some(g) = band(p2, 1) {
        rules.push((vec![g], "q_p2".to_string()));
    }
    sinks.push(("q_p1p2".into(), labels(true, true)));
    sinks.push(("q_p1".into(), labels(true, false)));
    sinks.push(("q_p2".into(), labels(false, true)));
    sinks.push(("q_else".into(), labels(false, false)));

    let mut b = ModelBuilder::new(n)
        .propositions(["p1", "p2"])
        .rule_state("q0", Vec::<String>::new(), 2, rules, Some("q_else"));
    for (name, label) in sinks {
        b = b.sink(name, label);
    }
    Ok(b.build().expect("family targets are all declared"))
}

fn tenths(n: u32, from: u32, to: u32) -> Coalition {
    Coalition::range(n / 10 * from + 1, n / 10 * to)
}

/// The top fifth of the agents, the ones the first norm constrains.
pub fn obedient_fifth(n: u32) -> Result<Coalition, FamilyError> {
    check_tens(n)?;
    Ok(tenths(n, 8, 10))
}

fn check_tens(n: u32) -> Result<(), FamilyError> {
    if n == 0 {
        Err(FamilyError::NoAgents)
    } else if !n.is_multiple_of(10) {
        Err(FamilyError::NotMultipleOfTen(n))
    } else {
        Ok(())
    }
}

/// Forbids action 2 at `q0` for agents `0.8n+1..=n`.
pub fn norm_eta(model: &Rcgs1Model) -> Result<NormativeSystem, FamilyError> {
    let n = model.agents();
    check_tens(n)?;
    let q0 = model.state_id("q0").expect("family model has q0");
    let mut eta = NormativeSystem::empty();
    eta.forbid_all(q0, &tenths(n, 8, 10), ActionSet::singleton(1));
    Ok(eta)
}

/// Forbids action 2 at `q0` for agents `0.6n+1..=0.8n` and action 1 for
/// agents `0.8n+1..=0.9n`.
pub fn norm_eta_prime(model: &Rcgs1Model) -> Result<NormativeSystem, FamilyError> {
    let n = model.agents();
    check_tens(n)?;
    let q0 = model.state_id("q0").expect("family model has q0");
    let mut eta = NormativeSystem::empty();
    eta.forbid_all(q0, &tenths(n, 6, 8), ActionSet::singleton(1));
    eta.forbid_all(q0, &tenths(n, 8, 9), ActionSet::singleton(0));
    Ok(eta)
}

/// Named formula texts for the coordination scenario at `n` agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioQueries {
    /// Grand coalition can force both tasks (empty norm).
    pub grand: String,
    /// Under the first norm, the last 40 % cannot avoid both tasks.
    pub dual: String,
    /// Under the second norm, the first 60 % can pick either task.
    pub choice: String,
    /// Without norms, the last 40 % can block task `p1`.
    pub block: String,
}

pub fn scenario_queries(n: u32) -> Result<ScenarioQueries, FamilyError> {
    check_tens(n)?;
    let t = n / 10;
    Ok(ScenarioQueries {
        grand: "<<all>> X (p1 & p2)".into(),
        dual: format!("[{}] [[{}]] X (p1 & p2)", tenths(n, 8, 10), tenths(n, 6, 10)),
        choice: format!(
            "[{c}] (<<{a}>> X p1 & <<{a}>> X p2)",
            c = tenths(n, 6, 9),
            a = Coalition::range(1, 6 * t)
        ),
        block: format!("<<{}>> X !p1", tenths(n, 6, 10)),
    })
}
