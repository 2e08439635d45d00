use std::collections::BTreeSet;

use super::{power, BudgetExceeded};
use crate::coalition::{AgentId, Coalition};
use crate::model::{Rcgs1Model, StateId};
use crate::norm::NormativeSystem;
use crate::profile::Profile;

/// Count vectors of every assignment of actions to `acting` in which the
/// members of `compliance` avoid their forbidden actions.
pub fn brute_compliant_profiles(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    compliance: &Coalition,
    q: StateId,
    acting: &Coalition,
    budget: u128,
) -> Result<BTreeSet<Profile>, BudgetExceeded> {
    let m = model.actions(q);
    let agents: Vec<AgentId> = acting.iter().collect();
    let needed = power(m, agents.len());
    if needed > budget {
        return Err(BudgetExceeded { needed, budget });
    }
    let allowed = |agent: AgentId, action: usize| {
        !(compliance.contains(agent) && norm.forbidden(q, agent).contains(action))
    };
    let mut out = BTreeSet::new();
    let mut tuple = vec![0usize; agents.len()];
    loop {
        if tuple.iter().zip(&agents).all(|(&a, &x)| allowed(x, a)) {
            let mut counts = vec![0u32; m];
            for &a in &tuple {
                counts[a] += 1;
            }
            out.insert(Profile::new(counts));
        }
        // Odometer step; stop after wrapping the last digit.
        let mut i = 0;
        loop {
            if i == tuple.len() {
                return Ok(out);
            }
            tuple[i] += 1;
            if tuple[i] < m {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}
