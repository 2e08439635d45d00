use crate::coalition::{AgentId, Coalition};
use crate::model::{Rcgs1Model, StateId};
use crate::norm::NormativeSystem;
use crate::profile::Profile;

/// Whether every slot (`f2[i]` copies of action `i`) can be filled by a
/// distinct member of `coalition` for whom that action is legal, decided by
/// augmenting paths.
pub fn matching_check(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    q: StateId,
    f2: &Profile,
    coalition: &Coalition,
) -> bool {
    let agents: Vec<AgentId> = coalition.iter().collect();
    let slots: Vec<usize> = (0..f2.len())
        .flat_map(|action| std::iter::repeat_n(action, f2.get(action) as usize))
        .collect();
    if slots.len() > agents.len() {
        return false;
    }
    let m = model.actions(q);
    let edges: Vec<Vec<usize>> = slots
        .iter()
        .map(|&action| {
            (0..agents.len())
                .filter(|&x| action < m && !norm.forbidden(q, agents[x]).contains(action))
                .collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; agents.len()];
    for slot in 0..slots.len() {
        let mut seen = vec![false; agents.len()];
        if !augment(slot, &edges, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(slot: usize, edges: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &x in &edges[slot] {
        if seen[x] {
            continue;
        }
        seen[x] = true;
        let free = match owner[x] {
            None => true,
            Some(other) => augment(other, edges, owner, seen),
        };
        if free {
            owner[x] = Some(slot);
            return true;
        }
    }
    false
}
