//! Seeded generators for small instances, coalitions and formulas.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coalition::{AgentId, Coalition};
use crate::formula::Formula;
use crate::model::{ActionSet, Rcgs1Model, State, StateId, TransitionSpec};
use crate::norm::NormativeSystem;
use crate::profile::compositions;

pub const PROPOSITIONS: [&str; 2] = ["p", "q"];

/// A model with its norm.
#[derive(Clone, Debug)]
pub struct Instance {
    pub model: Rcgs1Model,
    pub norm: NormativeSystem,
}

/// Up to 4 agents, 4 states and 3 actions per state, with table transitions
/// drawn uniformly. Each (state, agent, action) is forbidden with
/// probability 0.3; an agent left with nothing legal gets one action back.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let n = rng.gen_range(1..=4u32);
    let states = rng.gen_range(1..=4usize);
    let model = random_model(rng, n, states);
    let mut norm = NormativeSystem::empty();
    for q in model.state_ids() {
        let m = model.actions(q);
        for agent in 1..=n {
            let mut forbidden: ActionSet = (0..m).filter(|_| rng.gen_bool(0.3)).collect();
            if forbidden == ActionSet::all(m) {
                let spared = rng.gen_range(0..m);
                forbidden = forbidden.difference(ActionSet::singleton(spared));
            }
            norm.forbid(q, AgentId(agent), forbidden);
        }
    }
    Instance { model, norm }
}

pub fn random_model<R: Rng>(rng: &mut R, n: u32, states: usize) -> Rcgs1Model {
    let built = (0..states)
        .map(|i| {
            let actions = rng.gen_range(1..=3usize);
            let entries = compositions(n, actions)
                .map(|f| (f, StateId(rng.gen_range(0..states))))
                .collect();
            State {
                name: format!("s{i}"),
                label: PROPOSITIONS
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .map(|p| p.to_string())
                    .collect(),
                actions,
                transitions: TransitionSpec::table(entries, None),
            }
        })
        .collect();
    Rcgs1Model::new(n, PROPOSITIONS.iter().map(|p| p.to_string()).collect(), built)
}

/// Each agent joins independently with probability one half.
pub fn random_coalition<R: Rng>(rng: &mut R, n: u32) -> Coalition {
    Coalition::from_indices((1..=n).filter(|_| rng.gen_bool(0.5)))
}

/// A formula of depth at most `depth` over [`PROPOSITIONS`].
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, n: u32) -> Formula {
    let atom = |rng: &mut R| match rng.gen_range(0..4) {
        0 => Formula::Top,
        _ => Formula::prop(*PROPOSITIONS.choose(rng).expect("non-empty")),
    };
    if depth == 0 {
        return atom(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..8) {
        0 => atom(rng),
        1 => random_formula(rng, d, n).not(),
        2 => random_formula(rng, d, n).or(random_formula(rng, d, n)),
        3 => random_formula(rng, d, n).and(random_formula(rng, d, n)),
        4 => Formula::next(random_coalition(rng, n), random_formula(rng, d, n)),
        5 => Formula::globally(random_coalition(rng, n), random_formula(rng, d, n)),
        6 => {
            let c = random_coalition(rng, n);
            Formula::until(c, random_formula(rng, d, n), random_formula(rng, d, n))
        }
        _ => Formula::comply(random_coalition(rng, n), random_formula(rng, d, n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{validate_model, validate_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instances_are_valid_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let inst = random_instance(&mut rng);
            assert!(validate_model(&inst.model).is_valid());
            assert!(validate_norm(&inst.model, &inst.norm).is_valid());
        }
        let a = random_instance(&mut ChaCha8Rng::seed_from_u64(3));
        let b = random_instance(&mut ChaCha8Rng::seed_from_u64(3));
        let shape = |m: &Rcgs1Model| {
            m.state_ids()
                .map(|q| (m.name(q).to_owned(), m.label(q).clone(), m.actions(q), m.state(q).transitions.targets()))
                .collect::<Vec<_>>()
        };
        assert_eq!(shape(&a.model), shape(&b.model));
        assert_eq!(a.norm, b.norm);
    }

    #[test]
    fn formulas_respect_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            assert!(random_formula(&mut rng, 3, 4).depth() <= 3);
        }
    }
}
