//! Compliant profile sets.
//!
//! The profiles a coalition `B` can produce while the agents of `A` obey a
//! norm are `F1 + F2`, where `F1` is any profile of the unconstrained agents
//! `B \ A` and `F2` is a profile of `A ∩ B` passing a Hall-type test: for
//! every action subset `E`, at least `Σ_{i∈E} F2(i)` agents of `A ∩ B` have
//! a legal action in `E`. No action tuple over `B` is ever enumerated.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::coalition::Coalition;
use crate::model::{ActionSet, Rcgs1Model, StateId};
use crate::norm::NormativeSystem;
use crate::profile::{compositions, Profile, ProfileError};

/// Profiles of a fixed coalition at one state, in descending lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileSet {
    pub state: StateId,
    pub compliance: Coalition,
    pub acting: Coalition,
    profiles: Vec<Profile>,
}

impl ProfileSet {
    /// Sorts and de-duplicates `profiles`.
    pub fn new(state: StateId, compliance: Coalition, acting: Coalition, mut profiles: Vec<Profile>) -> Self {
        profiles.sort_unstable_by(|a, b| b.cmp(a));
        profiles.dedup();
        ProfileSet {
            state,
            compliance,
            acting,
            profiles,
        }
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn contains(&self, p: &Profile) -> bool {
        self.profiles.binary_search_by(|x| p.cmp(x)).is_ok()
    }

    pub fn to_set(&self) -> BTreeSet<Profile> {
        self.profiles.iter().cloned().collect()
    }

    /// Count vectors as plain nested arrays.
    pub fn as_arrays(&self) -> Vec<Vec<u32>> {
        self.profiles.iter().map(|p| p.counts().to_vec()).collect()
    }
}

/// Which agents `legal_count` counts.
///
/// `LegalAction` is the correct reading. `ForbiddenMeetsSubset` counts agents
/// whose forbidden set meets `E`; it exists only so the oracle suite can show
/// that it detects the difference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LegalCountReading {
    #[default]
    LegalAction,
    ForbiddenMeetsSubset,
}

/// All profiles of a `k`-agent coalition at `q`.
pub fn partial_profiles(model: &Rcgs1Model, q: StateId, k: u32) -> Vec<Profile> {
    compositions(k, model.actions(q)).collect()
}

/// Number of agents of `coalition` with some non-forbidden action in `subset`.
pub fn legal_count(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    q: StateId,
    subset: ActionSet,
    coalition: &Coalition,
) -> usize {
    legal_count_with(model, norm, q, subset, coalition, LegalCountReading::LegalAction)
}

pub fn legal_count_with(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    q: StateId,
    subset: ActionSet,
    coalition: &Coalition,
    reading: LegalCountReading,
) -> usize {
    let m = model.actions(q);
    coalition
        .iter()
        .filter(|&x| match reading {
            LegalCountReading::LegalAction => !norm.legal(q, x, m).intersection(subset).is_empty(),
            LegalCountReading::ForbiddenMeetsSubset => !norm.forbidden(q, x).intersection(subset).is_empty(),
        })
        .count()
}

/// `legal_count` for every subset mask of `[m]`, indexed by mask bits.
fn legal_table(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    q: StateId,
    coalition: &Coalition,
    reading: LegalCountReading,
) -> Vec<usize> {
    let m = model.actions(q);
    (0..1u64 << m)
        .map(|mask| legal_count_with(model, norm, q, ActionSet::from_bits(mask), coalition, reading))
        .collect()
}

/// Checks `F2` against the table; `E = ∅` and zero-mass subsets pass trivially.
fn passes_hall(table: &[usize], f2: &Profile) -> bool {
    let mut mass = vec![0u64; table.len()];
    for mask in 1..table.len() {
        let low = mask.trailing_zeros() as usize;
        mass[mask] = mass[mask & (mask - 1)] + u64::from(f2.get(low));
        if mass[mask] > 0 && (table[mask] as u64) < mass[mask] {
            return false;
        }
    }
    true
}

/// Whether `F2` (a profile of `coalition`) can be realised by an assignment
/// of legal actions to the members of `coalition`.
pub fn hall_condition(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    q: StateId,
    f2: &Profile,
    coalition: &Coalition,
) -> bool {
    passes_hall(
        &legal_table(model, norm, q, coalition, LegalCountReading::LegalAction),
        f2,
    )
}

/// [`hall_condition`] under an explicit counting reading.
pub fn hall_condition_with(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    q: StateId,
    f2: &Profile,
    coalition: &Coalition,
    reading: LegalCountReading,
) -> bool {
    passes_hall(&legal_table(model, norm, q, coalition, reading), f2)
}

pub fn compliant_profiles(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    compliance: &Coalition,
    q: StateId,
    acting: &Coalition,
) -> ProfileSet {
    compliant_profiles_with(model, norm, compliance, q, acting, LegalCountReading::LegalAction)
}

pub fn compliant_profiles_with(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    compliance: &Coalition,
    q: StateId,
    acting: &Coalition,
    reading: LegalCountReading,
) -> ProfileSet {
    let bound = acting.intersection(compliance);
    let free = acting.len() - bound.len();
    let profiles = compute(model, norm, q, &bound, free as u32, reading);
    ProfileSet::new(q, compliance.clone(), acting.clone(), profiles)
}

fn compute(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    q: StateId,
    bound: &Coalition,
    free: u32,
    reading: LegalCountReading,
) -> Vec<Profile> {
    let m = model.actions(q);
    let table = legal_table(model, norm, q, bound, reading);
    let candidates = compositions(bound.len() as u32, m);
    let passing: Vec<Profile> = candidates.filter(|f2| passes_hall(&table, f2)).collect();
    if passing.len() as u128 == crate::profile::composition_count(bound.len() as u32, m) {
        // Nothing binds: the set is every profile of |B| agents.
        return compositions(bound.len() as u32 + free, m).collect();
    }
    let total = bound.len() as u32 + free;
    let product = crate::profile::composition_count(free, m).saturating_mul(passing.len() as u128);
    if reading == LegalCountReading::LegalAction && product > crate::profile::composition_count(total, m) {
        // With a genuine coverage table, F decomposes as F1 + F2 exactly when
        // every subset E satisfies F(E) <= free + legal_count(E). Scanning
        // P(|B|) once is cheaper than the product here.
        let widened: Vec<usize> = table.iter().map(|c| c + free as usize).collect();
        return compositions(total, m).filter(|f| passes_hall(&widened, f)).collect();
    }
    let frees: Vec<Profile> = compositions(free, m).collect();
    let mut out = Vec::with_capacity(frees.len() * passing.len());
    for f1 in &frees {
        for f2 in &passing {
            out.push(f1.sum(f2).expect("same state"));
        }
    }
    out
}

pub fn profile_leq(f: &Profile, g: &Profile) -> Result<bool, ProfileError> {
    f.leq(g)
}

pub fn profile_sum(f: &Profile, g: &Profile) -> Result<Profile, ProfileError> {
    f.sum(g)
}

/// Key under which two calls provably return the same set: the multiset of
/// legal-action sets of the bound agents, plus the free-agent count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CacheKey {
    state: StateId,
    legal_sets: Vec<(u64, u32)>,
    free: u32,
    reading: LegalCountReading,
}

/// Memo for compliant profile sets keyed by state and legal-set signature.
///
/// Racing writers compute equal values, so last-writer-wins is harmless.
#[derive(Debug, Default)]
pub struct ProfileCache {
    map: Mutex<HashMap<CacheKey, Arc<Vec<Profile>>>>,
}

impl ProfileCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cached form of [`compliant_profiles_with`]; profiles come back in canonical order.
    pub fn compliant(
        &self,
        model: &Rcgs1Model,
        norm: &NormativeSystem,
        compliance: &Coalition,
        q: StateId,
        acting: &Coalition,
        reading: LegalCountReading,
    ) -> Arc<Vec<Profile>> {
        let bound = acting.intersection(compliance);
        let free = (acting.len() - bound.len()) as u32;
        let m = model.actions(q);
        let mut counts: HashMap<u64, u32> = HashMap::new();
        for a in bound.iter() {
            *counts.entry(norm.legal(q, a, m).bits()).or_default() += 1;
        }
        let mut legal_sets: Vec<(u64, u32)> = counts.into_iter().collect();
        legal_sets.sort_unstable();
        let key = CacheKey {
            state: q,
            legal_sets,
            free,
            reading,
        };
        if let Some(hit) = self.map.lock().expect("cache poisoned").get(&key) {
            return Arc::clone(hit);
        }
        let mut profiles = compute(model, norm, q, &bound, free, reading);
        profiles.sort_unstable_by(|a, b| b.cmp(a));
        profiles.dedup();
        let value = Arc::new(profiles);
        self.map
            .lock()
            .expect("cache poisoned")
            .insert(key, Arc::clone(&value));
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalition::AgentId;
    use crate::model::ModelBuilder;

    /// One three-action state over five agents; agent 3 may not take action 2,
    /// agent 4 may take neither action 1 nor action 2.
    fn lemma_scenario() -> (Rcgs1Model, NormativeSystem) {
        let model = ModelBuilder::new(5)
            .rule_state("q", Vec::<String>::new(), 3, Vec::new(), Some("q"))
            .build()
            .unwrap();
        let q = StateId(0);
        let mut eta = NormativeSystem::empty();
        eta.forbid(q, AgentId(3), ActionSet::singleton(1));
        eta.forbid(q, AgentId(4), [0, 1].into_iter().collect());
        (model, eta)
    }

    fn p(v: &[u32]) -> Profile {
        Profile::new(v.to_vec())
    }

    fn e(actions: &[usize]) -> ActionSet {
        actions.iter().map(|a| a - 1).collect()
    }

    #[test]
    fn partial_profile_examples() {
        let (model, _) = lemma_scenario();
        let q = StateId(0);
        assert_eq!(partial_profiles(&model, q, 1), vec![p(&[1, 0, 0]), p(&[0, 1, 0]), p(&[0, 0, 1])]);
        assert_eq!(partial_profiles(&model, q, 0), vec![p(&[0, 0, 0])]);
    }

    #[test]
    fn legal_count_examples() {
        let (model, eta) = lemma_scenario();
        let q = StateId(0);
        let cd = Coalition::from_indices([3, 4]);
        assert_eq!(legal_count(&model, &eta, q, e(&[1]), &cd), 1);
        assert_eq!(legal_count(&model, &eta, q, e(&[2]), &cd), 0);
        assert_eq!(legal_count(&model, &eta, q, ActionSet::EMPTY, &cd), 0);
        assert_eq!(legal_count(&model, &eta, q, e(&[3]), &cd), 2);
    }

    #[test]
    fn hall_examples() {
        let (model, eta) = lemma_scenario();
        let q = StateId(0);
        let cd = Coalition::from_indices([3, 4]);
        assert!(hall_condition(&model, &eta, q, &p(&[1, 0, 1]), &cd));
        assert!(!hall_condition(&model, &eta, q, &p(&[2, 0, 0]), &cd));
        assert!(hall_condition(&model, &eta, q, &p(&[0, 0, 2]), &cd));
        assert!(!hall_condition(&model, &eta, q, &p(&[0, 2, 0]), &cd));
        let empty = NormativeSystem::empty();
        for f2 in partial_profiles(&model, q, 2) {
            assert!(hall_condition(&model, &empty, q, &f2, &cd));
        }
    }

    #[test]
    fn lemma_scenario_profile_set() {
        let (model, eta) = lemma_scenario();
        let set = compliant_profiles(
            &model,
            &eta,
            &Coalition::from_indices([2, 3, 4]),
            StateId(0),
            &Coalition::from_indices([3, 4, 5]),
        );
        assert_eq!(
            set.as_arrays(),
            vec![vec![2, 0, 1], vec![1, 1, 1], vec![1, 0, 2], vec![0, 1, 2], vec![0, 0, 3]]
        );
        assert!(set.contains(&p(&[1, 1, 1])));
        assert!(!set.contains(&p(&[3, 0, 0])));
    }

    #[test]
    fn literal_reading_differs_on_lemma_scenario() {
        let (model, eta) = lemma_scenario();
        let set = compliant_profiles_with(
            &model,
            &eta,
            &Coalition::from_indices([2, 3, 4]),
            StateId(0),
            &Coalition::from_indices([3, 4, 5]),
            LegalCountReading::ForbiddenMeetsSubset,
        );
        let expected = vec![vec![2, 1, 0], vec![1, 2, 0], vec![1, 1, 1], vec![0, 3, 0], vec![0, 2, 1]];
        assert_eq!(set.as_arrays(), expected);
    }

    #[test]
    fn unconstrained_cases_give_all_partial_profiles() {
        let (model, eta) = lemma_scenario();
        let q = StateId(0);
        let b = Coalition::from_indices([3, 4, 5]);
        let all = partial_profiles(&model, q, 3);
        let none = compliant_profiles(&model, &NormativeSystem::empty(), &Coalition::grand(5), q, &b);
        assert_eq!(none.profiles(), &all[..]);
        let disjoint = compliant_profiles(&model, &eta, &Coalition::from_indices([1, 2]), q, &b);
        assert_eq!(disjoint.profiles(), &all[..]);
    }

    #[test]
    fn widened_table_matches_product() {
        let (model, eta) = lemma_scenario();
        let q = StateId(0);
        let bound = Coalition::from_indices([3, 4]);
        for free in 0..4 {
            let table = legal_table(&model, &eta, q, &bound, LegalCountReading::LegalAction);
            let passing: Vec<Profile> = compositions(2, 3).filter(|f2| passes_hall(&table, f2)).collect();
            let mut product: Vec<Profile> = compositions(free, 3)
                .flat_map(|f1| passing.iter().map(move |f2| f1.sum(f2).unwrap()))
                .collect();
            product.sort_unstable_by(|a, b| b.cmp(a));
            product.dedup();
            let widened: Vec<usize> = table.iter().map(|c| c + free as usize).collect();
            let direct: Vec<Profile> = compositions(2 + free, 3).filter(|f| passes_hall(&widened, f)).collect();
            assert_eq!(product, direct, "free = {free}");
        }
    }

    #[test]
    fn cache_agrees_and_hits() {
        let (model, eta) = lemma_scenario();
        let cache = ProfileCache::new();
        let a = Coalition::from_indices([2, 3, 4]);
        let b = Coalition::from_indices([3, 4, 5]);
        let direct = compliant_profiles(&model, &eta, &a, StateId(0), &b);
        let cached = cache.compliant(&model, &eta, &a, StateId(0), &b, LegalCountReading::LegalAction);
        assert_eq!(direct.profiles(), &cached[..]);
        // Same legal-set multiset through a different coalition pair.
        let a2 = Coalition::from_indices([3, 4]);
        let b2 = Coalition::from_indices([1, 3, 4]);
        cache.compliant(&model, &eta, &a2, StateId(0), &b2, LegalCountReading::LegalAction);
        assert_eq!(cache.len(), 1);
    }
}
