//! Formula evaluation over compliant profiles.
//!
//! `<<B>> X φ` holds at `q` when some `B`-profile compatible with the ambient
//! compliance set `A` sends every compatible counter-profile of `𝒜 \ B` into
//! `[[φ]]`. `G` and `U` are the usual greatest and least fixed points of
//! that one-step operator, and `[C] φ` swaps the ambient set for `C`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::coalition::Coalition;
use crate::formula::Formula;
use crate::model::{ModelError, Rcgs1Model, StateId};
use crate::norm::NormativeSystem;
use crate::profile::{composition_count, compositions, Profile};
use crate::profiles::{LegalCountReading, ProfileCache};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("coalition {coalition} mentions agents outside 1..{agents}")]
    AgentOutOfRange { coalition: String, agents: u32 },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A set of states in index order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StateSet(BTreeSet<StateId>);

impl StateSet {
    pub fn empty() -> Self {
        StateSet(BTreeSet::new())
    }

    pub fn all(model: &Rcgs1Model) -> Self {
        model.state_ids().collect()
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.contains(&q)
    }

    pub fn insert(&mut self, q: StateId) -> bool {
        self.0.insert(q)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        StateSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        StateSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn complement(&self, model: &Rcgs1Model) -> StateSet {
        model.state_ids().filter(|q| !self.contains(*q)).collect()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// State names sorted alphabetically.
    pub fn names(&self, model: &Rcgs1Model) -> Vec<String> {
        let mut names: Vec<String> = self.iter().map(|q| model.name(q).to_owned()).collect();
        names.sort();
        names
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        StateSet(iter.into_iter().collect())
    }
}

type Successors = Arc<Vec<(Profile, StateId)>>;

/// Everything evaluation needs; cheap to clone, caches are shared.
#[derive(Clone)]
pub struct CheckContext<'m> {
    model: &'m Rcgs1Model,
    norm: &'m NormativeSystem,
    compliance: Coalition,
    reading: LegalCountReading,
    cache: Arc<ProfileCache>,
    successors: Arc<Mutex<HashMap<StateId, Successors>>>,
}

impl<'m> CheckContext<'m> {
    pub fn new(model: &'m Rcgs1Model, norm: &'m NormativeSystem, compliance: Coalition) -> Result<Self, CheckError> {
        Self::with_reading(model, norm, compliance, LegalCountReading::LegalAction)
    }

    pub fn with_reading(
        model: &'m Rcgs1Model,
        norm: &'m NormativeSystem,
        compliance: Coalition,
        reading: LegalCountReading,
    ) -> Result<Self, CheckError> {
        check_coalition(model, &compliance)?;
        Ok(CheckContext {
            model,
            norm,
            compliance,
            reading,
            cache: Arc::new(ProfileCache::new()),
            successors: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn model(&self) -> &'m Rcgs1Model {
        self.model
    }

    pub fn norm(&self) -> &'m NormativeSystem {
        self.norm
    }

    pub fn compliance(&self) -> &Coalition {
        &self.compliance
    }

    pub fn cache(&self) -> &ProfileCache {
        &self.cache
    }

    /// Same model, norm and caches; a different ambient compliance set.
    pub fn with_compliance(&self, compliance: Coalition) -> Result<Self, CheckError> {
        check_coalition(self.model, &compliance)?;
        Ok(CheckContext {
            compliance,
            ..self.clone()
        })
    }

    fn full_successors(&self, q: StateId) -> Result<Successors, CheckError> {
        if let Some(hit) = self.successors.lock().expect("successor cache poisoned").get(&q) {
            return Ok(Arc::clone(hit));
        }
        let list = compositions(self.model.agents(), self.model.actions(q))
            .map(|f| self.model.successor(q, &f).map(|t| (f, t)))
            .collect::<Result<Vec<_>, _>>()?;
        let list = Arc::new(list);
        self.successors
            .lock()
            .expect("successor cache poisoned")
            .insert(q, Arc::clone(&list));
        Ok(list)
    }

    /// Whether `acting` can force the next state into `target` from `q`.
    pub fn enforce(&self, q: StateId, acting: &Coalition, target: &StateSet) -> Result<bool, CheckError> {
        check_coalition(self.model, acting)?;
        let others = acting.complement(self.model.agents());
        let pro = self
            .cache
            .compliant(self.model, self.norm, &self.compliance, q, acting, self.reading);
        let ant = self
            .cache
            .compliant(self.model, self.norm, &self.compliance, q, &others, self.reading);
        let direct_cost = (pro.len() as u128).saturating_mul(ant.len() as u128);
        if composition_count(self.model.agents(), self.model.actions(q)) < direct_cost {
            self.enforce_by_bad_profiles(q, &pro, &ant, target)
        } else {
            self.enforce_direct(q, &pro, &ant, target)
        }
    }

    fn enforce_direct(&self, q: StateId, pro: &[Profile], ant: &[Profile], target: &StateSet) -> Result<bool, CheckError> {
        for fb in pro {
            let mut all_inside = true;
            for fa in ant {
                let full = fb.sum(fa).expect("profiles at one state share a shape");
                if !target.contains(self.model.successor(q, &full)?) {
                    all_inside = false;
                    break;
                }
            }
            if all_inside {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Enumerates full profiles once; a `B`-profile wins unless some full
    /// profile outside the target splits as itself plus a counter-profile.
    fn enforce_by_bad_profiles(
        &self,
        q: StateId,
        pro: &[Profile],
        ant: &[Profile],
        target: &StateSet,
    ) -> Result<bool, CheckError> {
        let successors = self.full_successors(q)?;
        let bad: Vec<&Profile> = successors
            .iter()
            .filter(|(_, t)| !target.contains(*t))
            .map(|(f, _)| f)
            .collect();
        let good = successors.len() - bad.len();
        // `fb + ·` is injective, so more counter-profiles than good profiles
        // means one of them lands outside.
        if ant.len() > good {
            return Ok(false);
        }
        if bad.is_empty() {
            return Ok(!pro.is_empty());
        }
        let bad_set: HashSet<&Profile> = bad.iter().copied().collect();
        let in_ant = |p: &Profile| ant.binary_search_by(|x| p.cmp(x)).is_ok();
        for fb in pro {
            let escapes = if bad.len() <= ant.len() {
                bad.iter().any(|f| f.checked_sub(fb).is_some_and(|rest| in_ant(&rest)))
            } else {
                ant.iter().any(|fa| bad_set.contains(&fb.sum(fa).expect("same shape")))
            };
            if !escapes {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// States from which `acting` can force the next state into `target`.
    pub fn pre(&self, acting: &Coalition, target: &StateSet) -> Result<StateSet, CheckError> {
        let mut out = StateSet::empty();
        for q in self.model.state_ids() {
            if self.enforce(q, acting, target)? {
                out.insert(q);
            }
        }
        Ok(out)
    }

    /// The set of states satisfying `phi`.
    pub fn mcheck(&self, phi: &Formula) -> Result<StateSet, CheckError> {
        check_formula(self.model, phi)?;
        self.eval(phi)
    }

    /// Whether `phi` holds at the named state.
    pub fn check_at(&self, phi: &Formula, state: &str) -> Result<bool, CheckError> {
        let q = self
            .model
            .state_id(state)
            .ok_or_else(|| CheckError::UnknownState(state.to_owned()))?;
        Ok(self.mcheck(phi)?.contains(q))
    }

    fn eval(&self, phi: &Formula) -> Result<StateSet, CheckError> {
        let model = self.model;
        Ok(match phi {
            Formula::Top => StateSet::all(model),
            Formula::Prop(p) => model.state_ids().filter(|&q| model.label(q).contains(p)).collect(),
            Formula::Not(f) => self.eval(f)?.complement(model),
            Formula::Or(a, b) => self.eval(a)?.union(&self.eval(b)?),
            Formula::And(a, b) => self.eval(a)?.intersection(&self.eval(b)?),
            Formula::Next(c, f) => self.pre(c, &self.eval(f)?)?,
            Formula::Globally(c, f) => {
                let body = self.eval(f)?;
                let mut z = body.clone();
                loop {
                    let next = body.intersection(&self.pre(c, &z)?);
                    if next == z {
                        break z;
                    }
                    z = next;
                }
            }
            Formula::Until(c, f, g) => {
                let hold = self.eval(f)?;
                let mut z = self.eval(g)?;
                loop {
                    let next = z.union(&hold.intersection(&self.pre(c, &z)?));
                    if next == z {
                        break z;
                    }
                    z = next;
                }
            }
            Formula::Comply(c, f) => self.with_compliance(c.clone())?.eval(f)?,
        })
    }
}

fn check_coalition(model: &Rcgs1Model, c: &Coalition) -> Result<(), CheckError> {
    if c.within(model.agents()) {
        Ok(())
    } else {
        Err(CheckError::AgentOutOfRange {
            coalition: c.to_string(),
            agents: model.agents(),
        })
    }
}

fn check_formula(model: &Rcgs1Model, phi: &Formula) -> Result<(), CheckError> {
    if let Some(p) = phi.propositions().into_iter().find(|p| !model.propositions().contains(*p)) {
        return Err(CheckError::UnknownProposition(p.to_owned()));
    }
    for c in phi.coalitions() {
        check_coalition(model, c)?;
    }
    Ok(())
}

/// One-shot evaluation.
pub fn mcheck(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    compliance: &Coalition,
    phi: &Formula,
) -> Result<StateSet, CheckError> {
    CheckContext::new(model, norm, compliance.clone())?.mcheck(phi)
}
