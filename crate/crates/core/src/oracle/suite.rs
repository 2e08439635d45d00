use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::brute::brute_compliant_profiles;
use super::matching::matching_check;
use super::naive::naive_mcheck;
use super::random::{random_coalition, random_formula, random_instance, Instance};
use super::DEFAULT_BUDGET;
use crate::coalition::{AgentId, Coalition};
use crate::formula::Formula;
use crate::io::{model_to_json, norm_to_json};
use crate::model::{ActionSet, ModelBuilder, Rcgs1Model, StateId};
use crate::norm::NormativeSystem;
use crate::profile::{compositions, Profile};
use crate::profiles::{compliant_profiles_with, hall_condition_with, LegalCountReading};
use crate::semantics::CheckContext;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    pub budget: u128,
    pub reading: LegalCountReading,
    /// Random formulas checked per instance.
    pub formulas: usize,
    pub formula_depth: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            instances: 500,
            budget: DEFAULT_BUDGET,
            reading: LegalCountReading::LegalAction,
            formulas: 3,
            formula_depth: 3,
        }
    }
}

/// A disagreement between the fast path and an oracle, with enough context
/// to reproduce it.
#[derive(Clone, Debug)]
pub enum Counterexample {
    ProfileSet {
        scenario: String,
        model: String,
        norm: String,
        compliance: Coalition,
        acting: Coalition,
        state: String,
        fast: Vec<Profile>,
        brute: Vec<Profile>,
    },
    Hall {
        model: String,
        norm: String,
        state: String,
        profile: Profile,
        coalition: Coalition,
        hall: bool,
        matching: bool,
    },
    Semantics {
        model: String,
        norm: String,
        compliance: Coalition,
        formula: String,
        fast: Vec<String>,
        naive: Vec<String>,
    },
    Error {
        scenario: String,
        message: String,
    },
}

fn list<T: fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::ProfileSet {
                scenario,
                model,
                norm,
                compliance,
                acting,
                state,
                fast,
                brute,
            } => {
                writeln!(f, "compliant profile sets differ ({scenario})")?;
                writeln!(f, "  A = {compliance}, B = {acting}, q = {state}")?;
                writeln!(f, "  fast  = {}", list(fast))?;
                writeln!(f, "  brute = {}", list(brute))?;
                writeln!(f, "model:\n{model}")?;
                write!(f, "norm:\n{norm}")
            }
            Counterexample::Hall {
                model,
                norm,
                state,
                profile,
                coalition,
                hall,
                matching,
            } => {
                writeln!(f, "Hall test and matching differ")?;
                writeln!(f, "  q = {state}, F2 = {profile}, coalition = {coalition}")?;
                writeln!(f, "  hall = {hall}, matching = {matching}")?;
                writeln!(f, "model:\n{model}")?;
                write!(f, "norm:\n{norm}")
            }
            Counterexample::Semantics {
                model,
                norm,
                compliance,
                formula,
                fast,
                naive,
            } => {
                writeln!(f, "model checking results differ")?;
                writeln!(f, "  A = {compliance}, phi = {formula}")?;
                writeln!(f, "  fast  = {}", list(fast))?;
                writeln!(f, "  naive = {}", list(naive))?;
                writeln!(f, "model:\n{model}")?;
                write!(f, "norm:\n{norm}")
            }
            Counterexample::Error { scenario, message } => write!(f, "{scenario}: {message}"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub instances: usize,
    /// Instances on which every check agreed.
    pub passed: usize,
    pub regression_passed: bool,
    pub profile_checks: u64,
    pub profile_failures: u64,
    pub hall_checks: u64,
    pub hall_failures: u64,
    pub semantic_checks: u64,
    pub semantic_failures: u64,
    /// The regression failure, or the failure of the lowest-numbered instance.
    pub first_failure: Option<(Option<usize>, Counterexample)>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.regression_passed && self.passed == self.instances
    }
}

#[derive(Default)]
struct Outcome {
    profile_checks: u64,
    profile_failures: u64,
    hall_checks: u64,
    hall_failures: u64,
    semantic_checks: u64,
    semantic_failures: u64,
    first: Option<Counterexample>,
}

impl Outcome {
    fn fail(&mut self, c: Counterexample) {
        self.first.get_or_insert(c);
    }
}

fn subsets(n: u32) -> Vec<Coalition> {
    (0u32..1 << n)
        .map(|mask| Coalition::from_indices((1..=n).filter(|i| mask >> (i - 1) & 1 == 1)))
        .collect()
}

fn describe(model: &Rcgs1Model, norm: &NormativeSystem) -> (String, String) {
    (model_to_json(model), norm_to_json(model, norm))
}

#[allow(clippy::too_many_arguments)]
fn compare_profiles(
    out: &mut Outcome,
    scenario: &str,
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    compliance: &Coalition,
    q: StateId,
    acting: &Coalition,
    config: &SuiteConfig,
) {
    out.profile_checks += 1;
    let fast = compliant_profiles_with(model, norm, compliance, q, acting, config.reading);
    match brute_compliant_profiles(model, norm, compliance, q, acting, config.budget) {
        Ok(brute) if brute == fast.to_set() => {}
        Ok(brute) => {
            out.profile_failures += 1;
            let (m, n) = describe(model, norm);
            out.fail(Counterexample::ProfileSet {
                scenario: scenario.to_owned(),
                model: m,
                norm: n,
                compliance: compliance.clone(),
                acting: acting.clone(),
                state: model.name(q).to_owned(),
                fast: fast.profiles().to_vec(),
                brute: brute.into_iter().rev().collect(),
            });
        }
        Err(e) => {
            out.profile_failures += 1;
            out.fail(Counterexample::Error {
                scenario: scenario.to_owned(),
                message: e.to_string(),
            });
        }
    }
}

fn check_instance(inst: &Instance, rng: &mut ChaCha8Rng, config: &SuiteConfig, scenario: &str) -> Outcome {
    let Instance { model, norm } = inst;
    let n = model.agents();
    let mut out = Outcome::default();
    let coalitions = subsets(n);

    for q in model.state_ids() {
        for a in &coalitions {
            for b in &coalitions {
                compare_profiles(&mut out, scenario, model, norm, a, q, b, config);
            }
        }
        for c in &coalitions {
            for f2 in compositions(c.len() as u32, model.actions(q)) {
                out.hall_checks += 1;
                let hall = hall_condition_with(model, norm, q, &f2, c, config.reading);
                let matching = matching_check(model, norm, q, &f2, c);
                if hall != matching {
                    out.hall_failures += 1;
                    let (m, nm) = describe(model, norm);
                    out.fail(Counterexample::Hall {
                        model: m,
                        norm: nm,
                        state: model.name(q).to_owned(),
                        profile: f2,
                        coalition: c.clone(),
                        hall,
                        matching,
                    });
                }
            }
        }
    }

    for _ in 0..config.formulas {
        let depth = rng.gen_range(0..=config.formula_depth);
        let phi = random_formula(rng, depth, n);
        let compliance = random_coalition(rng, n);
        out.semantic_checks += 1;
        if let Err(c) = compare_semantics(model, norm, &compliance, &phi, config) {
            out.semantic_failures += 1;
            out.fail(*c);
        }
    }
    out
}

fn compare_semantics(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    compliance: &Coalition,
    phi: &Formula,
    config: &SuiteConfig,
) -> Result<(), Box<Counterexample>> {
    let error = |message: String| Counterexample::Error {
        scenario: format!("formula {phi}"),
        message,
    };
    let fast = CheckContext::with_reading(model, norm, compliance.clone(), config.reading)
        .and_then(|ctx| ctx.mcheck(phi))
        .map_err(|e| Box::new(error(e.to_string())))?;
    let naive =
        naive_mcheck(model, norm, compliance, phi, config.budget).map_err(|e| Box::new(error(e.to_string())))?;
    if fast == naive {
        return Ok(());
    }
    let (m, n) = describe(model, norm);
    Err(Box::new(Counterexample::Semantics {
        model: m,
        norm: n,
        compliance: compliance.clone(),
        formula: phi.to_string(),
        fast: fast.names(model),
        naive: naive.names(model),
    }))
}

/// The three-action, five-agent scenario: agent 3 may not take action 2,
/// agent 4 may take neither action 1 nor 2, `A = {2,3,4}`, `B = {3,4,5}`.
pub fn figure2_scenario() -> (Rcgs1Model, NormativeSystem, Coalition, Coalition) {
    let model = ModelBuilder::new(5)
        .rule_state("q", Vec::<String>::new(), 3, Vec::new(), Some("q"))
        .build()
        .expect("single self-looping state");
    let q = StateId(0);
    let mut eta = NormativeSystem::empty();
    eta.forbid(q, AgentId(3), ActionSet::singleton(1));
    eta.forbid(q, AgentId(4), [0, 1].into_iter().collect());
    (model, eta, Coalition::from_indices([2, 3, 4]), Coalition::from_indices([3, 4, 5]))
}

/// Fast path against brute force on the three-action scenario.
pub fn figure2_regression(reading: LegalCountReading, budget: u128) -> Result<(), Box<Counterexample>> {
    let (model, eta, a, b) = figure2_scenario();
    let config = SuiteConfig {
        reading,
        budget,
        ..SuiteConfig::default()
    };
    let mut out = Outcome::default();
    compare_profiles(&mut out, "three-action regression scenario", &model, &eta, &a, StateId(0), &b, &config);
    out.first.map_or(Ok(()), |c| Err(Box::new(c)))
}

/// Runs the regression scenario, then `config.instances` random instances in
/// parallel. Instance `i` draws from stream `i` of the seeded generator, so
/// results do not depend on scheduling.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport {
        instances: config.instances,
        ..SuiteReport::default()
    };
    match figure2_regression(config.reading, config.budget) {
        Ok(()) => report.regression_passed = true,
        Err(c) => report.first_failure = Some((None, *c)),
    }
    let outcomes: Vec<Outcome> = (0..config.instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let inst = random_instance(&mut rng);
            check_instance(&inst, &mut rng, config, &format!("instance {i}"))
        })
        .collect();
    for (i, o) in outcomes.into_iter().enumerate() {
        report.profile_checks += o.profile_checks;
        report.profile_failures += o.profile_failures;
        report.hall_checks += o.hall_checks;
        report.hall_failures += o.hall_failures;
        report.semantic_checks += o.semantic_checks;
        report.semantic_failures += o.semantic_failures;
        match o.first {
            None => report.passed += 1,
            Some(c) => {
                if report.first_failure.is_none() {
                    report.first_failure = Some((Some(i), c));
                }
            }
        }
    }
    report
}
