use nchatl_core::norm::restrict_norm;
use nchatl_core::oracle::random::{random_coalition, random_formula, random_instance, Instance};
use nchatl_core::profile::{composition_count, compositions};
use nchatl_core::profiles::{compliant_profiles, partial_profiles};
use nchatl_core::validate::validate_norm;
use nchatl_core::{ActionSet, AgentId, CheckContext, Coalition, Formula, NormativeSystem, StateSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Case {
    inst: Instance,
    a: Coalition,
    b: Coalition,
    phi: Formula,
    psi: Formula,
}

fn case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = random_instance(&mut rng);
    let n = inst.model.agents();
    Case {
        a: random_coalition(&mut rng, n),
        b: random_coalition(&mut rng, n),
        phi: random_formula(&mut rng, 2, n),
        psi: random_formula(&mut rng, 2, n),
        inst,
    }
}

fn check(c: &Case, compliance: &Coalition, phi: &Formula) -> StateSet {
    CheckContext::new(&c.inst.model, &c.inst.norm, compliance.clone())
        .unwrap()
        .mcheck(phi)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_duality(seed in any::<u64>()) {
        let c = case(seed);
        let pos = check(&c, &c.a, &c.phi);
        prop_assert_eq!(check(&c, &c.a, &c.phi.clone().not()), pos.complement(&c.inst.model));
    }

    #[test]
    fn fixed_point_unfoldings(seed in any::<u64>()) {
        let c = case(seed);
        let g = Formula::globally(c.b.clone(), c.phi.clone());
        let unfolded = c.phi.clone().and(Formula::next(c.b.clone(), g.clone()));
        prop_assert_eq!(check(&c, &c.a, &g), check(&c, &c.a, &unfolded));
        let u = Formula::until(c.b.clone(), c.phi.clone(), c.psi.clone());
        let unfolded = c.psi.clone().or(c.phi.clone().and(Formula::next(c.b.clone(), u.clone())));
        prop_assert_eq!(check(&c, &c.a, &u), check(&c, &c.a, &unfolded));
    }

    #[test]
    fn box_containment_and_until_coverage(seed in any::<u64>()) {
        let c = case(seed);
        let g = check(&c, &c.a, &Formula::globally(c.b.clone(), c.phi.clone()));
        prop_assert!(g.is_subset(&check(&c, &c.a, &c.phi)));
        let u = check(&c, &c.a, &Formula::until(c.b.clone(), c.phi.clone(), c.psi.clone()));
        prop_assert!(check(&c, &c.a, &c.psi).is_subset(&u));
    }

    #[test]
    fn compliance_replacement(seed in any::<u64>()) {
        let c = case(seed);
        let inner = Formula::comply(c.b.clone(), c.phi.clone());
        let n = c.inst.model.agents();
        prop_assert_eq!(check(&c, &c.a, &inner), check(&c, &Coalition::empty(), &inner));
        prop_assert_eq!(check(&c, &c.a, &inner), check(&c, &Coalition::grand(n), &inner));
        let nested = Formula::comply(c.a.clone(), inner.clone());
        prop_assert_eq!(check(&c, &Coalition::empty(), &nested), check(&c, &Coalition::empty(), &inner));
    }

    #[test]
    fn empty_norm_makes_compliance_vacuous(seed in any::<u64>()) {
        let c = case(seed);
        let empty = NormativeSystem::empty();
        let run = |a: &Coalition| CheckContext::new(&c.inst.model, &empty, a.clone()).unwrap().mcheck(&c.phi).unwrap();
        prop_assert_eq!(run(&c.a), run(&c.b));
    }

    #[test]
    fn larger_coalitions_can_do_more(seed in any::<u64>()) {
        let c = case(seed);
        let bigger = c.b.union(&c.a);
        let small = check(&c, &c.a, &Formula::next(c.b.clone(), c.phi.clone()));
        let large = check(&c, &c.a, &Formula::next(bigger, c.phi.clone()));
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn dual_sugar_is_complement(seed in any::<u64>()) {
        let c = case(seed);
        let dual = check(&c, &c.a, &Formula::cannot_avoid_next(c.b.clone(), c.phi.clone()));
        let next = check(&c, &c.a, &Formula::next(c.b.clone(), c.phi.clone().not()));
        prop_assert_eq!(dual, next.complement(&c.inst.model));
    }

    #[test]
    fn profile_set_shape_and_monotonicity(seed in any::<u64>()) {
        let c = case(seed);
        let (m, eta) = (&c.inst.model, &c.inst.norm);
        let n = m.agents();
        // A stricter norm: forbid one more action wherever that stays legal.
        let mut stricter = eta.clone();
        for q in m.state_ids() {
            for x in 1..=n {
                let legal = eta.legal(q, AgentId(x), m.actions(q));
                if legal.len() > 1 {
                    let first = legal.iter().next().unwrap();
                    stricter.forbid(q, AgentId(x), ActionSet::singleton(first));
                }
            }
        }
        let wider = c.a.union(&c.b);
        for q in m.state_ids() {
            let base = compliant_profiles(m, eta, &c.a, q, &c.b);
            prop_assert!(!base.is_empty());
            prop_assert!(base.profiles().iter().all(|f| f.total() == c.b.len() as u64));
            let strict = compliant_profiles(m, &stricter, &c.a, q, &c.b);
            prop_assert!(strict.to_set().is_subset(&base.to_set()));
            let more = compliant_profiles(m, eta, &wider, q, &c.b);
            prop_assert!(more.to_set().is_subset(&base.to_set()));
        }
    }

    #[test]
    fn restriction_is_idempotent_and_keeps_validity(seed in any::<u64>()) {
        let c = case(seed);
        let once = restrict_norm(&c.inst.norm, &c.a);
        prop_assert_eq!(restrict_norm(&once, &c.a), once.clone());
        prop_assert!(validate_norm(&c.inst.model, &once).is_valid());
        prop_assert!(once.weaker_than(&c.inst.norm));
    }

    #[test]
    fn stars_and_bars(m in 1usize..=4, k in 0u32..=20) {
        let count = compositions(k, m).count() as u128;
        prop_assert_eq!(count, composition_count(k, m));
        prop_assert!(count <= (u128::from(k) + 1).pow(m as u32));
    }
}

#[test]
fn partial_profiles_sum_to_k() {
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(1));
    for q in inst.model.state_ids() {
        for k in 0..5 {
            assert!(partial_profiles(&inst.model, q, k).iter().all(|f| f.total() == u64::from(k)));
        }
    }
}
