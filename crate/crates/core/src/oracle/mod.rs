//! Slow reference implementations used to cross-check the fast path.
//!
//! Nothing here calls into `profiles` or `semantics` except the suite, which
//! compares the two sides. Every enumeration is bounded by an explicit
//! budget and fails with [`BudgetExceeded`] rather than running away.

mod brute;
mod explicit;
mod matching;
mod naive;
pub mod random;
mod suite;

use thiserror::Error;

pub use brute::brute_compliant_profiles;
pub use explicit::{expand, AnonymityViolation, ExpandError, ExplicitCgs, ExplicitDoc, DEFAULT_BUDGET};
pub use matching::matching_check;
pub use naive::naive_mcheck;
pub use suite::{figure2_regression, figure2_scenario, run_suite, Counterexample, SuiteConfig, SuiteReport};

/// `needed` saturates at `u128::MAX`.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("enumeration needs {} steps, budget is {budget}", show_needed(*.needed))]
pub struct BudgetExceeded {
    pub needed: u128,
    pub budget: u128,
}

fn show_needed(needed: u128) -> String {
    if needed == u128::MAX {
        "more than 2^128".to_owned()
    } else {
        needed.to_string()
    }
}

/// `base^exp`, saturating.
pub(crate) fn power(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
