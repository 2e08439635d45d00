//! Model checking for normative coordination over one-resource concurrent
//! game structures, where transitions depend only on how many agents pick
//! each action.

pub mod coalition;
pub mod family;
pub mod formula;
pub mod io;
pub mod model;
pub mod norm;
pub mod oracle;
pub mod profile;
pub mod profiles;
pub mod semantics;
pub mod validate;

pub use coalition::{AgentId, Coalition};
pub use formula::{parse_coalition, parse_formula, Formula, FormulaContext, FormulaError};
pub use model::{ActionSet, ModelBuilder, ModelError, Rcgs1Model, StateId};
pub use norm::NormativeSystem;
pub use profile::Profile;
pub use profiles::{compliant_profiles, LegalCountReading, ProfileCache, ProfileSet};
pub use semantics::{mcheck, CheckContext, CheckError, StateSet};
