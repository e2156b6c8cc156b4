//! Up-sets and a finite verifier for the infinitary removal statement.

mod instance;
mod lifting;
mod search;
pub mod upset;

pub use instance::{
    check_conclusion, check_hypotheses, check_structure_hypotheses, conclusion_for_sets, lifted, psi_join,
    upsets_for_hypotheses, ConclusionReport, FamilyEntry, HypothesisReport, RemovalInstance,
};
pub use lifting::{lifting_scenario_tests, LiftingReport, ScenarioResult};
pub use search::{
    maximal_compatible, random_structure, search_counterexample, CouplingKind, ExhaustiveConfig, RandomConfig,
    SearchConfig, SearchOutcome,
};
pub use upset::UpSet;
