//! Primitive positive definability: fixed constructions, bounded search
//! for definitions, and extraction of `R^mix` definitions.

pub mod constructions;
pub mod extract;
pub mod search;

pub use extract::{extract_rmix_definition, DefinitionStep, ExtractOutcome, Route, RmixExtraction};
pub use search::{
    bounded_ppdef_search, bounded_ppdef_search_with_budget, check_cross_prevention, non_definability_certificate,
    search_cross_prevention, CrossPreventionReport, SearchOutcome,
};
