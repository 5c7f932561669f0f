//! Satisfiability for single and combined temporal CSP instances.

pub mod independence;
pub mod instance;
pub mod min_closed;
pub mod nelson_oppen;
pub mod oracle;

pub use independence::{independence_falsifier, IndependenceCounterexample, IndependenceReport};
pub use instance::{CombinedInstance, Constraint, EpDefinition, Instance, Side};
pub use min_closed::solve_min_closed;
pub use nelson_oppen::{combine_nelson_oppen, CombineReport, CspSolver, MinClosedSolver, OracleSolver, TraceEvent};
pub use oracle::{
    solve_combined_oracle, solve_combined_oracle_with, solve_oracle, solve_oracle_with, CombinedOutcome, SolveOutcome,
};
