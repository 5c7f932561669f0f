//! Temporal constraint languages over the rationals. Relations are stored
//! as sets of orbits (weak orders), on which the polymorphism checks,
//! definability searches, solvers and the complexity classifier operate.

pub mod classify;
pub mod error;
pub mod formula;
pub mod gf2;
pub mod normal_form;
pub mod ops;
pub mod order;
pub mod pp;
pub mod ppdef;
pub mod relation;
pub(crate) mod search;
pub mod solvers;
pub mod structure;
pub mod syntax;

pub use error::{Error, Result};
pub use formula::{Cmp, Literal, OrderCnf, OrderFormula};
pub use order::{enumerate_weak_orders, orbit_of, MinTuple, WeakOrder};
pub use pp::{eval_pp, eval_pp_with, Atom, PPFormula};
pub use relation::{builtin, relation_from_cnf, relation_from_cnf_with, TemporalRelation};
pub use structure::{Caps, TemporalStructure};
