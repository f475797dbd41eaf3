//! The reasoning logic: formulas, definitions and sequents.

pub mod defs;
pub mod formula;
pub mod sequent;

pub use defs::{DefClause, DefDb, DefError, Definition};
pub use formula::{normalize_spec, Formula, Hint, Quant, Restriction};
