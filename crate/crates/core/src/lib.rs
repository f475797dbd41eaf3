//! Core of the `nabla` prover: λ-tree syntax terms, higher-order pattern
//! unification with nominal constants, a two-level logic with inductive
//! definitions and the ∇ quantifier, and an interactive tactic engine.

pub mod frontend;
pub mod metalogic;
pub mod par;
pub mod prover;
pub mod signature;
pub mod speclog;
pub mod term;
pub mod unify;
