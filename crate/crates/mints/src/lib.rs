//! Proof search, refutation and reductions for the (forall, ->) fragment of
//! first-order intuitionistic logic, organised by the Mints hierarchy.

pub mod encodings;
pub mod hierarchy;
pub mod kernel;
pub mod models;
pub mod monadic;
pub mod prover;
pub mod refuter;
pub mod syntax;
