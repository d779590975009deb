//! Proof terms, typing, normal and long normal forms.

pub mod lnf;
pub mod reduce;
pub mod term;
pub mod typing;

use thiserror::Error;

pub use lnf::{head_analysis, is_lnf, HeadAnalysis};
pub use reduce::{is_normal, normalize, normalize_with_fuel, subst_obj_in_term, subst_proof};
pub use term::{parse_raw_term, parse_term, Arg, ProofTerm, RawTerm};
pub use typing::{elaborate, typecheck};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("unbound proof variable {0}")]
    UnboundProofVar(String),
    #[error("{term} has type {found}, which is not an implication")]
    NotImplication { term: String, found: String },
    #[error("{term} has type {found}, which is not universal")]
    NotUniversal { term: String, found: String },
    #[error("eigenvariable {0} is free in the context")]
    Eigenvariable(String),
    #[error("argument mismatch: expected {expected}, found {found}")]
    ArgumentMismatch { expected: String, found: String },
    #[error("expected {expected}, found {found}")]
    ExpectedMismatch { expected: String, found: String },
    #[error("cannot infer the type of unannotated abstraction over {0}")]
    CannotInfer(String),
    #[error("normalization ran out of fuel after {0} steps")]
    FuelExhausted(usize),
    #[error("type {0} is not atomic")]
    NotAtomic(String),
    #[error("not a long normal form: {0}")]
    NotLnf(String),
}
