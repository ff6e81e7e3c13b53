//! Boundary-condition identification for LTL goal specifications.
//!
//! The crate is layered bottom-up:
//!
//! * [`ltl`]: formulas, the concrete grammar, lasso traces and their semantics.
//! * [`sat`]: an explicit-state satisfiability engine with prefix counting.
//! * [`analysis`]: the boundary-condition judgments (verdicts, generality,
//!   witnesses, contrast, likelihood, the no-BC certificate).
//! * [`filters`]: post-processing (PPFc) and joint (JFc) contrasty filtering.
//! * [`search`]: pattern-based and genetic BC searchers.
//! * [`specfile`] and [`corpus`]: the on-disk spec format and benchmark corpus.

pub mod analysis;
pub mod corpus;
pub mod filters;
pub mod ltl;
pub mod sat;
pub mod search;
pub mod spec;
pub mod specfile;

pub use analysis::{
    Analyzer, AnalysisError, BcVerdict, FailureReason, Interpretation, Likelihood, SubCheck,
};
pub use filters::{BcEntry, BcSet, FilterAction, FilterStep, FilterTrace};
pub use ltl::{Formula, LassoTrace, Prop, Vocabulary};
pub use sat::{SatResult, SolverBudget, SolverError};
pub use spec::{NamedFormula, Spec, SpecError};
