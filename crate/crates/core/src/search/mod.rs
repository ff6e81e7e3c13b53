//! BC searchers. Both backends produce a stream of formulas that pass the
//! full BC check on the request's (possibly augmented) spec.

mod genetic;
mod pattern;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::ltl::Formula;
use crate::sat::SolverBudget;
use crate::spec::Spec;

pub use genetic::{GeneticConfig, GeneticSearch, GeneticSearcher};
pub use pattern::{pattern_candidates, PatternConfig, PatternSearch, PatternSearcher};

#[derive(Debug, Clone)]
pub struct SearchRequest {
    pub spec: Spec,
    pub budget: SolverBudget,
    /// Upper bound on candidates examined (pattern) or BCs yielded (genetic).
    pub max_candidates: usize,
    pub seed: u64,
}

impl SearchRequest {
    pub fn new(spec: Spec) -> Self {
        SearchRequest {
            spec,
            budget: SolverBudget::default(),
            max_candidates: usize::MAX,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorTag {
    Pattern,
    Genetic,
}

/// Fraction of BC conditions met: `satisfied / total` where total is the
/// number of goals plus two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fitness {
    pub satisfied: u32,
    pub total: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub formula: Formula,
    pub tag: GeneratorTag,
    pub fitness: Option<Fitness>,
}

impl Candidate {
    pub fn pattern(formula: Formula) -> Self {
        Candidate {
            formula,
            tag: GeneratorTag::Pattern,
            fitness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// A BC solver as seen by the joint framework: each call searches the given
/// spec afresh and returns one verified BC, or `None` when it gives up.
pub trait BcSearcher {
    fn name(&self) -> &str;
    fn next_bc(&mut self, req: &SearchRequest) -> Result<Option<Candidate>, SearchError>;
}
