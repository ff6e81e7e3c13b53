//! Satisfiability, implication and bounded prefix counting for LTL.
//!
//! Everything runs on one explicit-state tableau ([`tableau::Graph`]):
//! satisfiability is non-emptiness of its generalized Büchi acceptance,
//! counting determinizes the live part of the same graph.

mod bitset;
mod count;
mod oracle;
mod tableau;

use std::time::Duration;

use thiserror::Error;

use crate::ltl::{Formula, LassoTrace, Vocabulary};

pub use count::{count_prefixes, CountOptions, CountResult, DEFAULT_ALPHABET_CAP};
pub use oracle::{brute_force_oracle, OracleVerdict};

/// Resource limits for a single solver query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverBudget {
    pub max_states: usize,
    pub time_limit: Duration,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            max_states: 200_000,
            time_limit: Duration::from_secs(30),
        }
    }
}

impl SolverBudget {
    pub fn new(max_states: usize, time_limit: Duration) -> Result<Self, SolverError> {
        if max_states == 0 || time_limit.is_zero() {
            return Err(SolverError::InvalidBudget);
        }
        Ok(SolverBudget {
            max_states,
            time_limit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("solver budget exceeded after {states} states in {elapsed:?}")]
    BudgetExceeded { states: usize, elapsed: Duration },
    #[error("alphabet of 2^{props} letters exceeds the configured cap of {cap}")]
    VocabularyTooLarge { props: usize, cap: u64 },
    #[error("{0} propositions exceed the engine limit of 64")]
    TooManyPropositions(usize),
    #[error("proposition `{0}` is not in the vocabulary")]
    UnknownProposition(String),
    #[error("budget limits must be positive")]
    InvalidBudget,
    #[error("prefix length must be at least 1")]
    InvalidLength,
    #[error("internal error: witness trace does not satisfy the query")]
    InvalidWitness,
}

/// Outcome of a satisfiability query. A `Sat` witness always satisfies the
/// query at position 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(LassoTrace),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn witness(&self) -> Option<&LassoTrace> {
        match self {
            SatResult::Sat(t) => Some(t),
            SatResult::Unsat => None,
        }
    }
}

/// Decide satisfiability of `f` over its own atoms.
pub fn is_sat(f: &Formula, budget: &SolverBudget) -> Result<SatResult, SolverError> {
    let vocab = Vocabulary::from_props(f.atoms());
    let graph = tableau::Graph::build(f, &vocab, budget)?;
    match graph.accepting_lasso(&vocab) {
        None => Ok(SatResult::Unsat),
        Some(trace) => {
            if !trace.eval(f, 0) {
                return Err(SolverError::InvalidWitness);
            }
            Ok(SatResult::Sat(trace))
        }
    }
}

/// Every model of `f` is a model of `g`.
pub fn implies(f: &Formula, g: &Formula, budget: &SolverBudget) -> Result<bool, SolverError> {
    let query = Formula::and(f.clone(), Formula::not(g.clone()));
    Ok(!is_sat(&query, budget)?.is_sat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn sat(s: &str) -> SatResult {
        is_sat(&parse(s).unwrap(), &SolverBudget::default()).unwrap()
    }

    #[test]
    fn propositional_cases() {
        assert_eq!(sat("p && !p"), SatResult::Unsat);
        assert!(sat("p || !p").is_sat());
        assert!(sat("true").is_sat());
        assert_eq!(sat("false"), SatResult::Unsat);
    }

    #[test]
    fn temporal_cases() {
        assert_eq!(sat("G p && F !p"), SatResult::Unsat);
        assert!(sat("G F p && G F !p").is_sat());
        assert_eq!(sat("F G p && G F !p"), SatResult::Unsat);
        assert_eq!(sat("a U b && G !b"), SatResult::Unsat);
        assert!(sat("a W b && G !b").is_sat());
        assert_eq!(sat("X X p && X X !p"), SatResult::Unsat);
        assert!(sat("(a U b) && (c U !b) && G(a || c)").is_sat());
    }

    #[test]
    fn witnesses_satisfy_queries() {
        for q in ["G F p && G F !p", "F(h && m) && !h", "p U (q && X !p)", "F G a && X X !a"] {
            let f = parse(q).unwrap();
            let t = is_sat(&f, &SolverBudget::default()).unwrap();
            assert!(t.witness().unwrap().eval(&f, 0), "{q}");
        }
    }

    #[test]
    fn implication_examples() {
        let b = SolverBudget::default();
        let hm = parse("h && m").unwrap();
        let fhm = parse("F(h && m)").unwrap();
        assert!(implies(&hm, &fhm, &b).unwrap());
        assert!(!implies(&fhm, &hm, &b).unwrap());
        assert!(implies(&fhm, &fhm, &b).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = SolverBudget::new(2, Duration::from_secs(5)).unwrap();
        let f = parse("G F a && G F b && G F c").unwrap();
        assert!(matches!(
            is_sat(&f, &tiny),
            Err(SolverError::BudgetExceeded { .. })
        ));
        assert_eq!(
            SolverBudget::new(0, Duration::from_secs(1)),
            Err(SolverError::InvalidBudget)
        );
    }
}
