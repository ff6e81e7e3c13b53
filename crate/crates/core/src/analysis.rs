//! Boundary-condition judgments over a fixed [`Spec`].
//!
//! A formula φ is a boundary condition (BC) when
//!
//! * `Dom ∧ G ∧ φ` is unsatisfiable (logical inconsistency),
//! * `Dom ∧ G₋ᵢ ∧ φ` is satisfiable for every goal i (minimality), and
//! * φ is not equivalent to `¬G` (non-triviality).
//!
//! Solver budget overruns surface as [`AnalysisError::Unknown`] and are never
//! folded into a boolean answer.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ltl::{Formula, LassoTrace};
use crate::sat::{self, CountOptions, SatResult, SolverBudget, SolverError};
use crate::spec::Spec;

/// Which solver query an [`AnalysisError::Unknown`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "check", content = "goal")]
pub enum SubCheck {
    Inconsistency,
    Minimality(usize),
    NonTriviality,
    Implication,
    Counting,
    Termination(usize),
}

impl fmt::Display for SubCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubCheck::Inconsistency => f.write_str("logical inconsistency"),
            SubCheck::Minimality(i) => write!(f, "minimality (goal {})", i + 1),
            SubCheck::NonTriviality => f.write_str("non-triviality"),
            SubCheck::Implication => f.write_str("implication"),
            SubCheck::Counting => f.write_str("prefix counting"),
            SubCheck::Termination(i) => write!(f, "termination condition (goal {})", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("unknown: {check} check did not finish ({source})")]
    Unknown {
        check: SubCheck,
        #[source]
        source: SolverError,
    },
    #[error("likelihood undefined: domain properties admit no model bases")]
    DomUnsatisfiable,
    #[error(transparent)]
    Solver(SolverError),
}

impl AnalysisError {
    fn from_solver(check: SubCheck, e: SolverError) -> Self {
        match e {
            SolverError::BudgetExceeded { .. } => AnalysisError::Unknown { check, source: e },
            other => AnalysisError::Solver(other),
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, AnalysisError::Unknown { .. })
    }
}

/// Why a formula is not a BC. Minimality carries the index of the goal whose
/// omission still leaves `Dom ∧ G₋ᵢ ∧ φ` unsatisfiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "reason", content = "dropped_goal")]
pub enum FailureReason {
    Inconsistency,
    Minimality(usize),
    Triviality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityCheck {
    pub goal: usize,
    pub holds: bool,
    /// A model of `Dom ∧ G₋ᵢ ∧ φ` when the check holds.
    pub witness: Option<LassoTrace>,
}

/// The full outcome of the three BC conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcVerdict {
    pub is_bc: bool,
    pub inconsistency: bool,
    pub minimality: Vec<MinimalityCheck>,
    pub non_triviality: bool,
    pub failure: Option<FailureReason>,
}

/// What counts as a length-k model base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpretation {
    /// Prefixes that extend to at least one model.
    #[default]
    PrefixExtendable,
    /// Prefixes of `Dom` models all of whose `Dom`-extensions satisfy φ,
    /// counted as `#(Dom, k) - #(Dom ∪ {¬φ}, k)`.
    PrefixDetermined,
}

impl Interpretation {
    pub fn tag(&self) -> &'static str {
        match self {
            Interpretation::PrefixExtendable => "prefix-extendable",
            Interpretation::PrefixDetermined => "prefix-determined",
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Interpretation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prefix-extendable" => Ok(Interpretation::PrefixExtendable),
            "prefix-determined" => Ok(Interpretation::PrefixDetermined),
            other => Err(format!("unknown interpretation `{other}`")),
        }
    }
}

/// `L(φ) = #(Dom ∪ {φ}, k) / #(Dom, k)` as an exact fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Likelihood {
    pub numerator: BigUint,
    pub denominator: BigUint,
    pub k: usize,
    pub interpretation: Interpretation,
}

impl Likelihood {
    pub fn value(&self) -> f64 {
        let (n, d) = (&self.numerator, &self.denominator);
        // scale down huge counts before converting
        let shift = d.bits().saturating_sub(900);
        let (n, d) = (n >> shift, d >> shift);
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    }
}

impl PartialOrd for Likelihood {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Likelihood {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.numerator * &other.denominator).cmp(&(&other.numerator * &self.denominator))
    }
}

/// Memoizing evaluator of BC judgments for one spec. Shareable across
/// threads; cached results are identical to uncached ones.
pub struct Analyzer<'s> {
    spec: &'s Spec,
    budget: SolverBudget,
    cache: Mutex<HashMap<Formula, SatResult>>,
}

impl<'s> Analyzer<'s> {
    pub fn new(spec: &'s Spec, budget: SolverBudget) -> Self {
        Analyzer {
            spec,
            budget,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &'s Spec {
        self.spec
    }

    pub fn budget(&self) -> &SolverBudget {
        &self.budget
    }

    fn sat(&self, f: Formula, check: SubCheck) -> Result<SatResult, AnalysisError> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&f) {
            return Ok(hit.clone());
        }
        let r = sat::is_sat(&f, &self.budget).map_err(|e| AnalysisError::from_solver(check, e))?;
        self.cache
            .lock()
            .expect("cache lock")
            .insert(f, r.clone());
        Ok(r)
    }

    fn implies(&self, a: &Formula, b: &Formula, check: SubCheck) -> Result<bool, AnalysisError> {
        let q = Formula::and(a.clone(), Formula::not(b.clone()));
        Ok(!self.sat(q, check)?.is_sat())
    }

    /// Evaluate all three BC conditions (no short-circuiting).
    pub fn check_bc(&self, phi: &Formula) -> Result<BcVerdict, AnalysisError> {
        let spec = self.spec;
        let dom = spec.dom_formula();

        let all = Formula::conj([dom.clone(), spec.goal_formula(), phi.clone()]);
        let inconsistency = !self.sat(all, SubCheck::Inconsistency)?.is_sat();

        let mut minimality = Vec::with_capacity(spec.goals().len());
        for i in 0..spec.goals().len() {
            let q = Formula::conj([dom.clone(), spec.goals_without(i), phi.clone()]);
            let r = self.sat(q, SubCheck::Minimality(i))?;
            minimality.push(MinimalityCheck {
                goal: i,
                holds: r.is_sat(),
                witness: r.witness().cloned(),
            });
        }

        let not_g = Formula::not(spec.goal_formula());
        let forward = self.implies(phi, &not_g, SubCheck::NonTriviality)?;
        let backward = self.implies(&not_g, phi, SubCheck::NonTriviality)?;
        let non_triviality = !(forward && backward);

        let failure = if !inconsistency {
            Some(FailureReason::Inconsistency)
        } else if let Some(m) = minimality.iter().find(|m| !m.holds) {
            Some(FailureReason::Minimality(m.goal))
        } else if !non_triviality {
            Some(FailureReason::Triviality)
        } else {
            None
        };
        Ok(BcVerdict {
            is_bc: failure.is_none(),
            inconsistency,
            minimality,
            non_triviality,
            failure,
        })
    }

    /// Just the first condition: `Dom ∧ G ∧ φ` is unsatisfiable.
    pub fn is_inconsistent(&self, phi: &Formula) -> Result<bool, AnalysisError> {
        let spec = self.spec;
        let all = Formula::conj([spec.dom_formula(), spec.goal_formula(), phi.clone()]);
        Ok(!self.sat(all, SubCheck::Inconsistency)?.is_sat())
    }

    pub fn is_bc(&self, phi: &Formula) -> Result<bool, AnalysisError> {
        Ok(self.check_bc(phi)?.is_bc)
    }

    /// `a` is more general than `b` iff `b` implies `a`.
    pub fn is_more_general(&self, a: &Formula, b: &Formula) -> Result<bool, AnalysisError> {
        self.implies(b, a, SubCheck::Implication)
    }

    /// `f` is a witness of `phi` iff `phi ∧ ¬f` is not a BC.
    pub fn is_witness(&self, f: &Formula, phi: &Formula) -> Result<bool, AnalysisError> {
        let rest = Formula::and(phi.clone(), Formula::not(f.clone()));
        Ok(!self.check_bc(&rest)?.is_bc)
    }

    /// Neither BC witnesses the other.
    pub fn are_contrastive(&self, a: &Formula, b: &Formula) -> Result<bool, AnalysisError> {
        let ab = self.is_witness(a, b)?;
        let ba = self.is_witness(b, a)?;
        Ok(!ab && !ba)
    }

    /// Exact likelihood at prefix length `k` over the spec vocabulary.
    pub fn likelihood(&self, phi: &Formula, k: usize) -> Result<Likelihood, AnalysisError> {
        self.likelihood_as(phi, k, Interpretation::default())
    }

    pub fn likelihood_as(
        &self,
        phi: &Formula,
        k: usize,
        interpretation: Interpretation,
    ) -> Result<Likelihood, AnalysisError> {
        let opts = CountOptions {
            budget: self.budget,
            ..CountOptions::default()
        };
        let count = |cs: &[Formula]| {
            sat::count_prefixes(cs, self.spec.vocab(), k, &opts)
                .map(|r| r.count)
                .map_err(|e| AnalysisError::from_solver(SubCheck::Counting, e))
        };
        let dom: Vec<Formula> = self.spec.dom().iter().map(|d| d.formula.clone()).collect();
        let denominator = count(&dom)?;
        if denominator.is_zero() {
            return Err(AnalysisError::DomUnsatisfiable);
        }
        let mut with_phi = dom;
        let numerator = match interpretation {
            Interpretation::PrefixExtendable => {
                with_phi.push(phi.clone());
                count(&with_phi)?
            }
            Interpretation::PrefixDetermined => {
                with_phi.push(Formula::not(phi.clone()));
                &denominator - count(&with_phi)?
            }
        };
        Ok(Likelihood {
            numerator,
            denominator,
            k,
            interpretation,
        })
    }

    /// First goal index i with `Dom ∧ G₋ᵢ ∧ ¬gᵢ` unsatisfiable, which
    /// certifies that no BC exists.
    pub fn termination_condition(&self) -> Result<Option<usize>, AnalysisError> {
        let spec = self.spec;
        for (i, g) in spec.goals().iter().enumerate() {
            let q = Formula::conj([
                spec.dom_formula(),
                spec.goals_without(i),
                Formula::not(g.formula.clone()),
            ]);
            if !self.sat(q, SubCheck::Termination(i))?.is_sat() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

/// The resolution template `G(Dom -> G !b)` that inhibits `b`.
pub fn avoid_pattern(spec: &Spec, b: &Formula) -> Formula {
    Formula::always(Formula::implies(
        spec.dom_formula(),
        Formula::always(Formula::not(b.clone())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse, Vocabulary};
    use crate::spec::NamedFormula;

    fn spec(dom: &[&str], goals: &[&str], props: &[&str]) -> Spec {
        let nf = |prefix: &str, i: usize, s: &&str| {
            NamedFormula::new(&format!("{prefix}{}", i + 1), parse(s).unwrap())
        };
        Spec::new(
            "t",
            Vocabulary::new(props.iter().copied()).unwrap(),
            dom.iter().enumerate().map(|(i, s)| nf("d", i, s)).collect(),
            goals.iter().enumerate().map(|(i, s)| nf("g", i, s)).collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn duplicate_goal_meets_termination_condition() {
        let s = spec(&[], &["G p", "G p"], &["p"]);
        let an = Analyzer::new(&s, SolverBudget::default());
        assert_eq!(an.termination_condition().unwrap(), Some(0));
    }

    #[test]
    fn contradiction_fails_minimality() {
        let s = spec(&[], &["G(p -> X q)", "G(r -> X !q)"], &["p", "q", "r"]);
        let an = Analyzer::new(&s, SolverBudget::default());
        let v = an.check_bc(&Formula::False).unwrap();
        assert!(!v.is_bc);
        assert!(v.inconsistency);
        assert_eq!(v.failure, Some(FailureReason::Minimality(0)));
        let phi = parse("F(p && r)").unwrap();
        let v = an.check_bc(&phi).unwrap();
        assert!(v.is_bc, "{v:?}");
        for m in &v.minimality {
            let q = Formula::conj([s.goals_without(m.goal), phi.clone()]);
            assert!(m.witness.as_ref().unwrap().eval(&q, 0));
        }
    }

    #[test]
    fn negated_goals_are_trivial() {
        // the two goals together force G !p, so F p is their negation
        let s = spec(&[], &["G(p -> X q)", "G(p -> X !q)"], &["p", "q"]);
        let an = Analyzer::new(&s, SolverBudget::default());
        let v = an.check_bc(&parse("F p").unwrap()).unwrap();
        assert_eq!(v.failure, Some(FailureReason::Triviality));
        assert!(an.is_bc(&Formula::atom("p")).unwrap());
    }

    #[test]
    fn avoid_pattern_shapes() {
        let s = spec(&[], &["G p", "F q"], &["p", "q"]);
        assert_eq!(
            avoid_pattern(&s, &Formula::atom("p")).to_string(),
            "G (true -> (G (! p)))"
        );
        let s = spec(&["G q"], &["G p", "F q"], &["p", "q"]);
        assert_eq!(
            avoid_pattern(&s, &Formula::atom("p")),
            parse("G(G q -> G !p)").unwrap()
        );
    }

    #[test]
    fn likelihood_of_constants() {
        let s = spec(&["G(p -> X q)"], &["G p", "F q"], &["p", "q"]);
        let an = Analyzer::new(&s, SolverBudget::default());
        let one = an.likelihood(&Formula::True, 3).unwrap();
        assert_eq!(one.numerator, one.denominator);
        assert_eq!(one.value(), 1.0);
        let zero = an.likelihood(&Formula::False, 3).unwrap();
        assert!(zero.numerator.is_zero());
        assert!(zero < one);
    }

    #[test]
    fn determined_prefixes_separate_liveness() {
        let s = spec(&[], &["G p", "F q"], &["p", "q"]);
        let an = Analyzer::new(&s, SolverBudget::default());
        let fq = parse("F q").unwrap();
        let ext = an.likelihood(&fq, 2).unwrap();
        assert_eq!(ext.value(), 1.0);
        // 16 words of length 2, 4 of them without q
        let det = an.likelihood_as(&fq, 2, Interpretation::PrefixDetermined).unwrap();
        assert_eq!(det.numerator, BigUint::from(12u8));
        assert_eq!(det.denominator, BigUint::from(16u8));
    }

    #[test]
    fn budget_overrun_is_unknown() {
        let s = spec(&[], &["G F p", "G F q"], &["p", "q"]);
        let an = Analyzer::new(
            &s,
            SolverBudget::new(1, std::time::Duration::from_secs(1)).unwrap(),
        );
        let err = an.check_bc(&parse("F G p").unwrap()).unwrap_err();
        assert!(err.is_unknown());
        assert!(matches!(
            err,
            AnalysisError::Unknown {
                check: SubCheck::Inconsistency,
                ..
            }
        ));
    }
}
