use std::collections::HashSet;

use thiserror::Error;

use crate::ltl::{Formula, Vocabulary};
use crate::sat::{self, SolverBudget, SolverError};

/// A formula with an identifier and optional human-facing labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFormula {
    pub id: String,
    pub name: String,
    pub description: String,
    pub formula: Formula,
}

impl NamedFormula {
    pub fn new(id: &str, formula: Formula) -> Self {
        NamedFormula {
            id: id.to_string(),
            name: String::new(),
            description: String::new(),
            formula,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("BC analysis needs at least two goals, found {0}")]
    TooFewGoals(usize),
    #[error("duplicate formula name `{0}`")]
    DuplicateName(String),
    #[error("formula `{id}` uses proposition `{prop}` outside the vocabulary")]
    UnknownProposition { id: String, prop: String },
    #[error("domain properties and goals are jointly unsatisfiable")]
    Inconsistent,
    #[error("consistency check failed: {0}")]
    Solver(#[from] SolverError),
}

/// Domain properties and goals over a shared vocabulary, plus named fixture
/// formulas (candidate BCs shipped with the spec).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spec {
    id: String,
    vocab: Vocabulary,
    dom: Vec<NamedFormula>,
    goals: Vec<NamedFormula>,
    fixtures: Vec<NamedFormula>,
}

impl Spec {
    /// Structural validation only; see [`Spec::check_consistent`].
    pub fn new(
        id: &str,
        vocab: Vocabulary,
        dom: Vec<NamedFormula>,
        goals: Vec<NamedFormula>,
        fixtures: Vec<NamedFormula>,
    ) -> Result<Self, SpecError> {
        if goals.len() < 2 {
            return Err(SpecError::TooFewGoals(goals.len()));
        }
        let mut names = HashSet::new();
        for nf in dom.iter().chain(&goals).chain(&fixtures) {
            if !names.insert(nf.id.as_str()) {
                return Err(SpecError::DuplicateName(nf.id.clone()));
            }
            if let Some(p) = nf.formula.atoms().into_iter().find(|p| vocab.index_of(p).is_none()) {
                return Err(SpecError::UnknownProposition {
                    id: nf.id.clone(),
                    prop: p.name().to_string(),
                });
            }
        }
        Ok(Spec {
            id: id.to_string(),
            vocab,
            dom,
            goals,
            fixtures,
        })
    }

    /// Fails unless `Dom ∧ G` is satisfiable.
    pub fn check_consistent(&self, budget: &SolverBudget) -> Result<(), SpecError> {
        let all = Formula::and(self.dom_formula(), self.goal_formula());
        if sat::is_sat(&all, budget)?.is_sat() {
            Ok(())
        } else {
            Err(SpecError::Inconsistent)
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dom(&self) -> &[NamedFormula] {
        &self.dom
    }

    pub fn goals(&self) -> &[NamedFormula] {
        &self.goals
    }

    pub fn fixtures(&self) -> &[NamedFormula] {
        &self.fixtures
    }

    pub fn fixture(&self, id: &str) -> Option<&NamedFormula> {
        self.fixtures.iter().find(|f| f.id == id)
    }

    /// Conjunction of the domain properties (`true` when there are none).
    pub fn dom_formula(&self) -> Formula {
        Formula::conj(self.dom.iter().map(|d| d.formula.clone()))
    }

    /// Conjunction of all goals.
    pub fn goal_formula(&self) -> Formula {
        Formula::conj(self.goals.iter().map(|g| g.formula.clone()))
    }

    /// Conjunction of all goals except goal `i`.
    pub fn goals_without(&self, i: usize) -> Formula {
        Formula::conj(
            self.goals
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| g.formula.clone()),
        )
    }

    /// Total size of all domain properties and goals.
    pub fn size(&self) -> usize {
        self.dom
            .iter()
            .chain(&self.goals)
            .map(|nf| nf.formula.size())
            .sum()
    }

    /// The same goals under `Dom ∪ {¬φ | φ ∈ bcs}`.
    pub fn augmented<'a, I>(&self, bcs: I) -> Spec
    where
        I: IntoIterator<Item = (&'a str, &'a Formula)>,
    {
        let mut out = self.clone();
        out.fixtures.clear();
        for (id, phi) in bcs {
            let mut nf = NamedFormula::new(&format!("not_{id}"), Formula::not(phi.clone()));
            nf.description = format!("negation of boundary condition {id}");
            out.dom.push(nf);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn goal(id: &str, s: &str) -> NamedFormula {
        NamedFormula::new(id, parse(s).unwrap())
    }

    #[test]
    fn needs_two_goals() {
        let vocab = Vocabulary::new(["p"]).unwrap();
        let err = Spec::new("s", vocab, vec![], vec![goal("g1", "G p")], vec![]).unwrap_err();
        assert_eq!(err, SpecError::TooFewGoals(1));
    }

    #[test]
    fn rejects_duplicates_and_foreign_atoms() {
        let vocab = Vocabulary::new(["p"]).unwrap();
        let err = Spec::new(
            "s",
            vocab.clone(),
            vec![],
            vec![goal("g", "G p"), goal("g", "F p")],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, SpecError::DuplicateName("g".into()));
        let err = Spec::new(
            "s",
            vocab,
            vec![],
            vec![goal("g1", "G p"), goal("g2", "F q")],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, SpecError::UnknownProposition { .. }));
    }

    #[test]
    fn consistency_check() {
        let vocab = Vocabulary::new(["p"]).unwrap();
        let s = Spec::new(
            "s",
            vocab,
            vec![],
            vec![goal("g1", "G p"), goal("g2", "F !p")],
            vec![],
        )
        .unwrap();
        assert_eq!(
            s.check_consistent(&SolverBudget::default()),
            Err(SpecError::Inconsistent)
        );
    }

    #[test]
    fn goal_projections() {
        let vocab = Vocabulary::new(["a", "b", "c"]).unwrap();
        let s = Spec::new(
            "s",
            vocab,
            vec![],
            vec![goal("g1", "a"), goal("g2", "b"), goal("g3", "c")],
            vec![],
        )
        .unwrap();
        assert_eq!(s.goals_without(1), parse("a && c").unwrap());
        assert_eq!(s.dom_formula(), Formula::True);
        let aug = s.augmented([("b1", &Formula::atom("a"))]);
        assert_eq!(aug.dom_formula(), parse("!a").unwrap());
    }
}
