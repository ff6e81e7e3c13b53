use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An atomic proposition. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prop(Arc<str>);

impl Prop {
    pub fn new(name: &str) -> Self {
        Prop(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Whether `name` is usable as a proposition: `[a-zA-Z_][a-zA-Z0-9_]*`
    /// and not one of the grammar's keywords.
    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
        head_ok
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !super::parse::is_keyword(name)
    }
}

impl fmt::Debug for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// LTL abstract syntax.
///
/// `Implies`, `Eventually`, `Always`, `Release` and `WeakUntil` are kept as
/// nodes so formulas render the way they were written; [`Formula::nnf`]
/// reduces everything to the core `{∧, ∨, X, U, R}` over literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Prop),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Prop::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    pub fn weak_until(a: Formula, b: Formula) -> Self {
        Formula::WeakUntil(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disj<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | Eventually(a) | Always(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b)
            | WeakUntil(a, b) => vec![a, b],
        }
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(_)),
            _ => false,
        }
    }

    /// Number of temporal operators, connectives and literals. A negated atom
    /// is a single literal; constants count as one.
    pub fn size(&self) -> usize {
        if self.is_literal() {
            return 1;
        }
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::depth)
            .max()
            .unwrap_or(0)
    }

    /// The set of propositions occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Prop>) {
        if let Formula::Atom(p) = self {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// All subformulas in pre-order, including `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            for c in f.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Negation normal form over `{true, false, literals, ∧, ∨, X, U, R}`.
    pub fn nnf(&self) -> Formula {
        nnf(self, false)
    }
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    use Formula::*;
    match (f, negate) {
        (True, false) | (False, true) => True,
        (False, false) | (True, true) => False,
        (Atom(_), false) => f.clone(),
        (Atom(_), true) => Formula::not(f.clone()),
        (Not(a), _) => nnf(a, !negate),
        (And(a, b), false) | (Or(a, b), true) => Formula::and(nnf(a, negate), nnf(b, negate)),
        (Or(a, b), false) | (And(a, b), true) => Formula::or(nnf(a, negate), nnf(b, negate)),
        (Implies(a, b), false) => Formula::or(nnf(a, true), nnf(b, false)),
        (Implies(a, b), true) => Formula::and(nnf(a, false), nnf(b, true)),
        (Next(a), _) => Formula::next(nnf(a, negate)),
        (Until(a, b), false) | (Release(a, b), true) => {
            Formula::until(nnf(a, negate), nnf(b, negate))
        }
        (Release(a, b), false) | (Until(a, b), true) => {
            Formula::release(nnf(a, negate), nnf(b, negate))
        }
        (Eventually(a), false) | (Always(a), true) => Formula::until(True, nnf(a, negate)),
        (Always(a), false) | (Eventually(a), true) => Formula::release(False, nnf(a, negate)),
        // a W b == b R (a ∨ b)
        (WeakUntil(a, b), false) => {
            Formula::release(nnf(b, false), Formula::or(nnf(a, false), nnf(b, false)))
        }
        // !(a W b) == !b U (!a ∧ !b)
        (WeakUntil(a, b), true) => {
            Formula::until(nnf(b, true), Formula::and(nnf(a, true), nnf(b, true)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> Formula {
        Formula::atom("h")
    }
    fn m() -> Formula {
        Formula::atom("m")
    }
    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn size_counts_operators_and_literals() {
        assert_eq!(Formula::eventually(Formula::and(h(), m())).size(), 4);
        assert_eq!(p().size(), 1);
        assert_eq!(Formula::not(p()).size(), 1);
        assert_eq!(Formula::not(Formula::not(p())).size(), 2);
        assert_eq!(Formula::True.size(), 1);
    }

    #[test]
    fn nnf_examples() {
        let not_g = Formula::not(Formula::always(p()));
        assert_eq!(not_g.nnf(), Formula::until(Formula::True, Formula::not(p())));
        assert_eq!(p().nnf(), p());
        let a = Formula::atom("a");
        let b = Formula::atom("b");
        assert_eq!(
            Formula::not(Formula::until(a.clone(), b.clone())).nnf(),
            Formula::release(Formula::not(a), Formula::not(b))
        );
    }

    #[test]
    fn nnf_removes_derived_operators() {
        let f = Formula::not(Formula::implies(
            Formula::weak_until(h(), m()),
            Formula::always(Formula::eventually(p())),
        ));
        for sub in f.nnf().subformulas() {
            match sub {
                Formula::Implies(..)
                | Formula::Eventually(_)
                | Formula::Always(_)
                | Formula::WeakUntil(..) => panic!("derived operator survived: {sub:?}"),
                Formula::Not(inner) => assert!(matches!(**inner, Formula::Atom(_))),
                _ => {}
            }
        }
    }

    #[test]
    fn conj_of_nothing_is_true() {
        assert_eq!(Formula::conj(vec![]), Formula::True);
        assert_eq!(Formula::disj(vec![]), Formula::False);
        assert_eq!(Formula::conj(vec![p()]), p());
    }
}
