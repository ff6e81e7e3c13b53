//! Deterministic enumeration of BCs in a fixed syntactic family.
//!
//! Candidates are built from state formulas `c`: conjunctions of one to
//! three literals over distinct propositions. The family is
//! `c`, `X c`, `F c`, `G c`, `F G c` and `F(c1 && X c2)`, tried in
//! ascending size and then rendering order.
//!
//! Every BC found is also offered in a widened form
//! `c || (G₋ᵢ && !gᵢ)` when the widened formula is still a BC and stays a
//! mutual witness of `c`: it describes the same divergence but excludes more
//! behaviour once negated into the domain.

use std::collections::{HashSet, VecDeque};

use super::{BcSearcher, Candidate, SearchError, SearchRequest};
use crate::analysis::Analyzer;
use crate::ltl::{Formula, Vocabulary};

#[derive(Debug, Clone, Copy)]
pub struct PatternConfig {
    /// Offer the widened variant of each BC before the BC itself.
    pub widen: bool,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig { widen: true }
    }
}

fn state_formulas(vocab: &Vocabulary) -> Vec<Formula> {
    let props = vocab.props();
    let n = props.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if members.len() > 3 {
            continue;
        }
        for polarity in 0u32..(1 << members.len()) {
            let lits = members.iter().enumerate().map(|(j, &i)| {
                let atom = Formula::Atom(props[i].clone());
                if polarity & (1 << j) != 0 {
                    Formula::not(atom)
                } else {
                    atom
                }
            });
            out.push(Formula::conj(lits));
        }
    }
    out
}

/// The full candidate family for `vocab`, NNF-deduplicated, in search order.
pub fn pattern_candidates(vocab: &Vocabulary) -> Vec<Formula> {
    let states = state_formulas(vocab);
    let mut all = Vec::new();
    for c in &states {
        all.push(c.clone());
        all.push(Formula::next(c.clone()));
        all.push(Formula::eventually(c.clone()));
        all.push(Formula::always(c.clone()));
        all.push(Formula::eventually(Formula::always(c.clone())));
    }
    for c1 in &states {
        for c2 in &states {
            all.push(Formula::eventually(Formula::and(
                c1.clone(),
                Formula::next(c2.clone()),
            )));
        }
    }
    let mut keyed: Vec<(usize, String, Formula)> = all
        .into_iter()
        .map(|f| (f.size(), f.to_string(), f))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let mut seen = HashSet::new();
    keyed
        .into_iter()
        .filter(|(_, _, f)| seen.insert(f.nnf()))
        .map(|(_, _, f)| f)
        .collect()
}

/// Lazy stream of verified BCs for one request.
pub struct PatternSearch<'s> {
    analyzer: Analyzer<'s>,
    candidates: Vec<Formula>,
    next: usize,
    examined: usize,
    limit: usize,
    config: PatternConfig,
    pending: VecDeque<Formula>,
    yielded: HashSet<Formula>,
    failed: bool,
}

impl<'s> PatternSearch<'s> {
    pub fn new(req: &'s SearchRequest, config: PatternConfig) -> Self {
        PatternSearch {
            analyzer: Analyzer::new(&req.spec, req.budget),
            candidates: pattern_candidates(req.spec.vocab()),
            next: 0,
            examined: 0,
            limit: req.max_candidates,
            config,
            pending: VecDeque::new(),
            yielded: HashSet::new(),
            failed: false,
        }
    }

    /// `base` widened by goal-violation disjuncts, if any survive.
    fn widen(&self, base: &Formula) -> Result<Option<Formula>, SearchError> {
        let spec = self.analyzer.spec();
        let mut current = base.clone();
        for (i, goal) in spec.goals().iter().enumerate() {
            let violation = Formula::and(spec.goals_without(i), Formula::not(goal.formula.clone()));
            let wider = Formula::or(current.clone(), violation);
            if self.analyzer.is_bc(&wider)?
                && self.analyzer.is_witness(base, &wider)?
                && self.analyzer.is_witness(&wider, base)?
            {
                current = wider;
            }
        }
        Ok((current != *base).then_some(current))
    }

    fn advance(&mut self) -> Result<bool, SearchError> {
        while self.next < self.candidates.len() && self.examined < self.limit {
            let f = self.candidates[self.next].clone();
            self.next += 1;
            self.examined += 1;
            if !self.analyzer.is_inconsistent(&f)? || !self.analyzer.is_bc(&f)? {
                continue;
            }
            if self.config.widen {
                if let Some(w) = self.widen(&f)? {
                    self.pending.push_back(w);
                }
            }
            self.pending.push_back(f);
            return Ok(true);
        }
        Ok(false)
    }
}

impl Iterator for PatternSearch<'_> {
    type Item = Result<Candidate, SearchError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            while let Some(f) = self.pending.pop_front() {
                if self.yielded.insert(f.nnf()) {
                    return Some(Ok(Candidate::pattern(f)));
                }
            }
            match self.advance() {
                Ok(true) => continue,
                Ok(false) => return None,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Pattern search as a restartable JFc backend.
#[derive(Debug, Clone, Default)]
pub struct PatternSearcher {
    pub config: PatternConfig,
}

impl BcSearcher for PatternSearcher {
    fn name(&self) -> &str {
        "pattern"
    }

    fn next_bc(&mut self, req: &SearchRequest) -> Result<Option<Candidate>, SearchError> {
        PatternSearch::new(req, self.config).next().transpose()
    }
}
