//! Contrasty filtering: the post-processing framework (PPFc) and the joint
//! framework (JFc), plus the generality filter used as a baseline.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{AnalysisError, Analyzer};
use crate::ltl::Formula;
use crate::sat::SolverBudget;
use crate::search::{BcSearcher, SearchError, SearchRequest};
use crate::spec::Spec;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct BcId(pub String);

impl fmt::Display for BcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for BcId {
    fn from(s: &str) -> Self {
        BcId(s.to_string())
    }
}

/// Where a BC came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub source: String,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcEntry {
    pub id: BcId,
    pub formula: Formula,
    pub provenance: Provenance,
}

impl BcEntry {
    pub fn new(id: &str, formula: Formula, source: &str, iteration: usize) -> Self {
        BcEntry {
            id: BcId::from(id),
            formula,
            provenance: Provenance {
                source: source.to_string(),
                iteration,
            },
        }
    }
}

/// Ordered BC collection without NNF-duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BcSet {
    entries: Vec<BcEntry>,
}

impl BcSet {
    pub fn new() -> Self {
        BcSet::default()
    }

    /// Adds the entry unless an NNF-equal formula or the same id is present.
    pub fn insert(&mut self, entry: BcEntry) -> bool {
        let nnf = entry.formula.nnf();
        if self
            .entries
            .iter()
            .any(|e| e.id == entry.id || e.formula.nnf() == nnf)
        {
            return false;
        }
        self.entries.push(entry);
        true
    }

    pub fn remove(&mut self, id: &BcId) -> Option<BcEntry> {
        let pos = self.entries.iter().position(|e| &e.id == id)?;
        Some(self.entries.remove(pos))
    }

    pub fn contains(&self, id: &BcId) -> bool {
        self.entries.iter().any(|e| &e.id == id)
    }

    pub fn get(&self, id: &BcId) -> Option<&BcEntry> {
        self.entries.iter().find(|e| &e.id == id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BcEntry> {
        self.entries.iter()
    }

    pub fn ids(&self) -> Vec<BcId> {
        self.entries.iter().map(|e| e.id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|e| (e.id.0.as_str(), &e.formula))
    }
}

impl FromIterator<BcEntry> for BcSet {
    fn from_iter<I: IntoIterator<Item = BcEntry>>(iter: I) -> Self {
        let mut set = BcSet::new();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "dropped")]
pub enum FilterAction {
    KeepBoth,
    DropSubject,
    DropOther,
    /// Mutual witnesses; the larger (or, on equal size, the one rendering
    /// later) is dropped.
    KeepSmaller(BcId),
}

impl FilterAction {
    fn dropped<'a>(&'a self, subject: &'a BcId, other: &'a BcId) -> Option<&'a BcId> {
        match self {
            FilterAction::KeepBoth => None,
            FilterAction::DropSubject => Some(subject),
            FilterAction::DropOther => Some(other),
            FilterAction::KeepSmaller(id) => Some(id),
        }
    }
}

/// One pairwise decision. `None` marks a direction that was not evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterStep {
    pub subject: BcId,
    pub other: BcId,
    pub subject_witnesses_other: Option<bool>,
    pub other_witnesses_subject: Option<bool>,
    pub action: FilterAction,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FilterTrace {
    pub steps: Vec<FilterStep>,
}

impl FilterTrace {
    /// Ids removed by the logged decisions, in order.
    pub fn dropped(&self) -> Vec<&BcId> {
        self.steps
            .iter()
            .filter_map(|s| s.action.dropped(&s.subject, &s.other))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("{id} is not a boundary condition of the spec")]
    NotABc { id: BcId },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("search failed: {0}")]
    Search(#[from] SearchError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Pairwise witness relation with memoization; `holds(f, phi)` is "f is a
/// witness of phi".
pub struct WitnessCache<'a, 's> {
    analyzer: &'a Analyzer<'s>,
    memo: HashMap<(BcId, BcId), bool>,
}

impl<'a, 's> WitnessCache<'a, 's> {
    pub fn new(analyzer: &'a Analyzer<'s>) -> Self {
        WitnessCache {
            analyzer,
            memo: HashMap::new(),
        }
    }

    pub fn holds(&mut self, f: &BcEntry, phi: &BcEntry) -> Result<bool, AnalysisError> {
        let key = (f.id.clone(), phi.id.clone());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = self.analyzer.is_witness(&f.formula, &phi.formula)?;
        self.memo.insert(key, v);
        Ok(v)
    }
}

/// Total order used to break mutual-witness ties: smaller size first, then
/// the lexicographically smaller rendering.
fn compactness(a: &Formula, b: &Formula) -> Ordering {
    a.size()
        .cmp(&b.size())
        .then_with(|| a.to_string().cmp(&b.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalOutcome {
    pub contrastive: bool,
    pub filtered: Vec<BcId>,
    pub steps: Vec<FilterStep>,
}

/// Decide whether `phi` survives against `others` and which of them it
/// filters out. Returns early on the first member that beats `phi`,
/// discarding the partial filter set.
pub fn external_contrasty_filter(
    witnesses: &mut WitnessCache<'_, '_>,
    phi: &BcEntry,
    others: &[&BcEntry],
) -> Result<ExternalOutcome, AnalysisError> {
    let mut filtered = Vec::new();
    let mut steps: Vec<FilterStep> = Vec::new();
    for psi in others {
        let phi_wit = witnesses.holds(phi, psi)?;
        let psi_wit = witnesses.holds(psi, phi)?;
        let step = |action| FilterStep {
            subject: phi.id.clone(),
            other: psi.id.clone(),
            subject_witnesses_other: Some(phi_wit),
            other_witnesses_subject: Some(psi_wit),
            action,
        };
        match (phi_wit, psi_wit) {
            (true, true) => {
                if compactness(&phi.formula, &psi.formula) == Ordering::Greater {
                    steps.retain(|s| s.action == FilterAction::KeepBoth);
                    steps.push(step(FilterAction::KeepSmaller(phi.id.clone())));
                    return Ok(ExternalOutcome {
                        contrastive: false,
                        filtered: Vec::new(),
                        steps,
                    });
                }
                filtered.push(psi.id.clone());
                steps.push(step(FilterAction::KeepSmaller(psi.id.clone())));
            }
            (true, false) => {
                filtered.push(psi.id.clone());
                steps.push(step(FilterAction::DropOther));
            }
            (false, true) => {
                steps.retain(|s| s.action == FilterAction::KeepBoth);
                steps.push(step(FilterAction::DropSubject));
                return Ok(ExternalOutcome {
                    contrastive: false,
                    filtered: Vec::new(),
                    steps,
                });
            }
            (false, false) => steps.push(step(FilterAction::KeepBoth)),
        }
    }
    Ok(ExternalOutcome {
        contrastive: true,
        filtered,
        steps,
    })
}

/// Reduce `b` to a pairwise contrastive subset. Members are visited in
/// ascending size, then ascending id.
pub fn ppfc(analyzer: &Analyzer<'_>, b: &BcSet) -> Result<(BcSet, FilterTrace), FilterError> {
    for e in b.iter() {
        if !analyzer.is_bc(&e.formula)? {
            return Err(FilterError::NotABc { id: e.id.clone() });
        }
    }
    let mut order: Vec<&BcEntry> = b.iter().collect();
    order.sort_by(|x, y| {
        x.formula
            .size()
            .cmp(&y.formula.size())
            .then_with(|| x.id.cmp(&y.id))
    });

    let mut alive: HashSet<BcId> = b.iter().map(|e| e.id.clone()).collect();
    let mut witnesses = WitnessCache::new(analyzer);
    let mut trace = FilterTrace::default();
    for subject in &order {
        if !alive.contains(&subject.id) {
            continue;
        }
        let others: Vec<&BcEntry> = order
            .iter()
            .copied()
            .filter(|e| e.id != subject.id && alive.contains(&e.id))
            .collect();
        let outcome = external_contrasty_filter(&mut witnesses, subject, &others)?;
        if outcome.contrastive {
            for id in &outcome.filtered {
                alive.remove(id);
            }
        } else {
            alive.remove(&subject.id);
        }
        trace.steps.extend(outcome.steps);
    }
    let kept = b.iter().filter(|e| alive.contains(&e.id)).cloned().collect();
    Ok((kept, trace))
}

/// The members of `bc` that `phi` is a witness of.
pub fn internal_contrasty_filter(
    witnesses: &mut WitnessCache<'_, '_>,
    phi: &BcEntry,
    bc: &BcSet,
) -> Result<Vec<BcId>, AnalysisError> {
    let mut out = Vec::new();
    for psi in bc.iter() {
        if witnesses.holds(phi, psi)? {
            out.push(psi.id.clone());
        }
    }
    Ok(out)
}

/// Keep the maximal elements under "is more general than". Of several
/// equivalent BCs only the most compact survives.
pub fn generality_filter(analyzer: &Analyzer<'_>, b: &BcSet) -> Result<BcSet, FilterError> {
    let entries: Vec<&BcEntry> = b.iter().collect();
    let n = entries.len();
    let mut implies = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                // entries[j] more general than entries[i]
                implies[i][j] = analyzer.is_more_general(&entries[j].formula, &entries[i].formula)?;
            }
        }
    }
    let kept = (0..n)
        .filter(|&i| {
            !(0..n).any(|j| {
                if j == i || !implies[i][j] {
                    return false;
                }
                let strictly = !implies[j][i];
                let equivalent_but_better = implies[j][i]
                    && compactness(&entries[j].formula, &entries[i].formula)
                        .then_with(|| entries[j].id.cmp(&entries[i].id))
                        == Ordering::Less;
                strictly || equivalent_but_better
            })
        })
        .map(|i| entries[i].clone())
        .collect();
    Ok(kept)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The no-BC certificate holds under the augmented domain.
    TerminationCondition,
    SearcherExhausted,
    RoundLimit,
}

#[derive(Debug, Clone)]
pub struct JfcConfig {
    pub max_rounds: usize,
    /// Candidates a searcher may examine per round.
    pub search_budget: usize,
    pub budget: SolverBudget,
    pub seed: u64,
    /// Test the termination condition once before the first search round.
    pub check_termination_first: bool,
    /// Re-check that no accepted BC is witnessed by an existing member.
    pub audit: bool,
}

impl Default for JfcConfig {
    fn default() -> Self {
        JfcConfig {
            max_rounds: 50,
            search_budget: 10_000,
            budget: SolverBudget::default(),
            seed: 0,
            check_termination_first: false,
            audit: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JfcOutcome {
    pub bc: BcSet,
    pub terminated: Termination,
    pub trace: FilterTrace,
    /// Every BC the searcher produced, in order.
    pub seen: Vec<BcEntry>,
    pub rounds: usize,
}

/// A JFc run that stopped on an error; `partial` is not certified.
#[derive(Debug, Clone, Error)]
#[error("jfc aborted after {rounds} rounds: {source}")]
pub struct JfcError {
    pub partial: BcSet,
    pub rounds: usize,
    #[source]
    pub source: FilterError,
}

/// Interleave search and filtering: each round searches under
/// `Dom ∪ {¬φ | φ ∈ B_c}`, removes what the new BC witnesses, and stops once
/// the termination condition certifies that no BC remains.
pub fn jfc(
    spec: &Spec,
    searcher: &mut dyn BcSearcher,
    cfg: &JfcConfig,
) -> Result<JfcOutcome, JfcError> {
    let original = Analyzer::new(spec, cfg.budget);
    let mut witnesses = WitnessCache::new(&original);
    let mut bc = BcSet::new();
    let mut trace = FilterTrace::default();
    let mut seen = Vec::new();

    let abort = |bc: &BcSet, rounds: usize, e: FilterError| JfcError {
        partial: bc.clone(),
        rounds,
        source: e,
    };

    if cfg.check_termination_first {
        let held = original
            .termination_condition()
            .map_err(|e| abort(&bc, 0, e.into()))?;
        if held.is_some() {
            return Ok(JfcOutcome {
                bc,
                terminated: Termination::TerminationCondition,
                trace,
                seen,
                rounds: 0,
            });
        }
    }

    for round in 1..=cfg.max_rounds {
        let augmented = spec.augmented(bc.formulas());
        let req = SearchRequest {
            spec: augmented.clone(),
            budget: cfg.budget,
            max_candidates: cfg.search_budget,
            seed: cfg.seed.wrapping_add(round as u64),
        };
        let candidate = searcher
            .next_bc(&req)
            .map_err(|e| abort(&bc, round - 1, e.into()))?;
        let Some(candidate) = candidate else {
            return Ok(JfcOutcome {
                bc,
                terminated: Termination::SearcherExhausted,
                trace,
                seen,
                rounds: round - 1,
            });
        };

        let aug_analyzer = Analyzer::new(&augmented, cfg.budget);
        let verified = aug_analyzer
            .is_bc(&candidate.formula)
            .map_err(|e| abort(&bc, round, e.into()))?;
        let entry = BcEntry::new(
            &format!("bc{round}"),
            candidate.formula,
            searcher.name(),
            round,
        );
        if !verified {
            return Err(abort(&bc, round, FilterError::NotABc { id: entry.id }));
        }
        seen.push(entry.clone());

        if cfg.audit {
            for psi in bc.iter() {
                let w = witnesses
                    .holds(psi, &entry)
                    .map_err(|e| abort(&bc, round, e.into()))?;
                if w {
                    return Err(abort(
                        &bc,
                        round,
                        FilterError::Invariant(format!(
                            "{} witnesses the newly accepted {}",
                            psi.id, entry.id
                        )),
                    ));
                }
            }
        }

        let filtered = internal_contrasty_filter(&mut witnesses, &entry, &bc)
            .map_err(|e| abort(&bc, round, e.into()))?;
        for psi in bc.iter() {
            let drop = filtered.contains(&psi.id);
            trace.steps.push(FilterStep {
                subject: entry.id.clone(),
                other: psi.id.clone(),
                subject_witnesses_other: Some(drop),
                other_witnesses_subject: cfg.audit.then_some(false),
                action: if drop {
                    FilterAction::DropOther
                } else {
                    FilterAction::KeepBoth
                },
            });
        }
        for id in &filtered {
            bc.remove(id);
        }
        bc.insert(entry);

        let next = spec.augmented(bc.formulas());
        let held = Analyzer::new(&next, cfg.budget)
            .termination_condition()
            .map_err(|e| abort(&bc, round, e.into()))?;
        if held.is_some() {
            return Ok(JfcOutcome {
                bc,
                terminated: Termination::TerminationCondition,
                trace,
                seen,
                rounds: round,
            });
        }
    }
    Ok(JfcOutcome {
        bc,
        terminated: Termination::RoundLimit,
        trace,
        seen,
        rounds: cfg.max_rounds,
    })
}
