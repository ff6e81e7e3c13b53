//! Counting length-k model bases.
//!
//! A word `u` of length k is counted iff it is the prefix of at least one
//! model of the constraint conjunction. The tableau graph is pruned to states
//! that can still reach an accepting cycle, then determinized on the fly by
//! subset construction so that every word is counted exactly once.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::tableau::{Graph, INIT};
use super::{SolverBudget, SolverError};
use crate::ltl::{Formula, Vocabulary};

pub const DEFAULT_ALPHABET_CAP: u64 = 1 << 12;

#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    pub budget: SolverBudget,
    /// Largest admissible alphabet, i.e. `2^|vocab|`.
    pub alphabet_cap: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            budget: SolverBudget::default(),
            alphabet_cap: DEFAULT_ALPHABET_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub k: usize,
    pub count: BigUint,
    pub alphabet_size: u64,
}

/// Number of length-`k` words over `2^vocab` that extend to a model of every
/// formula in `constraints`.
pub fn count_prefixes(
    constraints: &[Formula],
    vocab: &Vocabulary,
    k: usize,
    opts: &CountOptions,
) -> Result<CountResult, SolverError> {
    if k == 0 {
        return Err(SolverError::InvalidLength);
    }
    let alphabet_size = 1u64
        .checked_shl(vocab.len() as u32)
        .filter(|&a| a <= opts.alphabet_cap)
        .ok_or(SolverError::VocabularyTooLarge {
            props: vocab.len(),
            cap: opts.alphabet_cap,
        })?;

    let query = Formula::conj(constraints.iter().cloned());
    let graph = Graph::build(&query, vocab, &opts.budget)?;
    let live = graph.live_states();
    if !live[INIT] {
        return Ok(CountResult {
            k,
            count: BigUint::zero(),
            alphabet_size,
        });
    }

    let mut dfa = SubsetDfa::new(&graph, &live, alphabet_size);
    let start = dfa.intern(vec![INIT]);
    let mut counts: Vec<BigUint> = vec![BigUint::zero(); dfa.len()];
    counts[start] = BigUint::from(1u8);

    for _ in 0..k {
        let mut next: Vec<BigUint> = Vec::new();
        for (m, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = dfa.row(m).to_vec();
            for target in row.into_iter().flatten() {
                if next.len() <= target {
                    next.resize(target + 1, BigUint::zero());
                }
                next[target] += c;
            }
        }
        counts = next;
    }
    Ok(CountResult {
        k,
        count: counts.into_iter().sum(),
        alphabet_size,
    })
}

/// Lazily built subset automaton over the live states of a tableau.
struct SubsetDfa<'g> {
    graph: &'g Graph,
    live: &'g [bool],
    alphabet_size: u64,
    macros: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    rows: Vec<Option<Vec<Option<usize>>>>,
}

impl<'g> SubsetDfa<'g> {
    fn new(graph: &'g Graph, live: &'g [bool], alphabet_size: u64) -> Self {
        SubsetDfa {
            graph,
            live,
            alphabet_size,
            macros: Vec::new(),
            index: HashMap::new(),
            rows: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.macros.len()
    }

    fn intern(&mut self, mut states: Vec<usize>) -> usize {
        states.sort_unstable();
        states.dedup();
        if let Some(&id) = self.index.get(&states) {
            return id;
        }
        let id = self.macros.len();
        self.index.insert(states.clone(), id);
        self.macros.push(states);
        self.rows.push(None);
        id
    }

    /// Successor macro-state per letter; `None` where no live run continues.
    fn row(&mut self, m: usize) -> &[Option<usize>] {
        if self.rows[m].is_none() {
            let members = self.macros[m].clone();
            let mut row = Vec::with_capacity(self.alphabet_size as usize);
            for letter in 0..self.alphabet_size {
                let succ: Vec<usize> = members
                    .iter()
                    .flat_map(|&s| self.graph.edges[s].iter())
                    .filter(|e| self.live[e.target] && e.matches(letter))
                    .map(|e| e.target)
                    .collect();
                row.push(if succ.is_empty() {
                    None
                } else {
                    Some(self.intern(succ))
                });
            }
            self.rows[m] = Some(row);
        }
        self.rows[m].as_deref().expect("row computed above")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn count(fs: &[&str], props: &[&str], k: usize) -> u64 {
        let vocab = Vocabulary::new(props.iter().copied()).unwrap();
        let fs: Vec<Formula> = fs.iter().map(|s| parse(s).unwrap()).collect();
        let r = count_prefixes(&fs, &vocab, k, &CountOptions::default()).unwrap();
        r.count.try_into().unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(count(&["G p"], &["p"], 3), 1);
        assert_eq!(count(&["F p"], &["p"], 1), 2);
        assert_eq!(count(&["true"], &["p", "q"], 3), 64);
        assert_eq!(count(&["false"], &["p", "q"], 3), 0);
        // p must hold exactly at step 1
        assert_eq!(count(&["X p", "G(p -> X G !p)"], &["p"], 3), 1);
    }

    #[test]
    fn words_with_several_runs_count_once() {
        // `F p || F q` has two runs for most words; the prefix count over
        // {p,q} must still be the full 4^k.
        assert_eq!(count(&["F p || F q"], &["p", "q"], 2), 16);
    }

    #[test]
    fn rejects_bad_arguments() {
        let vocab = Vocabulary::new(["p"]).unwrap();
        let f = vec![Formula::True];
        assert_eq!(
            count_prefixes(&f, &vocab, 0, &CountOptions::default()),
            Err(SolverError::InvalidLength)
        );
        let opts = CountOptions {
            alphabet_cap: 1,
            ..CountOptions::default()
        };
        assert!(matches!(
            count_prefixes(&f, &vocab, 1, &opts),
            Err(SolverError::VocabularyTooLarge { .. })
        ));
    }
}
