//! Genetic search over formula syntax trees.
//!
//! The initial population is drawn from the subformulas of the domain
//! properties and goals, their negations, and the spec's literals. Fitness is
//! the number of BC conditions a formula meets (inconsistency, one
//! minimality check per goal, non-triviality), ties broken toward smaller
//! formulas. Every member meeting all conditions is yielded once.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BcSearcher, Candidate, Fitness, GeneratorTag, SearchError, SearchRequest};
use crate::analysis::Analyzer;
use crate::ltl::Formula;

#[derive(Debug, Clone, Copy)]
pub struct GeneticConfig {
    pub population: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub tournament: usize,
    pub elite: usize,
    /// Offspring larger than this are discarded.
    pub max_size: usize,
}

impl Default for GeneticConfig {
    fn default() -> Self {
        GeneticConfig {
            population: 100,
            generations: 50,
            mutation_rate: 0.2,
            crossover_rate: 0.7,
            tournament: 3,
            elite: 2,
            max_size: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Score {
    satisfied: u32,
    size: usize,
}

impl Score {
    /// Better scores sort first.
    fn rank(&self, other: &Score) -> Ordering {
        other
            .satisfied
            .cmp(&self.satisfied)
            .then(self.size.cmp(&other.size))
    }
}

pub struct GeneticSearch<'s> {
    analyzer: Analyzer<'s>,
    cfg: GeneticConfig,
    rng: ChaCha8Rng,
    literals: Vec<Formula>,
    pool: Vec<Formula>,
    population: Vec<Formula>,
    generation: usize,
    scores: HashMap<Formula, Score>,
    total: u32,
    yielded: HashSet<Formula>,
    buffer: VecDeque<Candidate>,
    remaining: usize,
    /// Candidates whose evaluation ran out of solver budget.
    pub undetermined: usize,
}

impl<'s> GeneticSearch<'s> {
    pub fn new(req: &'s SearchRequest, cfg: GeneticConfig) -> Self {
        let spec = &req.spec;
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        let literals: Vec<Formula> = spec
            .vocab()
            .iter()
            .flat_map(|p| {
                let a = Formula::Atom(p.clone());
                [a.clone(), Formula::not(a)]
            })
            .collect();

        let mut pool: Vec<Formula> = Vec::new();
        let mut seen = HashSet::new();
        for nf in spec.dom().iter().chain(spec.goals()) {
            for sub in nf.formula.subformulas() {
                for f in [sub.clone(), Formula::not(sub.clone())] {
                    if seen.insert(f.clone()) {
                        pool.push(f);
                    }
                }
            }
        }
        for l in &literals {
            if seen.insert(l.clone()) {
                pool.push(l.clone());
            }
        }

        let mut population = Vec::with_capacity(cfg.population);
        let mut members = HashSet::new();
        while population.len() < cfg.population {
            let f = random_seed(&pool, &mut rng);
            if f.size() <= cfg.max_size && members.insert(f.clone()) {
                population.push(f);
            }
            if members.len() >= pool.len() * pool.len() {
                break;
            }
        }
        while population.len() < cfg.population {
            population.push(random_seed(&pool, &mut rng));
        }

        GeneticSearch {
            analyzer: Analyzer::new(spec, req.budget),
            total: spec.goals().len() as u32 + 2,
            cfg,
            rng,
            literals,
            pool,
            population,
            generation: 0,
            scores: HashMap::new(),
            yielded: HashSet::new(),
            buffer: VecDeque::new(),
            remaining: req.max_candidates,
            undetermined: 0,
        }
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    fn score(&mut self, f: &Formula) -> Score {
        if let Some(s) = self.scores.get(f) {
            return *s;
        }
        let satisfied = match self.analyzer.check_bc(f) {
            Ok(v) => {
                v.inconsistency as u32
                    + v.minimality.iter().filter(|m| m.holds).count() as u32
                    + v.non_triviality as u32
            }
            // unevaluable candidates are unfit; they are never yielded
            Err(_) => {
                self.undetermined += 1;
                0
            }
        };
        let s = Score {
            satisfied,
            size: f.size(),
        };
        self.scores.insert(f.clone(), s);
        s
    }

    /// Score the current population and queue its unseen BCs.
    fn evaluate(&mut self) -> Vec<Score> {
        let members = self.population.clone();
        let mut out = Vec::with_capacity(members.len());
        for f in members {
            let s = self.score(&f);
            if s.satisfied == self.total && self.yielded.insert(f.nnf()) {
                self.buffer.push_back(Candidate {
                    formula: f,
                    tag: GeneratorTag::Genetic,
                    fitness: Some(Fitness {
                        satisfied: s.satisfied,
                        total: self.total,
                    }),
                });
            }
            out.push(s);
        }
        out
    }

    fn tournament(&mut self, scores: &[Score]) -> usize {
        let n = self.population.len();
        let mut best = self.rng.gen_range(0..n);
        for _ in 1..self.cfg.tournament {
            let c = self.rng.gen_range(0..n);
            if scores[c].rank(&scores[best]) == Ordering::Less {
                best = c;
            }
        }
        best
    }

    fn breed(&mut self, scores: &[Score]) {
        let mut order: Vec<usize> = (0..self.population.len()).collect();
        order.sort_by(|&a, &b| {
            scores[a]
                .rank(&scores[b])
                .then_with(|| self.population[a].to_string().cmp(&self.population[b].to_string()))
        });
        let mut next: Vec<Formula> = order
            .iter()
            .take(self.cfg.elite)
            .map(|&i| self.population[i].clone())
            .collect();
        let mut members: HashSet<Formula> = next.iter().cloned().collect();
        let mut attempts = 0;
        while next.len() < self.cfg.population {
            attempts += 1;
            if attempts > 4 * self.cfg.population {
                // the population has collapsed; refill with fresh seeds
                let f = random_seed(&self.pool, &mut self.rng);
                next.push(f);
                continue;
            }
            let a = self.tournament(scores);
            let mut child = self.population[a].clone();
            if self.rng.gen_bool(self.cfg.crossover_rate) {
                let b = self.tournament(scores);
                child = self.crossover(&child, &self.population[b].clone());
            }
            if self.rng.gen_bool(self.cfg.mutation_rate) {
                child = self.mutate(&child);
            }
            if child.size() <= self.cfg.max_size && members.insert(child.clone()) {
                next.push(child);
            }
        }
        self.population = next;
    }

    fn crossover(&mut self, a: &Formula, b: &Formula) -> Formula {
        let donor_at = self.rng.gen_range(0..node_count(b));
        let donor = subtree(b, donor_at).clone();
        let at = self.rng.gen_range(0..node_count(a));
        replace(a, at, donor)
    }

    fn random_literal(&mut self) -> Formula {
        self.literals
            .choose(&mut self.rng)
            .cloned()
            .unwrap_or(Formula::True)
    }

    fn mutate(&mut self, f: &Formula) -> Formula {
        // root edits change the whole formula's shape, so favour them
        let at = if self.rng.gen_bool(0.25) {
            0
        } else {
            self.rng.gen_range(0..node_count(f))
        };
        let node = subtree(f, at).clone();
        let new = match self.rng.gen_range(0..3) {
            0 => self.replace_operator(&node),
            1 => {
                let other = if self.rng.gen_bool(0.5) {
                    self.random_literal()
                } else {
                    self.pool.choose(&mut self.rng).cloned().unwrap_or(Formula::True)
                };
                match self.rng.gen_range(0..8) {
                    0 => Formula::not(node),
                    1 => Formula::next(node),
                    2 => Formula::eventually(node),
                    3 => Formula::always(node),
                    4 => Formula::and(node, other),
                    5 | 6 => Formula::or(node, other),
                    _ => Formula::until(node, other),
                }
            }
            _ => {
                let children = node.children();
                match children.choose(&mut self.rng) {
                    Some(c) => (*c).clone(),
                    None => self.replace_operator(&node),
                }
            }
        };
        replace(f, at, new)
    }

    fn replace_operator(&mut self, node: &Formula) -> Formula {
        use Formula::*;
        match node {
            True | False | Atom(_) => self.random_literal(),
            Not(a) | Next(a) | Eventually(a) | Always(a) => {
                let a = (**a).clone();
                match self.rng.gen_range(0..4) {
                    0 => Formula::not(a),
                    1 => Formula::next(a),
                    2 => Formula::eventually(a),
                    _ => Formula::always(a),
                }
            }
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b)
            | WeakUntil(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                match self.rng.gen_range(0..6) {
                    0 => Formula::and(a, b),
                    1 => Formula::or(a, b),
                    2 => Formula::implies(a, b),
                    3 => Formula::until(a, b),
                    4 => Formula::release(a, b),
                    _ => Formula::weak_until(a, b),
                }
            }
        }
    }
}

impl Iterator for GeneticSearch<'_> {
    type Item = Result<Candidate, SearchError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.remaining == 0 {
                return None;
            }
            if let Some(c) = self.buffer.pop_front() {
                self.remaining -= 1;
                return Some(Ok(c));
            }
            if self.generation > self.cfg.generations {
                return None;
            }
            let scores = self.evaluate();
            self.generation += 1;
            if self.generation <= self.cfg.generations {
                self.breed(&scores);
            }
        }
    }
}

/// Genetic search as a JFc backend; each round reseeds from the request.
#[derive(Debug, Clone, Default)]
pub struct GeneticSearcher {
    pub config: GeneticConfig,
}

impl BcSearcher for GeneticSearcher {
    fn name(&self) -> &str {
        "genetic"
    }

    fn next_bc(&mut self, req: &SearchRequest) -> Result<Option<Candidate>, SearchError> {
        GeneticSearch::new(req, self.config).next().transpose()
    }
}

/// A pool member, or two combined by a random connective.
fn random_seed(pool: &[Formula], rng: &mut ChaCha8Rng) -> Formula {
    let a = pool.choose(rng).expect("non-empty pool").clone();
    if rng.gen_bool(1.0 / 3.0) {
        return a;
    }
    let b = pool.choose(rng).expect("non-empty pool").clone();
    match rng.gen_range(0..6) {
        0 | 1 => Formula::or(a, b),
        2 => Formula::and(a, b),
        3 => Formula::eventually(a),
        4 => Formula::next(a),
        _ => Formula::always(a),
    }
}

fn node_count(f: &Formula) -> usize {
    f.subformulas().len()
}

/// The `at`-th node in pre-order.
fn subtree(f: &Formula, at: usize) -> &Formula {
    f.subformulas()[at]
}

/// Replace the `at`-th pre-order node.
fn replace(f: &Formula, at: usize, new: Formula) -> Formula {
    fn go(f: &Formula, at: &mut usize, new: &mut Option<Formula>) -> Formula {
        if *at == 0 {
            *at = usize::MAX;
            return new.take().expect("replaced once");
        }
        *at = at.wrapping_sub(1);
        use Formula::*;
        let mut rec = |g: &Formula| Box::new(go(g, at, new));
        match f {
            True | False | Atom(_) => f.clone(),
            Not(a) => Not(rec(a)),
            Next(a) => Next(rec(a)),
            Eventually(a) => Eventually(rec(a)),
            Always(a) => Always(rec(a)),
            And(a, b) => {
                let a = rec(a);
                And(a, rec(b))
            }
            Or(a, b) => {
                let a = rec(a);
                Or(a, rec(b))
            }
            Implies(a, b) => {
                let a = rec(a);
                Implies(a, rec(b))
            }
            Until(a, b) => {
                let a = rec(a);
                Until(a, rec(b))
            }
            Release(a, b) => {
                let a = rec(a);
                Release(a, rec(b))
            }
            WeakUntil(a, b) => {
                let a = rec(a);
                WeakUntil(a, rec(b))
            }
        }
    }
    let mut at = at;
    go(f, &mut at, &mut Some(new))
}
