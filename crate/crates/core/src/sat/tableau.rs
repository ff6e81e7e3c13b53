//! Explicit-state tableau for NNF LTL.
//!
//! A state is the set of obligations that must hold from the current step
//! on. Expanding a state yields edges labelled by a consistent literal cube
//! and leading to the set of `X`-obligations for the next step. An edge
//! carries the `U`-subformulas it postponed; a run is accepting iff every
//! `U` is left unpostponed infinitely often (transition-based generalized
//! Büchi acceptance).

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::time::Instant;

use super::bitset::BitSet;
use super::{SolverBudget, SolverError};
use crate::ltl::{Formula, LassoTrace, Prop, State, Vocabulary};

pub(crate) type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Next(NodeId),
    Until(NodeId, NodeId),
    Release(NodeId, NodeId),
}

/// Hash-consed subformula table for one query.
struct Closure {
    nodes: Vec<Node>,
    ids: HashMap<Node, NodeId>,
    until_slot: HashMap<NodeId, usize>,
}

impl Closure {
    fn new() -> Self {
        Closure {
            nodes: Vec::new(),
            ids: HashMap::new(),
            until_slot: HashMap::new(),
        }
    }

    fn intern(&mut self, n: Node) -> NodeId {
        let n = match n {
            Node::And(a, b) => match (self.nodes[a as usize], self.nodes[b as usize]) {
                (Node::False, _) | (_, Node::False) => Node::False,
                (Node::True, _) => return b,
                (_, Node::True) => return a,
                _ if a == b => return a,
                _ => Node::And(a.min(b), a.max(b)),
            },
            Node::Or(a, b) => match (self.nodes[a as usize], self.nodes[b as usize]) {
                (Node::True, _) | (_, Node::True) => Node::True,
                (Node::False, _) => return b,
                (_, Node::False) => return a,
                _ if a == b => return a,
                _ => Node::Or(a.min(b), a.max(b)),
            },
            Node::Next(a) if matches!(self.nodes[a as usize], Node::True | Node::False) => {
                return a
            }
            other => other,
        };
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n);
        self.ids.insert(n, id);
        if let Node::Until(..) = n {
            let slot = self.until_slot.len();
            self.until_slot.insert(id, slot);
        }
        id
    }

    /// Intern an NNF formula. Atoms must be in `vocab`.
    fn build(&mut self, f: &Formula, vocab: &Vocabulary) -> Result<NodeId, SolverError> {
        let lit = |p: &Prop, pos: bool, this: &mut Self| -> Result<NodeId, SolverError> {
            let i = vocab
                .index_of(p)
                .ok_or_else(|| SolverError::UnknownProposition(p.name().to_string()))?;
            Ok(this.intern(Node::Lit(i as u32, pos)))
        };
        Ok(match f {
            Formula::True => self.intern(Node::True),
            Formula::False => self.intern(Node::False),
            Formula::Atom(p) => lit(p, true, self)?,
            Formula::Not(inner) => match &**inner {
                Formula::Atom(p) => lit(p, false, self)?,
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::And(a, b) => {
                let (a, b) = (self.build(a, vocab)?, self.build(b, vocab)?);
                self.intern(Node::And(a, b))
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.build(a, vocab)?, self.build(b, vocab)?);
                self.intern(Node::Or(a, b))
            }
            Formula::Next(a) => {
                let a = self.build(a, vocab)?;
                self.intern(Node::Next(a))
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.build(a, vocab)?, self.build(b, vocab)?);
                match self.nodes[b as usize] {
                    Node::True | Node::False => b,
                    _ => self.intern(Node::Until(a, b)),
                }
            }
            Formula::Release(a, b) => {
                let (a, b) = (self.build(a, vocab)?, self.build(b, vocab)?);
                match (self.nodes[a as usize], self.nodes[b as usize]) {
                    (_, Node::True | Node::False) => b,
                    (Node::True, _) => b,
                    _ => self.intern(Node::Release(a, b)),
                }
            }
            Formula::Implies(..)
            | Formula::Eventually(_)
            | Formula::Always(_)
            | Formula::WeakUntil(..) => unreachable!("input is in negation normal form"),
        })
    }

    fn until_count(&self) -> usize {
        self.until_slot.len()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub pos: u64,
    pub neg: u64,
    pub target: usize,
    postponed: BitSet,
}

impl Edge {
    /// Does the letter (a valuation bitmask) satisfy the edge label?
    pub fn matches(&self, letter: u64) -> bool {
        self.pos & letter == self.pos && self.neg & letter == 0
    }

    fn fulfils(&self, slot: usize) -> bool {
        !self.postponed.contains(slot)
    }
}

#[derive(Clone)]
struct Cube {
    pos: u64,
    neg: u64,
    next: BTreeSet<NodeId>,
    postponed: BitSet,
    done: HashSet<NodeId>,
}

/// The reachable state graph of one formula.
pub(crate) struct Graph {
    pub edges: Vec<Vec<Edge>>,
    until_count: usize,
}

pub(crate) const INIT: usize = 0;

impl Graph {
    /// Build the full reachable graph of `f` (any shape; NNF is applied here).
    pub fn build(
        f: &Formula,
        vocab: &Vocabulary,
        budget: &SolverBudget,
    ) -> Result<Graph, SolverError> {
        if vocab.len() > 64 {
            return Err(SolverError::TooManyPropositions(vocab.len()));
        }
        let started = Instant::now();
        let mut closure = Closure::new();
        let root = closure.build(&f.nnf(), vocab)?;

        let mut index: HashMap<Vec<NodeId>, usize> = HashMap::new();
        let mut states: Vec<Vec<NodeId>> = vec![vec![root]];
        index.insert(vec![root], INIT);
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        let mut queue = VecDeque::from([INIT]);

        while let Some(s) = queue.pop_front() {
            if started.elapsed() > budget.time_limit {
                return Err(SolverError::BudgetExceeded {
                    states: states.len(),
                    elapsed: started.elapsed(),
                });
            }
            let cubes = expand(&closure, &states[s]);
            let mut out = Vec::with_capacity(cubes.len());
            for cube in cubes {
                let key: Vec<NodeId> = cube.next.into_iter().collect();
                let target = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = states.len();
                        if t >= budget.max_states {
                            return Err(SolverError::BudgetExceeded {
                                states: t,
                                elapsed: started.elapsed(),
                            });
                        }
                        index.insert(key.clone(), t);
                        states.push(key);
                        queue.push_back(t);
                        t
                    }
                };
                out.push(Edge {
                    pos: cube.pos,
                    neg: cube.neg,
                    target,
                    postponed: cube.postponed,
                });
            }
            if edges.len() <= s {
                edges.resize_with(s + 1, Vec::new);
            }
            edges[s] = out;
        }
        edges.resize_with(states.len(), Vec::new);
        Ok(Graph {
            edges,
            until_count: closure.until_count(),
        })
    }

    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    /// Strongly connected components (iterative Tarjan). Returns the
    /// component id of every state.
    fn components(&self) -> (Vec<usize>, usize) {
        let n = self.state_count();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut comp_count = 0;

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut ei)) = call.last_mut() {
                if *ei < self.edges[v].len() {
                    let w = self.edges[v][*ei].target;
                    *ei += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = comp_count;
                            if w == v {
                                break;
                            }
                        }
                        comp_count += 1;
                    }
                }
            }
        }
        (comp, comp_count)
    }

    /// Per-state flag: the state lies in a component that admits an
    /// accepting cycle.
    fn accepting_states(&self) -> Vec<bool> {
        let (comp, count) = self.components();
        let mut has_edge = vec![false; count];
        let mut fulfilled: Vec<BitSet> = vec![BitSet::default(); count];
        for (s, out) in self.edges.iter().enumerate() {
            for e in out {
                if comp[e.target] == comp[s] {
                    let c = comp[s];
                    has_edge[c] = true;
                    for slot in 0..self.until_count {
                        if e.fulfils(slot) {
                            fulfilled[c].insert(slot);
                        }
                    }
                }
            }
        }
        let good: Vec<bool> = (0..count)
            .map(|c| has_edge[c] && (0..self.until_count).all(|u| fulfilled[c].contains(u)))
            .collect();
        comp.iter().map(|&c| good[c]).collect()
    }

    /// States from which some accepting lasso is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let mut live = self.accepting_states();
        let n = self.state_count();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, out) in self.edges.iter().enumerate() {
            for e in out {
                preds[e.target].push(s);
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&s| live[s]).collect();
        while let Some(t) = queue.pop_front() {
            for &s in &preds[t] {
                if !live[s] {
                    live[s] = true;
                    queue.push_back(s);
                }
            }
        }
        live
    }

    /// Find an accepting lasso from the initial state, if any.
    pub fn accepting_lasso(&self, vocab: &Vocabulary) -> Option<LassoTrace> {
        let accepting = self.accepting_states();
        let (comp, _) = self.components();
        // BFS from the initial state; the first accepting state reached is
        // the lasso's entry point.
        let n = self.state_count();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[INIT] = true;
        let mut queue = VecDeque::from([INIT]);
        let mut entry = None;
        while let Some(s) = queue.pop_front() {
            if accepting[s] {
                entry = Some(s);
                break;
            }
            for (ei, e) in self.edges[s].iter().enumerate() {
                if !seen[e.target] {
                    seen[e.target] = true;
                    parent[e.target] = Some((s, ei));
                    queue.push_back(e.target);
                }
            }
        }
        let entry = entry?;
        let mut prefix_edges = Vec::new();
        let mut cur = entry;
        while let Some((s, ei)) = parent[cur] {
            prefix_edges.push((s, ei));
            cur = s;
        }
        prefix_edges.reverse();

        let in_comp = |s: usize| comp[s] == comp[entry];
        let mut loop_edges: Vec<(usize, usize)> = Vec::new();
        let mut at = entry;
        for slot in 0..self.until_count {
            if loop_edges
                .iter()
                .any(|&(s, ei)| self.edges[s][ei].fulfils(slot))
            {
                continue;
            }
            let path = self.path_within(at, &in_comp, |_, e| e.fulfils(slot))?;
            at = self.edges[path.last()?.0][path.last()?.1].target;
            loop_edges.extend(path);
        }
        if at != entry || loop_edges.is_empty() {
            let path = self.path_within(at, &in_comp, |_, e| e.target == entry)?;
            loop_edges.extend(path);
        }

        let label = |&(s, ei): &(usize, usize)| -> State {
            let pos = self.edges[s][ei].pos;
            vocab
                .iter()
                .enumerate()
                .filter(|(i, _)| pos & (1 << i) != 0)
                .map(|(_, p)| p.clone())
                .collect()
        };
        LassoTrace::new(
            prefix_edges.iter().map(label).collect(),
            loop_edges.iter().map(label).collect(),
        )
        .ok()
    }

    /// Shortest edge path from `from` staying inside `allowed`, ending with
    /// an edge that satisfies `goal`.
    fn path_within(
        &self,
        from: usize,
        allowed: &dyn Fn(usize) -> bool,
        goal: impl Fn(usize, &Edge) -> bool,
    ) -> Option<Vec<(usize, usize)>> {
        let n = self.state_count();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            for (ei, e) in self.edges[s].iter().enumerate() {
                if !allowed(e.target) {
                    continue;
                }
                if goal(s, e) {
                    let mut path = vec![(s, ei)];
                    let mut cur = s;
                    while cur != from {
                        let (p, pe) = parent[cur].expect("bfs parent");
                        path.push((p, pe));
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                if !seen[e.target] {
                    seen[e.target] = true;
                    parent[e.target] = Some((s, ei));
                    queue.push_back(e.target);
                }
            }
        }
        None
    }
}

/// All consistent cubes of the conjunction of `obligations`.
fn expand(closure: &Closure, obligations: &[NodeId]) -> Vec<Cube> {
    let mut out = Vec::new();
    let mut seen_cubes: HashSet<(u64, u64, Vec<NodeId>, BitSet)> = HashSet::new();
    let start = Cube {
        pos: 0,
        neg: 0,
        next: BTreeSet::new(),
        postponed: BitSet::default(),
        done: HashSet::new(),
    };
    let mut work: Vec<(Vec<NodeId>, Cube)> = vec![(obligations.to_vec(), start)];

    'branch: while let Some((mut todo, mut cube)) = work.pop() {
        while let Some(id) = todo.pop() {
            if !cube.done.insert(id) {
                continue;
            }
            match closure.nodes[id as usize] {
                Node::True => {}
                Node::False => continue 'branch,
                Node::Lit(v, positive) => {
                    let bit = 1u64 << v;
                    if positive {
                        if cube.neg & bit != 0 {
                            continue 'branch;
                        }
                        cube.pos |= bit;
                    } else {
                        if cube.pos & bit != 0 {
                            continue 'branch;
                        }
                        cube.neg |= bit;
                    }
                }
                Node::And(a, b) => {
                    todo.push(b);
                    todo.push(a);
                }
                Node::Or(a, b) => {
                    let mut alt_todo = todo.clone();
                    alt_todo.push(b);
                    work.push((alt_todo, cube.clone()));
                    todo.push(a);
                }
                Node::Next(a) => {
                    cube.next.insert(a);
                }
                Node::Until(a, b) => {
                    // postpone: a now, the until again next step
                    let mut alt_todo = todo.clone();
                    alt_todo.push(a);
                    let mut alt = cube.clone();
                    alt.next.insert(id);
                    alt.postponed.insert(closure.until_slot[&id]);
                    work.push((alt_todo, alt));
                    // fulfil: b now
                    todo.push(b);
                }
                Node::Release(a, b) => {
                    // b now and the release again next step
                    let mut alt_todo = todo.clone();
                    alt_todo.push(b);
                    let mut alt = cube.clone();
                    alt.next.insert(id);
                    work.push((alt_todo, alt));
                    // discharge: a and b now
                    todo.push(b);
                    todo.push(a);
                }
            }
        }
        let key = (
            cube.pos,
            cube.neg,
            cube.next.iter().copied().collect::<Vec<_>>(),
            cube.postponed.clone(),
        );
        if seen_cubes.insert(key) {
            out.push(cube);
        }
    }
    out
}
