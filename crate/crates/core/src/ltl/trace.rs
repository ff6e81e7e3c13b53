use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::{Formula, Prop};

/// The propositions true in one step of a trace.
pub type State = BTreeSet<Prop>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a lasso trace needs a non-empty loop")]
pub struct EmptyLoop;

/// An ultimately periodic word `prefix · loop^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoTrace {
    prefix: Vec<State>,
    cycle: Vec<State>,
}

impl LassoTrace {
    pub fn new(prefix: Vec<State>, cycle: Vec<State>) -> Result<Self, EmptyLoop> {
        if cycle.is_empty() {
            return Err(EmptyLoop);
        }
        Ok(LassoTrace { prefix, cycle })
    }

    /// Convenience constructor from proposition names.
    pub fn from_names(prefix: &[&[&str]], cycle: &[&[&str]]) -> Result<Self, EmptyLoop> {
        let conv = |states: &[&[&str]]| -> Vec<State> {
            states
                .iter()
                .map(|s| s.iter().map(|n| Prop::new(n)).collect())
                .collect()
        };
        LassoTrace::new(conv(prefix), conv(cycle))
    }

    pub fn prefix(&self) -> &[State] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[State] {
        &self.cycle
    }

    /// Number of distinct positions (`prefix + loop`).
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Map any position onto `0..len()`.
    pub fn normalize(&self, i: usize) -> usize {
        if i < self.len() {
            i
        } else {
            self.prefix.len() + (i - self.prefix.len()) % self.cycle.len()
        }
    }

    pub fn state(&self, i: usize) -> &State {
        let i = self.normalize(i);
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    /// Does position `i` of this trace satisfy `f`?
    pub fn eval(&self, f: &Formula, i: usize) -> bool {
        let mut memo = HashMap::new();
        self.truth(f, &mut memo)[self.normalize(i)]
    }

    /// Truth vector of `f` over every normalized position.
    fn truth<'f>(
        &self,
        f: &'f Formula,
        memo: &mut HashMap<&'f Formula, Vec<bool>>,
    ) -> Vec<bool> {
        if let Some(v) = memo.get(f) {
            return v.clone();
        }
        let n = self.len();
        let v: Vec<bool> = match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(p) => (0..n).map(|i| self.state(i).contains(p)).collect(),
            Formula::Not(a) => self.truth(a, memo).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => zip(self.truth(a, memo), self.truth(b, memo), |x, y| x && y),
            Formula::Or(a, b) => zip(self.truth(a, memo), self.truth(b, memo), |x, y| x || y),
            Formula::Implies(a, b) => {
                zip(self.truth(a, memo), self.truth(b, memo), |x, y| !x || y)
            }
            Formula::Next(a) => {
                let va = self.truth(a, memo);
                (0..n).map(|i| va[self.succ(i)]).collect()
            }
            Formula::Until(a, b) => {
                let (va, vb) = (self.truth(a, memo), self.truth(b, memo));
                self.fixpoint(false, |i, cur| vb[i] || (va[i] && cur[self.succ(i)]))
            }
            Formula::Release(a, b) => {
                let (va, vb) = (self.truth(a, memo), self.truth(b, memo));
                self.fixpoint(true, |i, cur| vb[i] && (va[i] || cur[self.succ(i)]))
            }
            Formula::Eventually(a) => {
                let va = self.truth(a, memo);
                self.fixpoint(false, |i, cur| va[i] || cur[self.succ(i)])
            }
            Formula::Always(a) => {
                let va = self.truth(a, memo);
                self.fixpoint(true, |i, cur| va[i] && cur[self.succ(i)])
            }
            Formula::WeakUntil(a, b) => {
                let (va, vb) = (self.truth(a, memo), self.truth(b, memo));
                self.fixpoint(true, |i, cur| vb[i] || (va[i] && cur[self.succ(i)]))
            }
        };
        memo.insert(f, v.clone());
        v
    }

    /// Least (`init = false`) or greatest (`init = true`) fixpoint of a
    /// monotone one-step unfolding over the trace positions.
    fn fixpoint<S>(&self, init: bool, step: S) -> Vec<bool>
    where
        S: Fn(usize, &[bool]) -> bool,
    {
        let n = self.len();
        let mut cur = vec![init; n];
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let v = step(i, &cur);
                if v != cur[i] {
                    cur[i] = v;
                    changed = true;
                }
            }
            if !changed {
                return cur;
            }
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &State| {
            let names: Vec<&str> = s.iter().map(Prop::name).collect();
            format!("{{{}}}", names.join(","))
        };
        let pre: Vec<String> = self.prefix.iter().map(show).collect();
        let cyc: Vec<String> = self.cycle.iter().map(show).collect();
        write!(f, "{} ({})^w", pre.join(" "), cyc.join(" "))
    }
}

/// Serialized form: states as sorted name lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub prefix: Vec<Vec<String>>,
    #[serde(rename = "loop")]
    pub cycle: Vec<Vec<String>>,
}

impl From<&LassoTrace> for TraceRecord {
    fn from(t: &LassoTrace) -> Self {
        let conv = |states: &[State]| {
            states
                .iter()
                .map(|s| s.iter().map(|p| p.name().to_string()).collect())
                .collect()
        };
        TraceRecord {
            prefix: conv(&t.prefix),
            cycle: conv(&t.cycle),
        }
    }
}
