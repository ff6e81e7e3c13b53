//! Exhaustive lasso enumeration, used as an independent cross-check of the
//! tableau engine. Exponential; intended for at most 4 propositions and
//! bounds of at most 4.

use crate::ltl::{Formula, LassoTrace, Prop, State};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    /// The first satisfying lasso in enumeration order (shortest first).
    Sat(LassoTrace),
    /// No lasso within the bounds satisfies the formula. This is not a proof
    /// of unsatisfiability.
    UnsatWithinBounds,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat(_))
    }
}

pub fn brute_force_oracle(f: &Formula, prefix_bound: usize, loop_bound: usize) -> OracleVerdict {
    let props: Vec<Prop> = f.atoms().into_iter().collect();
    let letters = 1usize << props.len();
    let decode = |letter: usize| -> State {
        props
            .iter()
            .enumerate()
            .filter(|(i, _)| letter & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect()
    };

    for total in 1..=prefix_bound + loop_bound {
        for prefix_len in 0..=prefix_bound.min(total - 1) {
            let loop_len = total - prefix_len;
            if loop_len > loop_bound {
                continue;
            }
            let mut word = vec![0usize; total];
            loop {
                let states: Vec<State> = word.iter().map(|&l| decode(l)).collect();
                let (pre, cyc) = states.split_at(prefix_len);
                let trace = LassoTrace::new(pre.to_vec(), cyc.to_vec())
                    .expect("loop length is at least one");
                if trace.eval(f, 0) {
                    return OracleVerdict::Sat(trace);
                }
                // odometer increment
                let mut i = 0;
                while i < total {
                    word[i] += 1;
                    if word[i] < letters {
                        break;
                    }
                    word[i] = 0;
                    i += 1;
                }
                if i == total {
                    break;
                }
            }
        }
    }
    OracleVerdict::UnsatWithinBounds
}
