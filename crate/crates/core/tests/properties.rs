use std::collections::BTreeSet;

use proptest::prelude::*;
use speclab_core::ltl::{parse, State};
use speclab_core::sat::{self, brute_force_oracle, count_prefixes, CountOptions};
use speclab_core::{Formula, LassoTrace, Prop, SolverBudget, Vocabulary};

const PROPS: [&str; 3] = ["a", "b", "c"];

fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        prop::sample::select(&PROPS[..]).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::release(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::weak_until(a, b)),
        ]
    })
}

fn state() -> impl Strategy<Value = State> {
    prop::collection::btree_set(prop::sample::select(&PROPS[..]).prop_map(Prop::new), 0..=3)
}

fn lasso() -> impl Strategy<Value = LassoTrace> {
    (
        prop::collection::vec(state(), 0..4),
        prop::collection::vec(state(), 1..4),
    )
        .prop_map(|(p, c)| LassoTrace::new(p, c).unwrap())
}

fn only_nnf_operators(f: &Formula) -> bool {
    let here = match f {
        Formula::Not(a) => matches!(**a, Formula::Atom(_)),
        Formula::Implies(..) | Formula::Eventually(_) | Formula::Always(_) | Formula::WeakUntil(..) => {
            false
        }
        _ => true,
    };
    here && f.children().into_iter().all(only_nnf_operators)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_parse_round_trip(f in formula(4)) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn nnf_preserves_semantics(f in formula(4), t in lasso()) {
        let g = f.nnf();
        prop_assert!(only_nnf_operators(&g));
        for i in 0..t.len() {
            prop_assert_eq!(t.eval(&f, i), t.eval(&g, i));
        }
    }

    #[test]
    fn eval_depends_only_on_position_in_loop(f in formula(4), t in lasso()) {
        let n = t.prefix().len();
        let l = t.cycle().len();
        for i in n..n + l {
            prop_assert_eq!(t.eval(&f, i), t.eval(&f, i + l));
        }
        // unrolling the loop once describes the same word
        let mut prefix = t.prefix().to_vec();
        prefix.extend(t.cycle().iter().cloned());
        let unrolled = LassoTrace::new(prefix, t.cycle().to_vec()).unwrap();
        prop_assert_eq!(t.eval(&f, 0), unrolled.eval(&f, 0));
    }

    #[test]
    fn duality(f in formula(3), g in formula(3), t in lasso()) {
        let neg_until = Formula::not(Formula::until(f.clone(), g.clone()));
        let release = Formula::release(Formula::not(f.clone()), Formula::not(g.clone()));
        prop_assert_eq!(t.eval(&neg_until, 0), t.eval(&release, 0));
        let neg_f = Formula::not(Formula::eventually(f.clone()));
        prop_assert_eq!(t.eval(&neg_f, 0), t.eval(&Formula::always(Formula::not(f)), 0));
    }

    #[test]
    fn size_is_positive_and_additive(f in formula(4), g in formula(4)) {
        prop_assert!(f.size() >= 1);
        prop_assert_eq!(Formula::and(f.clone(), g.clone()).size(), 1 + f.size() + g.size());
        prop_assert_eq!(Formula::next(f.clone()).size(), 1 + f.size());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn solver_agrees_with_lasso_oracle(f in formula(4)) {
        let solver = sat::is_sat(&f, &SolverBudget::default()).unwrap();
        if let Some(w) = solver.witness() {
            prop_assert!(w.eval(&f, 0));
        }
        if brute_force_oracle(&f, 2, 2).is_sat() {
            prop_assert!(solver.is_sat(), "oracle found a model of {}", f);
        }
        // every lasso model of f is a non-model of its negation
        let neg = sat::is_sat(&Formula::not(f.clone()), &SolverBudget::default()).unwrap();
        prop_assert!(solver.is_sat() || neg.is_sat());
    }

    #[test]
    fn counts_are_bounded_and_monotone(f in formula(3), g in formula(3), k in 1usize..4) {
        let vocab = Vocabulary::new(PROPS).unwrap();
        let opts = CountOptions::default();
        let cf = count_prefixes(std::slice::from_ref(&f), &vocab, k, &opts).unwrap().count;
        let cfg = count_prefixes(&[f.clone(), g], &vocab, k, &opts).unwrap().count;
        let all = num_bigint::BigUint::from(8u32).pow(k as u32);
        prop_assert!(cfg <= cf);
        prop_assert!(cf <= all);
        let sat = sat::is_sat(&f, &SolverBudget::default()).unwrap().is_sat();
        prop_assert_eq!(sat, cf > num_bigint::BigUint::from(0u8));
    }

    #[test]
    fn counts_respect_implication(f in formula(3), g in formula(3)) {
        let budget = SolverBudget::default();
        prop_assume!(sat::implies(&f, &g, &budget).unwrap());
        let vocab = Vocabulary::new(PROPS).unwrap();
        let opts = CountOptions::default();
        let cf = count_prefixes(&[f], &vocab, 3, &opts).unwrap().count;
        let cg = count_prefixes(&[g], &vocab, 3, &opts).unwrap().count;
        prop_assert!(cf <= cg);
    }
}

#[test]
fn state_sets_are_ordered() {
    let s: State = ["b", "a"].into_iter().map(Prop::new).collect::<BTreeSet<_>>();
    assert_eq!(s.iter().next().unwrap().name(), "a");
}
