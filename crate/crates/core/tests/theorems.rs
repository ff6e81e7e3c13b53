//! Relational properties of witnesses and the two filtering frameworks,
//! checked over BCs harvested from searcher runs on the shipped corpus.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use speclab_core::analysis::Analyzer;
use speclab_core::corpus::{self, load_case, Manifest};
use speclab_core::filters::{jfc, ppfc, BcEntry, BcSet, JfcConfig};
use speclab_core::search::{
    GeneticConfig, GeneticSearch, GeneticSearcher, PatternConfig, PatternSearch, PatternSearcher,
    SearchRequest,
};
use speclab_core::sat;
use speclab_core::{Formula, SolverBudget, Spec};

fn shipped() -> Vec<Spec> {
    let dir = corpus::corpus_dir();
    let manifest = Manifest::load(&dir).unwrap();
    manifest
        .cases
        .iter()
        .filter(|c| c.file.is_some())
        .map(|c| load_case(&dir, c, &SolverBudget::default()).unwrap())
        .collect()
}

fn harvest(spec: &Spec, per_searcher: usize) -> Vec<Formula> {
    let req = SearchRequest {
        max_candidates: 400,
        ..SearchRequest::new(spec.clone())
    };
    let mut out: Vec<Formula> = PatternSearch::new(&req, PatternConfig::default())
        .take(per_searcher)
        .map(Result::unwrap)
        .map(|c| c.formula)
        .collect();
    let req = SearchRequest {
        max_candidates: per_searcher,
        seed: 7,
        ..SearchRequest::new(spec.clone())
    };
    let cfg = GeneticConfig {
        population: 40,
        generations: 10,
        ..GeneticConfig::default()
    };
    out.extend(GeneticSearch::new(&req, cfg).map(|c| c.unwrap().formula));
    out
}

#[test]
fn witness_properties_over_harvested_pairs() {
    let budget = SolverBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pairs = 0;
    for spec in shipped() {
        let an = Analyzer::new(&spec, budget);
        let bcs = harvest(&spec, 12);
        for a in &bcs {
            assert!(an.is_bc(a).unwrap(), "{}: {a}", spec.id());
        }
        for _ in 0..50 {
            let (a, b) = (bcs.choose(&mut rng).unwrap(), bcs.choose(&mut rng).unwrap());
            pairs += 1;
            // implication makes the weaker formula a witness of the stronger
            if sat::implies(a, b, &budget).unwrap() {
                assert!(an.is_witness(b, a).unwrap(), "{a} -> {b}");
            }
            // contrastive formulas are incomparable
            if an.are_contrastive(a, b).unwrap() {
                assert!(!sat::implies(a, b, &budget).unwrap());
                assert!(!sat::implies(b, a, &budget).unwrap());
            }
        }
    }
    assert!(pairs >= 200);
}

#[test]
fn ppfc_output_is_contrastive() {
    let budget = SolverBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for spec in shipped() {
        let an = Analyzer::new(&spec, budget);
        let bcs = harvest(&spec, 8);
        for _ in 0..4 {
            let n = bcs.len().min(5);
            let set: BcSet = bcs
                .choose_multiple(&mut rng, n)
                .enumerate()
                .map(|(i, f)| BcEntry::new(&format!("b{i}"), f.clone(), "harvest", 0))
                .collect();
            let (kept, _) = ppfc(&an, &set).unwrap();
            assert!(!kept.is_empty());
            let kept: Vec<_> = kept.iter().collect();
            for (i, a) in kept.iter().enumerate() {
                for b in &kept[i + 1..] {
                    assert!(an.are_contrastive(&a.formula, &b.formula).unwrap());
                }
            }
        }
    }
}

#[test]
fn jfc_outputs_are_original_bcs_and_mutually_non_witnessing() {
    let budget = SolverBudget::default();
    for spec in shipped() {
        let an = Analyzer::new(&spec, budget);
        let cfg = JfcConfig {
            audit: true,
            max_rounds: 8,
            search_budget: 2000,
            ..JfcConfig::default()
        };
        let mut genetic = GeneticSearcher {
            config: GeneticConfig {
                population: 40,
                generations: 10,
                ..GeneticConfig::default()
            },
        };
        for out in [
            jfc(&spec, &mut PatternSearcher::default(), &cfg).unwrap(),
            jfc(&spec, &mut genetic, &cfg).unwrap(),
        ] {
            let members: Vec<_> = out.bc.iter().collect();
            for a in &members {
                assert!(an.is_bc(&a.formula).unwrap(), "{}: {}", spec.id(), a.formula);
                for b in &members {
                    if a.id != b.id {
                        assert!(!an.is_witness(&a.formula, &b.formula).unwrap());
                    }
                }
            }
        }
    }
}
