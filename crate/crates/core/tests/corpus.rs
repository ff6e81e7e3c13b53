use speclab_core::analysis::Analyzer;
use speclab_core::corpus::{self, check_stats, load_case, CorpusError, Manifest};
use speclab_core::search::{PatternConfig, PatternSearch, SearchRequest};
use speclab_core::SolverBudget;

#[test]
fn shipped_cases_match_manifest() {
    let dir = corpus::corpus_dir();
    let manifest = Manifest::load(&dir).unwrap();
    let budget = SolverBudget::default();
    let mut loaded = 0;
    for case in &manifest.cases {
        match load_case(&dir, case, &budget) {
            Ok(spec) => {
                check_stats(case, &spec).unwrap();
                loaded += 1;
            }
            Err(CorpusError::Placeholder(_)) => assert!(case.file.is_none()),
            Err(e) => panic!("{}: {e}", case.name),
        }
    }
    assert_eq!(loaded, 5);
}

#[test]
fn minepump_statistics() {
    let manifest = Manifest::load(&corpus::corpus_dir()).unwrap();
    let mp = manifest.case("MP").unwrap();
    assert_eq!((mp.dom, mp.goals, mp.vars, mp.size), (1, 2, 3, 21));
    assert!(!mp.approximated);
    let spec = corpus::load_named("MinePump", &SolverBudget::default()).unwrap();
    assert_eq!(spec.size(), 19);
    let names: Vec<_> = spec.vocab().iter().map(|p| p.name().to_string()).collect();
    assert_eq!(names, ["h", "m", "p"]);
    assert_eq!(spec.goals()[0].name, "NoFlooding");
}

#[test]
fn elevator_is_a_placeholder() {
    let manifest = Manifest::load(&corpus::corpus_dir()).unwrap();
    let ele = manifest.case("ele").unwrap();
    assert_eq!(ele.goals, 1);
    assert!(matches!(
        corpus::load_named("Ele", &SolverBudget::default()),
        Err(CorpusError::Placeholder(_))
    ));
}

#[test]
fn every_shipped_case_has_a_bc() {
    let dir = corpus::corpus_dir();
    let manifest = Manifest::load(&dir).unwrap();
    let budget = SolverBudget::default();
    for case in manifest.cases.iter().filter(|c| c.file.is_some()) {
        let spec = load_case(&dir, case, &budget).unwrap();
        let req = SearchRequest::new(spec.clone());
        let found = PatternSearch::new(&req, PatternConfig { widen: false })
            .next()
            .unwrap_or_else(|| panic!("{}: no BC", case.name))
            .unwrap();
        let an = Analyzer::new(&spec, budget);
        assert!(an.is_bc(&found.formula).unwrap(), "{}", case.name);
    }
}
