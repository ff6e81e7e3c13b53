use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn speclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_speclab"))
        .args(args)
        .output()
        .expect("run speclab")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json record"))
        .collect()
}

fn of_kind<'a>(recs: &'a [Value], kind: &str) -> Vec<&'a Value> {
    recs.iter().filter(|r| r["record"] == kind).collect()
}

fn ids(bcs: &[&Value]) -> Vec<String> {
    let mut v: Vec<String> = bcs.iter().map(|r| r["id"].as_str().unwrap().to_string()).collect();
    v.sort();
    v
}

fn write_spec(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("speclab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn check_bc_exit_codes() {
    assert_eq!(speclab(&["check-bc", "minepump", "--fixture", "phi1"]).status.code(), Some(0));
    assert_eq!(speclab(&["check-bc", "minepump", "--fixture", "phi3"]).status.code(), Some(0));

    let out = speclab(&[
        "check-bc",
        "minepump",
        "--formula",
        "!(G(h->X p) && G(m->X(!p)))",
        "--out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&out);
    assert_eq!(of_kind(&recs, "bc")[0]["verdict"]["failure"], "triviality");
}

#[test]
fn minimality_failure_names_the_goal() {
    let out = speclab(&[
        "check-bc",
        "minepump",
        "--formula",
        "F (h && !m && p && X(!h && !p || h && (m || !p))) && !G(h -> X p)",
        "--out",
        "-",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&out);
    assert_eq!(of_kind(&recs, "bc")[0]["verdict"]["failure"], "minimality:g2");
}

#[test]
fn every_record_carries_the_schema() {
    let out = speclab(&["filter", "minepump", "--out", "-"]);
    assert!(out.status.success());
    let recs = records(&out);
    assert!(!recs.is_empty());
    for r in &recs {
        assert_eq!(r["schema"], "speclab.report/v1");
    }
    assert_eq!(recs[0]["record"], "run");
    assert_eq!(recs.last().unwrap()["record"], "summary");
}

#[test]
fn filter_modes() {
    let run = |mode: &str| {
        let out = speclab(&[
            "filter", "minepump", "--mode", mode, "--fixture", "phi1", "--fixture", "phi2",
            "--fixture", "phi3", "--k", "4", "--out", "-",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        records(&out)
    };
    let recs = run("generality");
    let kept: Vec<&Value> = of_kind(&recs, "bc").into_iter().filter(|r| r["kept"] == true).collect();
    assert_eq!(ids(&kept), ["phi1", "phi3"]);
    let edges: Vec<(&str, &str)> = of_kind(&recs, "edge")
        .iter()
        .map(|e| (e["from"].as_str().unwrap(), e["to"].as_str().unwrap()))
        .collect();
    assert!(edges.contains(&("phi1", "phi2")));
    assert!(!edges.contains(&("phi1", "phi3")) && !edges.contains(&("phi3", "phi1")));

    let recs = run("contrasty");
    let kept: Vec<&Value> = of_kind(&recs, "bc").into_iter().filter(|r| r["kept"] == true).collect();
    assert_eq!(ids(&kept), ["phi1"]);
    assert!(!of_kind(&recs, "filter-step").is_empty());
}

#[test]
fn filter_leaves_singletons_alone() {
    for mode in ["generality", "contrasty"] {
        let out = speclab(&["filter", "minepump", "--mode", mode, "--fixture", "phi3", "--out", "-"]);
        assert!(out.status.success());
        let recs = records(&out);
        let bcs = of_kind(&recs, "bc");
        assert_eq!(bcs.len(), 1);
        assert_eq!(bcs[0]["kept"], true);
        assert_eq!(bcs[0]["rank"], 1);
    }
}

#[test]
fn likelihood_of_true_is_one() {
    let out = speclab(&["likelihood", "minepump", "--formula", "true", "--out", "-"]);
    assert!(out.status.success());
    let recs = records(&out);
    let bc = of_kind(&recs, "bc")[0];
    assert_eq!(bc["rank"], 1);
    assert_eq!(bc["likelihood"]["value"], 1.0);
    assert_eq!(bc["likelihood"]["numerator"], bc["likelihood"]["denominator"]);
    assert_eq!(bc["likelihood"]["interpretation"], "prefix-extendable");
}

#[test]
fn ranks_are_a_permutation_in_documented_order() {
    let out = speclab(&[
        "likelihood",
        "minepump",
        "--interpretation",
        "prefix-determined",
        "--k",
        "4",
        "--formula",
        "true",
        "--formula",
        "h",
        "--formula",
        "h && m",
        "--formula",
        "m && h",
        "--fixture",
        "phi3p",
        "--out",
        "-",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let recs = records(&out);
    let mut bcs = of_kind(&recs, "bc");
    let mut ranks: Vec<u64> = bcs.iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    ranks.sort();
    assert_eq!(ranks, (1..=bcs.len() as u64).collect::<Vec<_>>());

    bcs.sort_by_key(|r| r["rank"].as_u64());
    for w in bcs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (la, lb) = (
            a["likelihood"]["value"].as_f64().unwrap(),
            b["likelihood"]["value"].as_f64().unwrap(),
        );
        assert!(la >= lb);
        if la == lb {
            let (sa, sb) = (a["size"].as_u64().unwrap(), b["size"].as_u64().unwrap());
            assert!(sa < sb || (sa == sb && a["id"].as_str() < b["id"].as_str()));
        }
    }
    // "h && m" and "m && h" tie on likelihood and size; ids decide
    let pos = |id: &str| bcs.iter().position(|r| r["id"] == id).unwrap();
    assert!(pos("f3") < pos("f4"));
}

#[test]
fn identify_jfc_on_minepump() {
    let out = speclab(&["identify", "minepump", "--out", "-"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let recs = records(&out);
    let summary = of_kind(&recs, "summary")[0];
    assert_eq!(summary["B_c"], 1);
    assert_eq!(summary["termination"], "termination-condition");
    assert_eq!(summary["certified"], true);
}

#[test]
fn identify_ppfc_with_preloaded_fixtures() {
    let out = speclab(&[
        "identify",
        "minepump",
        "--framework",
        "ppfc",
        "--max-candidates",
        "3",
        "--fixture",
        "phi1",
        "--fixture",
        "phi2",
        "--fixture",
        "phi3",
        "--out",
        "-",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let recs = records(&out);
    let kept: Vec<&Value> = of_kind(&recs, "bc").into_iter().filter(|r| r["in_bc"] == true).collect();
    assert_eq!(ids(&kept), ["phi1"]);
}

#[test]
fn spec_without_bcs_exhausts_the_searcher() {
    let path = write_spec(
        "dup.spec",
        "props a b\ngoal g1: G (a -> X b)\ngoal g2: G (a -> X b)\n",
    );
    let out = speclab(&["identify", path.to_str().unwrap(), "--max-candidates", "500", "--out", "-"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let recs = records(&out);
    let summary = of_kind(&recs, "summary")[0];
    assert_eq!(summary["B_c"], 0);
    assert_eq!(summary["termination"], "searcher-exhausted");
}

#[test]
fn report_tabulates_the_sets() {
    let out = speclab(&["report", "minepump", "--k", "4", "--out", "-"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let recs = records(&out);
    let summary = of_kind(&recs, "summary")[0];
    for key in ["B", "B_g", "B_c"] {
        assert!(summary[key].is_u64(), "missing {key}");
    }
}

#[test]
fn input_errors_exit_two() {
    let one_goal = write_spec("one.spec", "props a\ngoal g1: G a\n");
    let out = speclab(&["check-bc", one_goal.to_str().unwrap(), "--formula", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("goal"), "{}", stderr(&out));

    let undeclared = write_spec("undeclared.spec", "props a\ngoal g1: G a\ngoal g2: G (a -> z)\n");
    let out = speclab(&["check-bc", undeclared.to_str().unwrap(), "--formula", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains('z'), "{}", stderr(&out));

    let out = speclab(&["check-bc", "no-such-spec", "--formula", "a"]);
    assert_eq!(out.status.code(), Some(2));
    let out = speclab(&["check-bc", "minepump", "--formula", "h &&"]);
    assert_eq!(out.status.code(), Some(2));
    let out = speclab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_three() {
    let out = speclab(&["check-bc", "minepump", "--fixture", "phi1", "--budget-states", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn corpus_case_names_resolve() {
    for name in ["MinePump", "mp", "minepump.spec", "rp1"] {
        let out = speclab(&["likelihood", name, "--formula", "true", "--k", "2"]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
    }
    let out = speclab(&["likelihood", "AMBA", "--formula", "true"]);
    assert_eq!(out.status.code(), Some(2));
}
