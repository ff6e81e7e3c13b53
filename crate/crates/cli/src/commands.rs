use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use serde_json::{json, Value};
use speclab_core::analysis::{AnalysisError, Analyzer, Likelihood};
use speclab_core::corpus::{self, load_case, CorpusError, Manifest};
use speclab_core::filters::{
    generality_filter, jfc, ppfc, BcEntry, BcId, BcSet, FilterError, FilterStep, JfcConfig,
    JfcOutcome, Termination,
};
use speclab_core::ltl::parse_with_vocab;
use speclab_core::search::{
    BcSearcher, Candidate, GeneticConfig, GeneticSearch, GeneticSearcher, PatternConfig,
    PatternSearch, PatternSearcher, SearchError, SearchRequest,
};
use speclab_core::specfile::{load_spec, SpecFileError};
use speclab_core::{SolverError, Spec, SpecError};

use crate::report::{entry_json, likelihood_json, rank, verdict_json, Report};
use crate::{CommonArgs, Framework, Mode, SearchArgs, Searcher};

pub enum Failure {
    Input(anyhow::Error),
    Unknown(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Unknown(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Unknown(e) => e,
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        if e.is_unknown() {
            Failure::Unknown(e.into())
        } else {
            Failure::Input(e.into())
        }
    }
}

impl From<FilterError> for Failure {
    fn from(e: FilterError) -> Self {
        match e {
            FilterError::Analysis(a) | FilterError::Search(SearchError::Analysis(a)) => a.into(),
            other => Failure::Input(other.into()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Analysis(a) => a.into(),
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

/// A path, a file in the corpus directory, or a manifest case name.
fn resolve_spec(c: &CommonArgs) -> Result<Spec, Failure> {
    let budget = c.budget()?;
    let direct = Path::new(&c.spec);
    let dir = corpus::corpus_dir();
    for candidate in [
        direct.to_path_buf(),
        dir.join(&c.spec),
        dir.join(format!("{}.spec", c.spec)),
    ] {
        if candidate.is_file() {
            return load_spec(&candidate, &budget).map_err(spec_failure);
        }
    }
    let manifest = Manifest::load(&dir).map_err(|e| Failure::Input(e.into()))?;
    let entry = manifest
        .case(&c.spec)
        .ok_or_else(|| Failure::Input(anyhow!("no spec file or corpus case `{}`", c.spec)))?;
    load_case(&dir, entry, &budget).map_err(|e| match e {
        CorpusError::Spec { source, .. } => spec_failure(source),
        other => Failure::Input(other.into()),
    })
}

fn spec_failure(e: SpecFileError) -> Failure {
    match e {
        SpecFileError::Spec(SpecError::Solver(SolverError::BudgetExceeded { .. })) => {
            Failure::Unknown(e.into())
        }
        other => Failure::Input(other.into()),
    }
}

/// Formulas named on the command line; all fixtures when none are given and
/// `default_fixtures` is set.
fn targets(c: &CommonArgs, spec: &Spec, default_fixtures: bool) -> Result<Vec<BcEntry>, Failure> {
    let mut out = Vec::new();
    for name in &c.fixtures {
        let nf = spec
            .fixture(name)
            .ok_or_else(|| Failure::Input(anyhow!("spec `{}` has no fixture `{name}`", spec.id())))?;
        out.push(BcEntry::new(&nf.id, nf.formula.clone(), "fixture", 0));
    }
    for (i, text) in c.formulas.iter().enumerate() {
        let f = parse_with_vocab(text, spec.vocab())
            .map_err(|e| Failure::Input(anyhow!("--formula {text:?}: {e}")))?;
        out.push(BcEntry::new(&format!("f{}", i + 1), f, "command-line", 0));
    }
    if out.is_empty() && default_fixtures {
        out = spec
            .fixtures()
            .iter()
            .map(|nf| BcEntry::new(&nf.id, nf.formula.clone(), "fixture", 0))
            .collect();
    }
    Ok(out)
}

fn config_json(c: &CommonArgs, s: Option<&SearchArgs>) -> Value {
    let mut v = json!({
        "k": c.k,
        "interpretation": c.interpretation.tag(),
        "budget_states": c.budget_states,
        "budget_secs": c.budget_secs,
        "seed": c.seed,
    });
    if let Some(s) = s {
        v["framework"] = json!(format!("{:?}", s.framework).to_lowercase());
        v["searcher"] = json!(format!("{:?}", s.searcher).to_lowercase());
        v["max_candidates"] = json!(s.max_candidates);
        v["max_rounds"] = json!(s.max_rounds);
        v["check_termination_first"] = json!(s.check_termination_first);
    }
    v
}

fn goal_ids(spec: &Spec) -> Vec<String> {
    spec.goals().iter().map(|g| g.id.clone()).collect()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

fn finish(c: &CommonArgs, report: &Report, summary: &str) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Input(anyhow!("writing report: {e}"));
    match c.out.as_deref() {
        Some(p) if p == Path::new("-") => {
            report.write_to(&mut io::stdout().lock()).map_err(io_err)?;
        }
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::Input(anyhow!("{}: {e}", p.display())))?;
            report.write_to(&mut BufWriter::new(file)).map_err(io_err)?;
            print!("{summary}");
        }
        None => print!("{summary}"),
    }
    Ok(())
}

/// Likelihoods and ranks for `members`, recorded as `bc` records carrying
/// `extra` annotations per member.
fn ranked_records(
    an: &Analyzer<'_>,
    c: &CommonArgs,
    members: &[BcEntry],
    mut extra: impl FnMut(&BcEntry) -> Value,
    report: &mut Report,
    text: &mut String,
) -> Result<(), Failure> {
    let mut ls: Vec<Likelihood> = Vec::with_capacity(members.len());
    for e in members {
        ls.push(an.likelihood_as(&e.formula, c.k, c.interpretation)?);
    }
    let pairs: Vec<(&BcEntry, &Likelihood)> = members.iter().zip(&ls).collect();
    let ranks = rank(&pairs);
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&i| ranks[i]);
    if !members.is_empty() {
        let _ = writeln!(text, "{:>4}  {:<10} {:>10}  formula", "rank", "id", "L");
    }
    for i in order {
        let e = &members[i];
        let mut body = entry_json(e);
        body["rank"] = json!(ranks[i]);
        body["likelihood"] = likelihood_json(&ls[i]);
        if let (Value::Object(dst), Value::Object(src)) = (&mut body, extra(e)) {
            dst.extend(src);
        }
        report.push("bc", body);
        let _ = writeln!(
            text,
            "{:>4}  {:<10} {:>10.6}  {}",
            ranks[i],
            e.id.0,
            ls[i].value(),
            e.formula
        );
    }
    Ok(())
}

fn witness_edges(steps: &[FilterStep]) -> BTreeSet<(BcId, BcId)> {
    let mut edges = BTreeSet::new();
    for s in steps {
        if s.subject_witnesses_other == Some(true) {
            edges.insert((s.subject.clone(), s.other.clone()));
        }
        if s.other_witnesses_subject == Some(true) {
            edges.insert((s.other.clone(), s.subject.clone()));
        }
    }
    edges
}

pub fn check_bc(c: &CommonArgs) -> CmdResult {
    let start = Instant::now();
    let spec = resolve_spec(c)?;
    let an = Analyzer::new(&spec, c.budget()?);
    let items = targets(c, &spec, false)?;
    if items.is_empty() {
        return Err(Failure::Input(anyhow!("give at least one --fixture or --formula")));
    }
    let mut report = Report::default();
    report.run("check-bc", spec.id(), config_json(c, None));
    let mut text = String::new();
    let mut all = true;
    for e in &items {
        let v = an.check_bc(&e.formula)?;
        all &= v.is_bc;
        let verdict = verdict_json(&v, &goal_ids(&spec));
        let mut body = entry_json(e);
        body["verdict"] = verdict.clone();
        report.push("bc", body);
        match verdict["failure"].as_str() {
            None => {
                let _ = writeln!(text, "{}: boundary condition", e.id);
            }
            Some(reason) => {
                let _ = writeln!(text, "{}: not a boundary condition ({reason})", e.id);
            }
        }
    }
    report.push(
        "summary",
        json!({ "all_bc": all, "checked": items.len(), "elapsed_ms": elapsed_ms(start) }),
    );
    finish(c, &report, &text)?;
    Ok(ExitCode::from(if all { 0 } else { 1 }))
}

pub fn filter(c: &CommonArgs, mode: Mode) -> CmdResult {
    let start = Instant::now();
    let spec = resolve_spec(c)?;
    let an = Analyzer::new(&spec, c.budget()?);
    let input: BcSet = targets(c, &spec, true)?.into_iter().collect();
    let mut report = Report::default();
    let mut config = config_json(c, None);
    config["mode"] = json!(format!("{mode:?}").to_lowercase());
    report.run("filter", spec.id(), config);

    let kept = match mode {
        Mode::Generality => {
            for e in input.iter() {
                if !an.is_bc(&e.formula)? {
                    return Err(Failure::Input(anyhow!("{} is not a boundary condition", e.id)));
                }
            }
            for a in input.iter() {
                for b in input.iter() {
                    if a.id != b.id && an.is_more_general(&a.formula, &b.formula)? {
                        report.edge("generality", &a.id.0, &b.id.0);
                    }
                }
            }
            generality_filter(&an, &input)?
        }
        Mode::Contrasty => {
            let (kept, trace) = ppfc(&an, &input)?;
            for (from, to) in witness_edges(&trace.steps) {
                report.edge("witness", &from.0, &to.0);
            }
            report.filter_steps("ppfc", &trace.steps);
            kept
        }
    };

    let mut text = format!(
        "{} of {} kept ({} mode)\n",
        kept.len(),
        input.len(),
        format!("{mode:?}").to_lowercase()
    );
    let members: Vec<BcEntry> = kept.iter().cloned().collect();
    ranked_records(&an, c, &members, |_| json!({ "kept": true }), &mut report, &mut text)?;
    for e in input.iter().filter(|e| !kept.contains(&e.id)) {
        let mut body = entry_json(e);
        body["kept"] = json!(false);
        report.push("bc", body);
        let _ = writeln!(text, "  dropped {}  {}", e.id, e.formula);
    }
    report.push(
        "summary",
        json!({ "input": input.len(), "kept": kept.len(), "elapsed_ms": elapsed_ms(start) }),
    );
    finish(c, &report, &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn likelihood(c: &CommonArgs) -> CmdResult {
    let start = Instant::now();
    let spec = resolve_spec(c)?;
    let an = Analyzer::new(&spec, c.budget()?);
    let items = targets(c, &spec, true)?;
    if items.is_empty() {
        return Err(Failure::Input(anyhow!("no formulas: give --fixture or --formula")));
    }
    let mut report = Report::default();
    report.run("likelihood", spec.id(), config_json(c, None));
    let mut text = String::new();
    ranked_records(&an, c, &items, |_| json!({}), &mut report, &mut text)?;
    report.push(
        "summary",
        json!({ "ranked": items.len(), "elapsed_ms": elapsed_ms(start) }),
    );
    finish(c, &report, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn searcher(s: &SearchArgs) -> Box<dyn BcSearcher> {
    match s.searcher {
        Searcher::Pattern => Box::new(PatternSearcher::default()),
        Searcher::Genetic => Box::new(GeneticSearcher::default()),
    }
}

/// Every BC the searcher yields within its candidate budget, as `bc<n>`.
fn harvest(spec: &Spec, c: &CommonArgs, s: &SearchArgs, into: &mut BcSet) -> Result<(), Failure> {
    let req = SearchRequest {
        spec: spec.clone(),
        budget: c.budget()?,
        max_candidates: s.max_candidates,
        seed: c.seed,
    };
    let stream: Box<dyn Iterator<Item = Result<Candidate, SearchError>>> = match s.searcher {
        Searcher::Pattern => Box::new(PatternSearch::new(&req, PatternConfig::default())),
        Searcher::Genetic => Box::new(GeneticSearch::new(&req, GeneticConfig::default())),
    };
    let mut n = 0;
    for cand in stream {
        let cand = cand?;
        n += 1;
        let source = format!("{:?}", cand.tag).to_lowercase();
        into.insert(BcEntry::new(&format!("bc{n}"), cand.formula, &source, 0));
    }
    Ok(())
}

struct Identified {
    all: BcSet,
    contrastive: BcSet,
    steps: Vec<FilterStep>,
    termination: Option<Termination>,
    rounds: usize,
    certified: bool,
}

fn run_framework(an: &Analyzer<'_>, c: &CommonArgs, s: &SearchArgs, preload: BcSet) -> Result<Identified, Failure> {
    let spec = an.spec();
    match s.framework {
        Framework::Ppfc => {
            let mut all = preload;
            harvest(spec, c, s, &mut all)?;
            let (contrastive, trace) = ppfc(an, &all)?;
            Ok(Identified {
                all,
                contrastive,
                steps: trace.steps,
                termination: None,
                rounds: 0,
                certified: true,
            })
        }
        Framework::Jfc => {
            if !preload.is_empty() {
                return Err(Failure::Input(anyhow!(
                    "--fixture/--formula preloading applies to --framework ppfc only"
                )));
            }
            let cfg = JfcConfig {
                max_rounds: s.max_rounds,
                search_budget: s.max_candidates,
                budget: c.budget()?,
                seed: c.seed,
                check_termination_first: s.check_termination_first,
                audit: false,
            };
            match jfc(spec, searcher(s).as_mut(), &cfg) {
                Ok(JfcOutcome {
                    bc,
                    terminated,
                    trace,
                    seen,
                    rounds,
                }) => Ok(Identified {
                    all: seen.into_iter().collect(),
                    contrastive: bc,
                    steps: trace.steps,
                    termination: Some(terminated),
                    rounds,
                    certified: true,
                }),
                Err(e) => match Failure::from(e.source.clone()) {
                    Failure::Unknown(_) => Ok(Identified {
                        all: e.partial.clone(),
                        contrastive: e.partial,
                        steps: Vec::new(),
                        termination: None,
                        rounds: e.rounds,
                        certified: false,
                    }),
                    other => Err(other),
                },
            }
        }
    }
}

pub fn identify(c: &CommonArgs, s: &SearchArgs) -> CmdResult {
    let start = Instant::now();
    let spec = resolve_spec(c)?;
    let an = Analyzer::new(&spec, c.budget()?);
    let preload: BcSet = targets(c, &spec, false)?.into_iter().collect();
    let mut report = Report::default();
    report.run("identify", spec.id(), config_json(c, Some(s)));

    let out = run_framework(&an, c, s, preload)?;
    let termination = out.termination.map(|t| format!("{t:?}"));
    let mut text = format!(
        "|B| = {}, |B_c| = {}{}\n",
        out.all.len(),
        out.contrastive.len(),
        termination
            .as_deref()
            .map(|t| format!(", termination = {t}"))
            .unwrap_or_default()
    );
    if !out.certified {
        text.push_str("solver budget exhausted; partial result is not certified\n");
    }
    for e in out.all.iter().filter(|e| !out.contrastive.contains(&e.id)) {
        let mut body = entry_json(e);
        body["in_bc"] = json!(false);
        report.push("bc", body);
    }
    let members: Vec<BcEntry> = out.contrastive.iter().cloned().collect();
    ranked_records(&an, c, &members, |_| json!({ "in_bc": true }), &mut report, &mut text)?;
    report.filter_steps(if s.framework == Framework::Ppfc { "ppfc" } else { "jfc" }, &out.steps);
    report.push(
        "summary",
        json!({
            "B": out.all.len(),
            "B_c": out.contrastive.len(),
            "termination": out.termination,
            "rounds": out.rounds,
            "certified": out.certified,
            "elapsed_ms": elapsed_ms(start),
        }),
    );
    finish(c, &report, &text)?;
    Ok(ExitCode::from(if out.certified { 0 } else { 3 }))
}

pub fn report(c: &CommonArgs, s: &SearchArgs) -> CmdResult {
    let start = Instant::now();
    let spec = resolve_spec(c)?;
    let an = Analyzer::new(&spec, c.budget()?);
    let mut report = Report::default();
    report.run("report", spec.id(), config_json(c, Some(s)));

    // fixtures that are not BCs are reported but not carried forward
    let mut preload = BcSet::new();
    for e in targets(c, &spec, true)? {
        let v = an.check_bc(&e.formula)?;
        if v.is_bc {
            preload.insert(e);
        } else {
            let mut body = entry_json(&e);
            body["verdict"] = verdict_json(&v, &goal_ids(&spec));
            report.push("bc", body);
        }
    }
    let jfc_mode = s.framework == Framework::Jfc;
    let out = if jfc_mode {
        let found = run_framework(&an, c, s, BcSet::new())?;
        let mut all = preload;
        for e in found.all.iter() {
            all.insert(e.clone());
        }
        Identified { all, ..found }
    } else {
        run_framework(&an, c, s, preload)?
    };

    let general = generality_filter(&an, &out.all)?;
    let entries: Vec<&BcEntry> = out.all.iter().collect();
    for a in &entries {
        for b in &entries {
            if a.id != b.id && an.is_more_general(&a.formula, &b.formula)? {
                report.edge("generality", &a.id.0, &b.id.0);
            }
        }
    }
    let g: Vec<&BcEntry> = general.iter().collect();
    for a in &g {
        for b in &g {
            if a.id != b.id && an.is_witness(&a.formula, &b.formula)? {
                report.edge("witness", &a.id.0, &b.id.0);
            }
        }
    }
    for (i, a) in g.iter().enumerate() {
        for b in &g[i + 1..] {
            if an.are_contrastive(&a.formula, &b.formula)? {
                report.edge("contrastive", &a.id.0, &b.id.0);
            }
        }
    }

    let mut text = format!(
        "{}: |B| = {}, |B_g| = {}, |B_c| = {}\n",
        spec.id(),
        out.all.len(),
        general.len(),
        out.contrastive.len()
    );
    for e in out.all.iter().filter(|e| !general.contains(&e.id)) {
        let mut body = entry_json(e);
        body["in_bg"] = json!(false);
        body["in_bc"] = json!(out.contrastive.contains(&e.id));
        report.push("bc", body);
    }
    let members: Vec<BcEntry> = general.iter().cloned().collect();
    let contrastive = &out.contrastive;
    ranked_records(
        &an,
        c,
        &members,
        |e| json!({ "in_bg": true, "in_bc": contrastive.contains(&e.id) }),
        &mut report,
        &mut text,
    )?;
    report.filter_steps(if jfc_mode { "jfc" } else { "ppfc" }, &out.steps);
    report.push(
        "summary",
        json!({
            "B": out.all.len(),
            "B_g": general.len(),
            "B_c": out.contrastive.len(),
            "termination": out.termination,
            "certified": out.certified,
            "elapsed_ms": elapsed_ms(start),
        }),
    );
    finish(c, &report, &text)?;
    Ok(ExitCode::from(if out.certified { 0 } else { 3 }))
}
