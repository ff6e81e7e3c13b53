//! The benchmark corpus: a TOML manifest of case statistics plus spec files
//! for the cases that ship one.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::sat::SolverBudget;
use crate::spec::Spec;
use crate::specfile::{load_spec, SpecFileError};

pub const CORPUS_ENV: &str = "SPECLAB_CORPUS_DIR";

/// Allowed gap between the recorded and the computed total size.
pub const SIZE_TOLERANCE: usize = 2;

/// `$SPECLAB_CORPUS_DIR`, or the corpus bundled with the source tree.
pub fn corpus_dir() -> PathBuf {
    match std::env::var_os(CORPUS_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct CaseEntry {
    pub name: String,
    pub abbrev: String,
    pub dom: usize,
    pub goals: usize,
    pub vars: usize,
    pub size: usize,
    /// Spec file relative to the corpus directory; absent for placeholders.
    #[serde(default)]
    pub file: Option<String>,
    /// Formulas reconstructed from the case's name rather than transcribed.
    #[serde(default)]
    pub approximated: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Manifest {
    #[serde(rename = "case")]
    pub cases: Vec<CaseEntry>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad manifest: {0}")]
    Manifest(#[from] toml::de::Error),
    #[error("no corpus case `{0}`")]
    UnknownCase(String),
    #[error("case `{0}` has no spec file")]
    Placeholder(String),
    #[error("{case}: {source}")]
    Spec {
        case: String,
        source: SpecFileError,
    },
    #[error("{case}: {field} is {actual}, manifest says {expected}")]
    StatsMismatch {
        case: String,
        field: &'static str,
        expected: usize,
        actual: usize,
    },
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self, CorpusError> {
        let path = dir.join("manifest.toml");
        let text = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(toml::from_str(&text)?)
    }

    /// Lookup by name or abbreviation, case-insensitively.
    pub fn case(&self, key: &str) -> Option<&CaseEntry> {
        self.cases.iter().find(|c| {
            c.name.eq_ignore_ascii_case(key)
                || c.abbrev.eq_ignore_ascii_case(key)
                || c.file
                    .as_deref()
                    .and_then(|f| f.strip_suffix(".spec"))
                    .is_some_and(|stem| stem.eq_ignore_ascii_case(key))
        })
    }
}

/// Exact #Dom/#Goal/#Var, size within [`SIZE_TOLERANCE`].
pub fn check_stats(entry: &CaseEntry, spec: &Spec) -> Result<(), CorpusError> {
    let mismatch = |field, expected, actual| CorpusError::StatsMismatch {
        case: entry.name.clone(),
        field,
        expected,
        actual,
    };
    if spec.dom().len() != entry.dom {
        return Err(mismatch("#Dom", entry.dom, spec.dom().len()));
    }
    if spec.goals().len() != entry.goals {
        return Err(mismatch("#Goal", entry.goals, spec.goals().len()));
    }
    if spec.vocab().len() != entry.vars {
        return Err(mismatch("#Var", entry.vars, spec.vocab().len()));
    }
    if spec.size().abs_diff(entry.size) > SIZE_TOLERANCE {
        return Err(mismatch("size", entry.size, spec.size()));
    }
    Ok(())
}

/// Load a case's spec and check it against the manifest.
pub fn load_case(dir: &Path, entry: &CaseEntry, budget: &SolverBudget) -> Result<Spec, CorpusError> {
    let file = entry
        .file
        .as_ref()
        .ok_or_else(|| CorpusError::Placeholder(entry.name.clone()))?;
    let spec = load_spec(&dir.join(file), budget).map_err(|source| CorpusError::Spec {
        case: entry.name.clone(),
        source,
    })?;
    check_stats(entry, &spec)?;
    Ok(spec)
}

/// Load a bundled case by name or abbreviation.
pub fn load_named(key: &str, budget: &SolverBudget) -> Result<Spec, CorpusError> {
    let dir = corpus_dir();
    let manifest = Manifest::load(&dir)?;
    let entry = manifest
        .case(key)
        .ok_or_else(|| CorpusError::UnknownCase(key.to_string()))?;
    load_case(&dir, entry, budget)
}
