//! The line-oriented spec file format.
//!
//! ```text
//! # mine pump controller
//! spec minepump
//! props h m p
//! dom d1: G((p && X p) -> X(X !h))
//! goal g1: G(h -> X p)
//! goal g2: G(m -> X !p)
//! fixture phi1: F(h && m)
//! name g1: pump on high water
//! desc g1: pump when the water is high
//! ```
//!
//! A formula may continue on following lines that start with whitespace.
//! `props` must precede every formula line. Without a `spec` line the file
//! stem becomes the spec id.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ltl::{parse_with_vocab, ParseError, Vocabulary, VocabularyError};
use crate::sat::SolverBudget;
use crate::spec::{NamedFormula, Spec, SpecError};

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{line}: {source}")]
    Vocabulary {
        line: usize,
        source: VocabularyError,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

impl SpecFileError {
    /// 1-based line of the problem, when it has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            SpecFileError::Syntax { line, .. } | SpecFileError::Vocabulary { line, .. } => {
                Some(*line)
            }
            SpecFileError::Parse(e) => Some(e.line()),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Dom,
    Goal,
    Fixture,
}

struct Pending {
    section: Section,
    id: String,
    text: String,
    line: usize,
    column: usize,
}

/// Parse spec text. Structural checks only; see [`load_spec`].
pub fn parse_spec(text: &str, default_id: &str) -> Result<Spec, SpecFileError> {
    let mut id = default_id.to_string();
    let mut vocab: Option<Vocabulary> = None;
    let mut entries: Vec<Pending> = Vec::new();
    let mut labels: Vec<(usize, bool, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        if content.starts_with(char::is_whitespace) {
            match entries.last_mut() {
                Some(p) if p.line + p.text.lines().count() == line => {
                    p.text.push('\n');
                    p.text.push_str(content);
                }
                _ => {
                    return Err(SpecFileError::Syntax {
                        line,
                        message: "indented line does not continue a formula".into(),
                    })
                }
            }
            continue;
        }
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match keyword {
            "spec" => {
                let name = rest.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(SpecFileError::Syntax {
                        line,
                        message: "expected `spec <id>`".into(),
                    });
                }
                id = name.to_string();
            }
            "props" => {
                if vocab.is_some() {
                    return Err(SpecFileError::Syntax {
                        line,
                        message: "duplicate `props` line".into(),
                    });
                }
                let v = Vocabulary::new(rest.split_whitespace())
                    .map_err(|source| SpecFileError::Vocabulary { line, source })?;
                vocab = Some(v);
            }
            "dom" | "goal" | "fixture" => {
                let section = match keyword {
                    "dom" => Section::Dom,
                    "goal" => Section::Goal,
                    _ => Section::Fixture,
                };
                if vocab.is_none() {
                    return Err(SpecFileError::Syntax {
                        line,
                        message: "`props` must come before formulas".into(),
                    });
                }
                let (name, body) = split_labelled(rest, line)?;
                let column = content.len() - body.len() + 1;
                entries.push(Pending {
                    section,
                    id: name,
                    text: body.to_string(),
                    line,
                    column,
                });
            }
            "name" | "desc" => {
                let (name, body) = split_labelled(rest, line)?;
                labels.push((line, keyword == "name", name, body.trim().to_string()));
            }
            other => {
                return Err(SpecFileError::Syntax {
                    line,
                    message: format!("unknown keyword `{other}`"),
                })
            }
        }
    }

    let vocab = vocab.ok_or(SpecFileError::Syntax {
        line: 1,
        message: "missing `props` line".into(),
    })?;
    let (mut dom, mut goals, mut fixtures) = (Vec::new(), Vec::new(), Vec::new());
    for p in entries {
        let formula = parse_with_vocab(&p.text, &vocab).map_err(|e| e.offset(p.line, p.column))?;
        let nf = NamedFormula::new(&p.id, formula);
        match p.section {
            Section::Dom => dom.push(nf),
            Section::Goal => goals.push(nf),
            Section::Fixture => fixtures.push(nf),
        }
    }
    for (line, is_name, target, text) in labels {
        let nf = dom
            .iter_mut()
            .chain(goals.iter_mut())
            .chain(fixtures.iter_mut())
            .find(|nf| nf.id == target)
            .ok_or_else(|| SpecFileError::Syntax {
                line,
                message: format!("label for unknown formula `{target}`"),
            })?;
        if is_name {
            nf.name = text;
        } else {
            nf.description = text;
        }
    }
    Ok(Spec::new(&id, vocab, dom, goals, fixtures)?)
}

fn split_labelled(rest: &str, line: usize) -> Result<(String, &str), SpecFileError> {
    let (name, body) = rest.split_once(':').ok_or(SpecFileError::Syntax {
        line,
        message: "expected `<id>: ...`".into(),
    })?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(SpecFileError::Syntax {
            line,
            message: format!("bad identifier `{name}`"),
        });
    }
    Ok((name.to_string(), body))
}

/// Read, parse and validate a spec; fails if `Dom ∧ G` is unsatisfiable.
pub fn load_spec(path: &Path, budget: &SolverBudget) -> Result<Spec, SpecFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("spec");
    let spec = parse_spec(&text, stem)?;
    spec.check_consistent(budget)?;
    Ok(spec)
}
