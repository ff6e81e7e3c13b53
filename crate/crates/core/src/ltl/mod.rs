//! LTL syntax, concrete grammar, negation normal form and lasso semantics.

mod formula;
pub mod parse;
mod trace;
mod vocab;

pub use formula::{Formula, Prop};
pub use parse::{parse, parse_with_vocab, ParseError};
pub use trace::{EmptyLoop, LassoTrace, State, TraceRecord};
pub use vocab::{Vocabulary, VocabularyError};
