use std::collections::HashMap;

use thiserror::Error;

use super::formula::Prop;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabularyError {
    #[error("invalid proposition name `{0}`")]
    InvalidName(String),
    #[error("duplicate proposition `{0}`")]
    Duplicate(String),
}

/// An ordered, duplicate-free proposition set. The order fixes the bit
/// position of each proposition in state encodings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    props: Vec<Prop>,
    index: HashMap<Prop, usize>,
}

impl Vocabulary {
    pub fn new<'a, I: IntoIterator<Item = &'a str>>(names: I) -> Result<Self, VocabularyError> {
        let mut vocab = Vocabulary::default();
        for name in names {
            if !Prop::is_valid_name(name) {
                return Err(VocabularyError::InvalidName(name.to_string()));
            }
            if !vocab.insert(Prop::new(name)) {
                return Err(VocabularyError::Duplicate(name.to_string()));
            }
        }
        Ok(vocab)
    }

    pub fn from_props<I: IntoIterator<Item = Prop>>(props: I) -> Self {
        let mut vocab = Vocabulary::default();
        for p in props {
            vocab.insert(p);
        }
        vocab
    }

    /// Returns false if already present.
    pub fn insert(&mut self, p: Prop) -> bool {
        if self.index.contains_key(&p) {
            return false;
        }
        self.index.insert(p.clone(), self.props.len());
        self.props.push(p);
        true
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn index_of(&self, p: &Prop) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.index.contains_key(&Prop::new(name))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Prop> {
        self.props.iter()
    }

    pub fn props(&self) -> &[Prop] {
        &self.props
    }
}
