//! String patterns, the shared pattern vocabulary, and per-cuisine vectors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::corpus::{ItemDictionary, ItemId};
use crate::mining::FrequentPattern;

/// Separator between items in a canonical pattern.
pub const PATTERN_DELIMITER: char = '+';

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("cannot canonicalize an empty itemset")]
    EmptyItemset,
    #[error("no patterns in any cuisine; vocabulary would be empty")]
    EmptyVocabulary,
    #[error("cuisine `{cuisine}`: pattern `{pattern}` is not in the vocabulary")]
    UnknownPattern { cuisine: String, pattern: String },
    #[error("cuisine `{cuisine}`: pattern `{pattern}` listed twice")]
    DuplicatePattern { cuisine: String, pattern: String },
}

/// Class-qualified item names, sorted and `+`-joined.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalPattern(String);

impl CanonicalPattern {
    /// Re-canonicalizes arbitrary `+`-joined text.
    pub fn from_text(text: &str) -> Result<Self, PatternError> {
        let mut parts: Vec<&str> = text.split(PATTERN_DELIMITER).map(str::trim).filter(|p| !p.is_empty()).collect();
        if parts.is_empty() {
            return Err(PatternError::EmptyItemset);
        }
        parts.sort_unstable();
        parts.dedup();
        Ok(CanonicalPattern(parts.join("+")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn items(&self) -> impl Iterator<Item = &str> {
        self.0.split(PATTERN_DELIMITER)
    }

    pub fn len(&self) -> usize {
        self.items().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CanonicalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canonicalize(items: &[ItemId], dict: &ItemDictionary) -> Result<CanonicalPattern, PatternError> {
    if items.is_empty() {
        return Err(PatternError::EmptyItemset);
    }
    let mut names: Vec<String> = items.iter().map(|&id| dict.qualified(id)).collect();
    names.sort_unstable();
    names.dedup();
    Ok(CanonicalPattern(names.join("+")))
}

/// A mined pattern after canonicalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPattern {
    pub pattern: CanonicalPattern,
    pub support: f64,
    pub count: usize,
}

pub fn score_patterns(patterns: &[FrequentPattern], dict: &ItemDictionary) -> Result<Vec<ScoredPattern>, PatternError> {
    patterns
        .iter()
        .map(|p| Ok(ScoredPattern { pattern: canonicalize(&p.items, dict)?, support: p.support, count: p.count }))
        .collect()
}

/// Label encoding of every distinct pattern text; codes follow lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternVocabulary {
    texts: Vec<CanonicalPattern>,
}

impl PatternVocabulary {
    pub fn from_patterns<'a, I>(patterns: I) -> Result<Self, PatternError>
    where
        I: IntoIterator<Item = &'a CanonicalPattern>,
    {
        let texts: BTreeSet<CanonicalPattern> = patterns.into_iter().cloned().collect();
        if texts.is_empty() {
            return Err(PatternError::EmptyVocabulary);
        }
        Ok(PatternVocabulary { texts: texts.into_iter().collect() })
    }

    pub fn code(&self, pattern: &CanonicalPattern) -> Option<usize> {
        self.texts.binary_search(pattern).ok()
    }

    pub fn pattern(&self, code: usize) -> &CanonicalPattern {
        &self.texts[code]
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CanonicalPattern)> {
        self.texts.iter().enumerate()
    }
}

pub fn build_vocabulary(all: &BTreeMap<String, Vec<ScoredPattern>>) -> Result<PatternVocabulary, PatternError> {
    PatternVocabulary::from_patterns(all.values().flatten().map(|p| &p.pattern))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuisineVector {
    pub cuisine: String,
    pub bits: Vec<bool>,
    /// Supports aligned with `bits`, zero where the bit is clear.
    pub weights: Option<Vec<f64>>,
}

impl CuisineVector {
    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    /// Coordinates for distance computations: supports when weighted, else 0/1.
    pub fn values(&self) -> Vec<f64> {
        match &self.weights {
            Some(w) => w.clone(),
            None => self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

pub fn vectorize(
    cuisine: &str,
    patterns: &[ScoredPattern],
    vocab: &PatternVocabulary,
    weighted: bool,
) -> Result<CuisineVector, PatternError> {
    let mut bits = vec![false; vocab.len()];
    let mut weights = weighted.then(|| vec![0.0; vocab.len()]);
    for p in patterns {
        let code = vocab.code(&p.pattern).ok_or_else(|| PatternError::UnknownPattern {
            cuisine: cuisine.to_string(),
            pattern: p.pattern.to_string(),
        })?;
        if bits[code] {
            return Err(PatternError::DuplicatePattern {
                cuisine: cuisine.to_string(),
                pattern: p.pattern.to_string(),
            });
        }
        bits[code] = true;
        if let Some(w) = weights.as_mut() {
            w[code] = p.support;
        }
    }
    Ok(CuisineVector { cuisine: cuisine.to_string(), bits, weights })
}

/// Vectorizes every cuisine against one vocabulary, in cuisine order.
pub fn vectorize_all(
    all: &BTreeMap<String, Vec<ScoredPattern>>,
    vocab: &PatternVocabulary,
    weighted: bool,
) -> Result<Vec<CuisineVector>, PatternError> {
    use rayon::prelude::*;
    let entries: Vec<_> = all.iter().collect();
    entries.par_iter().map(|(cuisine, patterns)| vectorize(cuisine, patterns, vocab, weighted)).collect()
}
