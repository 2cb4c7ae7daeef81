//! Item prevalence per cuisine and its relative (authenticity) form.
//!
//! Prevalence is the fraction of a cuisine's recipes that use an item.
//! Relative prevalence subtracts the item's mean prevalence over the other
//! cuisines, so positive values mark items a cuisine leans on and negative
//! values mark items it avoids.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{build_transactions, ClassSet, CorpusError, ItemId, RecipeRecord, TransactionSet};

#[derive(Debug, Error)]
pub enum AuthenticityError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("cuisine `{0}` has no recipes in the selected item classes")]
    EmptyCuisine(String),
    #[error("relative prevalence needs at least 2 cuisines, got {0}")]
    TooFewCuisines(usize),
    #[error("unknown cuisine `{0}`")]
    UnknownCuisine(String),
    #[error("fingerprint size must be at least 1")]
    ZeroTop,
}

/// Denominator used to turn recipe counts into prevalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// Recipes of the cuisine itself.
    #[default]
    PerCuisine,
    /// Recipes of the whole corpus.
    Global,
}

/// Which cuisines the subtracted mean runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanOver {
    /// Every cuisine except the one being scored.
    #[default]
    Others,
    All,
}

/// Item × cuisine prevalence. Rows are class-qualified items in ascending
/// order, columns are cuisines in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceMatrix {
    items: Vec<String>,
    cuisines: Vec<String>,
    /// `counts[item][cuisine]`: recipes of the cuisine containing the item.
    counts: Vec<Vec<usize>>,
    denominators: Vec<usize>,
}

impl PrevalenceMatrix {
    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn cuisines(&self) -> &[String] {
        &self.cuisines
    }

    pub fn count(&self, item: usize, cuisine: usize) -> usize {
        self.counts[item][cuisine]
    }

    pub fn denominator(&self, cuisine: usize) -> usize {
        self.denominators[cuisine]
    }

    pub fn value(&self, item: usize, cuisine: usize) -> f64 {
        self.counts[item][cuisine] as f64 / self.denominators[cuisine] as f64
    }

    pub fn row(&self, item: usize) -> Vec<f64> {
        (0..self.cuisines.len()).map(|c| self.value(item, c)).collect()
    }

    pub fn item_index(&self, item: &str) -> Option<usize> {
        self.items.binary_search_by(|i| i.as_str().cmp(item)).ok()
    }

    pub fn cuisine_index(&self, cuisine: &str) -> Option<usize> {
        self.cuisines.iter().position(|c| c == cuisine)
    }

    /// Prevalence of every item in one cuisine.
    pub fn column(&self, cuisine: usize) -> Vec<f64> {
        (0..self.items.len()).map(|i| self.value(i, cuisine)).collect()
    }
}

pub fn prevalence(
    records: &[RecipeRecord],
    classes: ClassSet,
    denominator: Denominator,
) -> Result<PrevalenceMatrix, AuthenticityError> {
    let set = build_transactions(records, classes)?;
    prevalence_from_transactions(&set, denominator)
}

/// Counts recipes (not occurrences) per item and cuisine.
pub fn prevalence_from_transactions(
    set: &TransactionSet,
    denominator: Denominator,
) -> Result<PrevalenceMatrix, AuthenticityError> {
    if let Some(db) = set.dbs.values().find(|db| db.recipe_count() == 0) {
        return Err(AuthenticityError::EmptyCuisine(db.cuisine.clone()));
    }
    let cuisines: Vec<String> = set.dbs.keys().cloned().collect();
    let mut rows: Vec<(String, ItemId)> =
        set.dictionary.iter().map(|(id, _, _)| (set.dictionary.qualified(id), id)).collect();
    rows.sort_unstable();
    let row_of: Vec<usize> = {
        let mut v = vec![0; set.dictionary.len()];
        for (row, (_, id)) in rows.iter().enumerate() {
            v[id.index()] = row;
        }
        v
    };

    let columns: Vec<Vec<usize>> = set
        .dbs
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|db| {
            let mut column = vec![0usize; rows.len()];
            for t in &db.transactions {
                for id in t {
                    column[row_of[id.index()]] += 1;
                }
            }
            column
        })
        .collect();
    let counts = (0..rows.len()).map(|r| columns.iter().map(|col| col[r]).collect()).collect();

    let total: usize = set.dbs.values().map(|db| db.recipe_count()).sum();
    let denominators = set
        .dbs
        .values()
        .map(|db| match denominator {
            Denominator::PerCuisine => db.recipe_count(),
            Denominator::Global => total,
        })
        .collect();
    Ok(PrevalenceMatrix { items: rows.into_iter().map(|(name, _)| name).collect(), cuisines, counts, denominators })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelativePrevalenceMatrix {
    items: Vec<String>,
    cuisines: Vec<String>,
    /// `values[item][cuisine]`
    values: Vec<Vec<f64>>,
}

impl RelativePrevalenceMatrix {
    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn cuisines(&self) -> &[String] {
        &self.cuisines
    }

    pub fn value(&self, item: usize, cuisine: usize) -> f64 {
        self.values[item][cuisine]
    }

    pub fn row(&self, item: usize) -> &[f64] {
        &self.values[item]
    }

    pub fn cuisine_index(&self, cuisine: &str) -> Option<usize> {
        self.cuisines.iter().position(|c| c == cuisine)
    }

    pub fn column(&self, cuisine: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[cuisine]).collect()
    }
}

pub fn relative_prevalence(
    p: &PrevalenceMatrix,
    mean: MeanOver,
) -> Result<RelativePrevalenceMatrix, AuthenticityError> {
    let c = p.cuisines.len();
    if c < 2 {
        return Err(AuthenticityError::TooFewCuisines(c));
    }
    let values = (0..p.items.len())
        .map(|i| {
            let row = p.row(i);
            (0..c)
                .map(|own| {
                    let (sum, len) = match mean {
                        MeanOver::Others => {
                            (row.iter().enumerate().filter(|&(k, _)| k != own).map(|(_, v)| v).sum::<f64>(), c - 1)
                        }
                        MeanOver::All => (row.iter().sum::<f64>(), c),
                    };
                    row[own] - sum / len as f64
                })
                .collect()
        })
        .collect();
    Ok(RelativePrevalenceMatrix { items: p.items.clone(), cuisines: p.cuisines.clone(), values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub cuisine: String,
    /// Highest relative prevalence first.
    pub most: Vec<(String, f64)>,
    /// Lowest relative prevalence first.
    pub least: Vec<(String, f64)>,
}

pub fn fingerprint(p: &RelativePrevalenceMatrix, cuisine: &str, top: usize) -> Result<Fingerprint, AuthenticityError> {
    if top == 0 {
        return Err(AuthenticityError::ZeroTop);
    }
    let col = p.cuisine_index(cuisine).ok_or_else(|| AuthenticityError::UnknownCuisine(cuisine.to_string()))?;
    let mut entries: Vec<(String, f64)> =
        p.items.iter().zip(&p.values).map(|(item, row)| (item.clone(), row[col])).collect();
    let by_name = |a: &(String, f64), b: &(String, f64)| a.0.cmp(&b.0);
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| by_name(a, b)));
    let most = entries.iter().take(top).cloned().collect();
    entries.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| by_name(a, b)));
    let least = entries.into_iter().take(top).collect();
    Ok(Fingerprint { cuisine: cuisine.to_string(), most, least })
}

/// Per-item values of one cuisine, keyed by cuisine, for clustering.
pub fn cuisine_profiles(p: &RelativePrevalenceMatrix) -> BTreeMap<String, Vec<f64>> {
    p.cuisines.iter().enumerate().map(|(c, name)| (name.clone(), p.column(c))).collect()
}
