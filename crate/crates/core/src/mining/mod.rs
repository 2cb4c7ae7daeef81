//! Frequent itemset mining per cuisine.
//!
//! [`fp_growth`] is the production miner; [`brute_force_frequent`] enumerates
//! every itemset and exists to check it.

mod fptree;
mod oracle;

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{ItemId, TransactionDB};

pub use fptree::{FpTree, HeaderEntry};
pub use oracle::{brute_force_frequent, MAX_ORACLE_ITEMS};

/// Default support threshold.
pub const DEFAULT_MIN_SUPPORT: f64 = 0.2;

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("min_support must lie in (0, 1], got {0}")]
    InvalidSupport(f64),
    #[error("max_len must be at least 1")]
    InvalidMaxLen,
    #[error("brute-force oracle supports at most {max} distinct items, database has {actual}")]
    TooManyItems { max: usize, actual: usize },
    #[error("no cuisines to mine")]
    NoCuisines,
    #[error("cuisine `{cuisine}`")]
    Cuisine {
        cuisine: String,
        #[source]
        source: Box<MiningError>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequentPattern {
    /// Sorted ascending, never empty.
    pub items: Vec<ItemId>,
    pub count: usize,
    pub support: f64,
}

impl FrequentPattern {
    fn new(mut items: Vec<ItemId>, count: usize, recipe_count: usize) -> Self {
        items.sort_unstable();
        FrequentPattern { items, count, support: count as f64 / recipe_count as f64 }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    pub min_support: f64,
    /// Longest itemset to report, unlimited when `None`.
    pub max_len: Option<usize>,
    /// Enumerate single-path conditional trees directly instead of recursing.
    pub single_path_shortcut: bool,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams { min_support: DEFAULT_MIN_SUPPORT, max_len: None, single_path_shortcut: true }
    }
}

impl MiningParams {
    pub fn with_support(min_support: f64) -> Self {
        MiningParams { min_support, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), MiningError> {
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(MiningError::InvalidSupport(self.min_support));
        }
        if self.max_len == Some(0) {
            return Err(MiningError::InvalidMaxLen);
        }
        Ok(())
    }
}

/// Smallest absolute count meeting `min_support` over `recipe_count`
/// transactions: `ceil(min_support * recipe_count)`, at least 1.
///
/// The product is nudged down by 1e-9 before rounding so that values such as
/// `0.1 * 30 = 3.0000000000000004` land on the intended integer.
pub fn min_count(min_support: f64, recipe_count: usize) -> usize {
    let exact = min_support * recipe_count as f64;
    ((exact - 1e-9).ceil() as usize).max(1)
}

/// Mines every itemset whose count reaches [`min_count`].
///
/// The result is sorted by item ids and does not depend on transaction order.
pub fn fp_growth(db: &TransactionDB, params: &MiningParams) -> Result<Vec<FrequentPattern>, MiningError> {
    params.validate()?;
    let n = db.recipe_count();
    if n == 0 {
        log::warn!("cuisine `{}` has no transactions; nothing to mine", db.cuisine);
        return Ok(Vec::new());
    }
    let threshold = min_count(params.min_support, n);
    let tree = FpTree::build(db.transactions.iter().map(|t| (t.as_slice(), 1)), threshold);

    let mut found = Vec::new();
    let mut suffix = Vec::new();
    grow(&tree, &mut suffix, threshold, params, &mut found);

    let mut patterns: Vec<FrequentPattern> =
        found.into_iter().map(|(items, count)| FrequentPattern::new(items, count, n)).collect();
    patterns.sort_unstable_by(|a, b| a.items.cmp(&b.items));
    Ok(patterns)
}

fn grow(
    tree: &FpTree,
    suffix: &mut Vec<ItemId>,
    threshold: usize,
    params: &MiningParams,
    out: &mut Vec<(Vec<ItemId>, usize)>,
) {
    let room = params.max_len.map_or(usize::MAX, |m| m - suffix.len());
    if room == 0 {
        return;
    }
    if params.single_path_shortcut {
        if let Some(path) = tree.single_path() {
            enumerate_path(&path, 0, suffix, room, None, out);
            return;
        }
    }
    for entry in tree.header().iter().rev() {
        suffix.push(entry.item);
        out.push((suffix.clone(), entry.count));
        if room > 1 {
            let base = tree.conditional_base(entry);
            let conditional = FpTree::build(base.iter().map(|(p, w)| (p.as_slice(), *w)), threshold);
            if !conditional.is_empty() {
                grow(&conditional, suffix, threshold, params, out);
            }
        }
        suffix.pop();
    }
}

/// Emits suffix ∪ S for every nonempty subset S of `path[start..]` of size at
/// most `room`. The count of S is the count of its deepest node.
fn enumerate_path(
    path: &[(ItemId, usize)],
    start: usize,
    suffix: &mut Vec<ItemId>,
    room: usize,
    count: Option<usize>,
    out: &mut Vec<(Vec<ItemId>, usize)>,
) {
    if room == 0 {
        return;
    }
    for idx in start..path.len() {
        let (item, node_count) = path[idx];
        let count = count.map_or(node_count, |c| c.min(node_count));
        suffix.push(item);
        out.push((suffix.clone(), count));
        enumerate_path(path, idx + 1, suffix, room - 1, Some(count), out);
        suffix.pop();
    }
}

/// Runs [`fp_growth`] on every cuisine in parallel.
pub fn mine_all(
    dbs: &BTreeMap<String, TransactionDB>,
    params: &MiningParams,
) -> Result<BTreeMap<String, Vec<FrequentPattern>>, MiningError> {
    if dbs.is_empty() {
        return Err(MiningError::NoCuisines);
    }
    params.validate()?;
    dbs.par_iter()
        .map(|(cuisine, db)| {
            fp_growth(db, params)
                .map(|patterns| (cuisine.clone(), patterns))
                .map_err(|source| MiningError::Cuisine { cuisine: cuisine.clone(), source: Box::new(source) })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|rows| rows.into_iter().collect())
}
