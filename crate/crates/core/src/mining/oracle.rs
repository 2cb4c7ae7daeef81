use crate::corpus::{ItemId, TransactionDB};

use super::{min_count, FrequentPattern, MiningError, MiningParams};

/// Upper bound on distinct items for exhaustive enumeration.
pub const MAX_ORACLE_ITEMS: usize = 20;

/// Counts every nonempty itemset over the items present in `db` and keeps
/// those meeting the same threshold rule as [`super::fp_growth`].
pub fn brute_force_frequent(db: &TransactionDB, min_support: f64) -> Result<Vec<FrequentPattern>, MiningError> {
    MiningParams::with_support(min_support).validate()?;
    let universe: Vec<ItemId> = db.distinct_items().into_iter().collect();
    if universe.len() > MAX_ORACLE_ITEMS {
        return Err(MiningError::TooManyItems { max: MAX_ORACLE_ITEMS, actual: universe.len() });
    }
    let n = db.recipe_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let masks: Vec<u32> = db
        .transactions
        .iter()
        .map(|t| {
            t.iter()
                .map(|item| 1u32 << universe.binary_search(item).expect("item in universe"))
                .fold(0, |acc, bit| acc | bit)
        })
        .collect();
    let threshold = min_count(min_support, n);

    let mut patterns: Vec<FrequentPattern> = (1u32..(1u32 << universe.len()))
        .filter_map(|set| {
            let count = masks.iter().filter(|&&m| m & set == set).count();
            (count >= threshold).then(|| {
                let items = (0..universe.len()).filter(|bit| set & (1 << bit) != 0).map(|bit| universe[bit]).collect();
                FrequentPattern::new(items, count, n)
            })
        })
        .collect();
    patterns.sort_unstable_by(|a, b| a.items.cmp(&b.items));
    Ok(patterns)
}
