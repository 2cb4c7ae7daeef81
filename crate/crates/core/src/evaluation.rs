//! Agreement between two dendrograms over the same leaves.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::clustering::{CondensedDistanceMatrix, Dendrogram, DistanceTag};
use crate::report::fmt6;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("trees have different leaves; only in left: {only_left:?}, only in right: {only_right:?}")]
    LeafMismatch { only_left: Vec<String>, only_right: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correlation {
    #[default]
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeComparison {
    pub cophenetic_correlation: f64,
    pub robinson_foulds: usize,
    pub rf_normalized: f64,
    pub leaves: usize,
}

impl TreeComparison {
    /// Fixed-precision JSON for `comparison.json`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\n  \"cophenetic_correlation\": {},\n  \"robinson_foulds\": {},\n  \"rf_normalized\": {},\n  \"leaves\": {}\n}}\n",
            fmt6(self.cophenetic_correlation),
            self.robinson_foulds,
            fmt6(self.rf_normalized),
            self.leaves
        )
    }
}

/// Height of the lowest merge joining each pair of leaves.
pub fn cophenetic_matrix(tree: &Dendrogram) -> CondensedDistanceMatrix {
    let n = tree.leaf_count();
    let mut coph = vec![vec![0.0; n]; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for m in tree.merges() {
        for &a in &members[m.left] {
            for &b in &members[m.right] {
                coph[a][b] = m.height;
                coph[b][a] = m.height;
            }
        }
        let mut merged = members[m.left].clone();
        merged.extend_from_slice(&members[m.right]);
        members.push(merged);
    }
    let values = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| coph[i][j]).collect();
    CondensedDistanceMatrix::new(tree.labels().to_vec(), values, DistanceTag::Cophenetic)
        .expect("dendrogram heights are finite and nonnegative")
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        // Undefined for a constant input; treat equal inputs as perfect agreement.
        return if x == y { 1.0 } else { 0.0 };
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Average ranks starting from 1, ties share their mean rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            out[idx] = rank;
        }
        start = end;
    }
    out
}

/// Nontrivial leaf bipartitions, each keyed by the side not holding the
/// alphabetically first label.
fn splits(tree: &Dendrogram, position: &HashMap<&str, usize>) -> BTreeSet<Vec<bool>> {
    let n = tree.leaf_count();
    let anchor = 0;
    let clusters = tree.clusters();
    clusters[..clusters.len().saturating_sub(1)]
        .iter()
        .filter(|c| c.len() >= 2 && c.len() <= n.saturating_sub(2))
        .map(|c| {
            let mut side = vec![false; n];
            for &leaf in c {
                side[position[tree.labels()[leaf].as_str()]] = true;
            }
            if side[anchor] {
                side.iter_mut().for_each(|b| *b = !*b);
            }
            side
        })
        .collect()
}

pub fn compare(a: &Dendrogram, b: &Dendrogram) -> Result<TreeComparison, EvaluationError> {
    compare_with(a, b, Correlation::Pearson)
}

pub fn compare_with(
    a: &Dendrogram,
    b: &Dendrogram,
    correlation: Correlation,
) -> Result<TreeComparison, EvaluationError> {
    let left: BTreeSet<&str> = a.labels().iter().map(String::as_str).collect();
    let right: BTreeSet<&str> = b.labels().iter().map(String::as_str).collect();
    if left != right || a.leaf_count() != b.leaf_count() {
        return Err(EvaluationError::LeafMismatch {
            only_left: left.difference(&right).map(|s| s.to_string()).collect(),
            only_right: right.difference(&left).map(|s| s.to_string()).collect(),
        });
    }
    let n = a.leaf_count();
    // Canonical leaf positions by label, shared by both trees.
    let position: HashMap<&str, usize> = left.iter().enumerate().map(|(i, l)| (*l, i)).collect();

    let ca = cophenetic_matrix(a);
    let cb = cophenetic_matrix(b);
    let index_a: Vec<usize> = left.iter().map(|l| ca.index_of(l).expect("leaf")).collect();
    let index_b: Vec<usize> = left.iter().map(|l| cb.index_of(l).expect("leaf")).collect();
    let mut xa = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut xb = Vec::with_capacity(xa.capacity());
    for i in 0..n {
        for j in i + 1..n {
            xa.push(ca.get(index_a[i], index_a[j]));
            xb.push(cb.get(index_b[i], index_b[j]));
        }
    }
    let cophenetic_correlation = if xa.is_empty() {
        1.0
    } else {
        match correlation {
            Correlation::Pearson => pearson(&xa, &xb),
            Correlation::Spearman => pearson(&ranks(&xa), &ranks(&xb)),
        }
    };

    let sa = splits(a, &position);
    let sb = splits(b, &position);
    let robinson_foulds = sa.symmetric_difference(&sb).count();
    let rf_normalized = if n >= 4 { robinson_foulds as f64 / (2 * (n - 3)) as f64 } else { 0.0 };
    Ok(TreeComparison { cophenetic_correlation, robinson_foulds, rf_normalized, leaves: n })
}
