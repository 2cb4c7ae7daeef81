use std::fmt::Write as _;

use serde::Deserialize;

use super::{ClusterError, Linkage};
use crate::report::fmt6;

/// One agglomeration step. Node ids below `n` are leaves; step `s` creates node `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    labels: Vec<String>,
    merges: Vec<Merge>,
    linkage: Linkage,
}

#[derive(Deserialize)]
struct LinkageFile {
    linkage: String,
    labels: Vec<String>,
    merges: Vec<(usize, usize, f64, usize)>,
}

impl Dendrogram {
    pub fn new(labels: Vec<String>, merges: Vec<Merge>, linkage: Linkage) -> Result<Self, ClusterError> {
        let tree = Dendrogram { labels, merges, linkage };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<(), ClusterError> {
        let n = self.labels.len();
        let bad = |msg: String| Err(ClusterError::MalformedTree(msg));
        if n == 0 {
            return bad("no leaves".into());
        }
        if self.merges.len() != n - 1 {
            return bad(format!("{} leaves need {} merges, found {}", n, n - 1, self.merges.len()));
        }
        let mut size = vec![1usize; n];
        let mut used = vec![false; 2 * n - 1];
        for (step, m) in self.merges.iter().enumerate() {
            let new = n + step;
            for child in [m.left, m.right] {
                if child >= new {
                    return bad(format!("merge {step} refers to node {child} before it exists"));
                }
                if std::mem::replace(&mut used[child], true) {
                    return bad(format!("node {child} merged twice"));
                }
            }
            if m.left == m.right {
                return bad(format!("merge {step} joins node {} with itself", m.left));
            }
            if !(m.height.is_finite() && m.height >= 0.0) {
                return bad(format!("merge {step} has invalid height {}", m.height));
            }
            let merged = size[m.left] + size[m.right];
            if merged != m.size {
                return bad(format!("merge {step} has size {}, expected {merged}", m.size));
            }
            size.push(merged);
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn linkage(&self) -> Linkage {
        self.linkage
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    pub fn root(&self) -> usize {
        2 * self.labels.len() - 2
    }

    pub fn height(&self, node: usize) -> f64 {
        let n = self.leaf_count();
        if node < n {
            0.0
        } else {
            self.merges[node - n].height
        }
    }

    /// Leaf sets of every merge, in merge order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let n = self.leaf_count();
        let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for m in &self.merges {
            let mut merged = members[m.left].clone();
            merged.extend_from_slice(&members[m.right]);
            merged.sort_unstable();
            members.push(merged);
        }
        members.split_off(n)
    }

    /// Newick with single-quoted labels and 6-decimal branch lengths.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        self.write_newick(self.root(), &mut out);
        out.push_str(";\n");
        out
    }

    fn write_newick(&self, node: usize, out: &mut String) {
        let n = self.leaf_count();
        if node < n {
            out.push('\'');
            out.push_str(&self.labels[node].replace('\'', "''"));
            out.push('\'');
            return;
        }
        let m = self.merges[node - n];
        out.push('(');
        for (idx, child) in [m.left, m.right].into_iter().enumerate() {
            if idx > 0 {
                out.push(',');
            }
            self.write_newick(child, out);
            let _ = write!(out, ":{}", fmt6(m.height - self.height(child)));
        }
        out.push(')');
    }

    /// `{"linkage": .., "labels": [..], "merges": [[left, right, height, size], ..]}`.
    pub fn to_linkage_json(&self) -> String {
        let labels: Vec<String> =
            self.labels.iter().map(|l| serde_json::to_string(l).expect("string serializes")).collect();
        let merges: Vec<String> = self
            .merges
            .iter()
            .map(|m| format!("    [{}, {}, {}, {}]", m.left, m.right, fmt6(m.height), m.size))
            .collect();
        format!(
            "{{\n  \"linkage\": \"{}\",\n  \"labels\": [{}],\n  \"merges\": [\n{}\n  ]\n}}\n",
            self.linkage,
            labels.join(", "),
            merges.join(",\n")
        )
    }

    pub fn from_linkage_json(text: &str) -> Result<Self, ClusterError> {
        let file: LinkageFile = serde_json::from_str(text).map_err(|e| ClusterError::MalformedTree(e.to_string()))?;
        let linkage = file.linkage.parse()?;
        let merges =
            file.merges.into_iter().map(|(left, right, height, size)| Merge { left, right, height, size }).collect();
        Dendrogram::new(file.labels, merges, linkage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> Dendrogram {
        Dendrogram::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![Merge { left: 0, right: 1, height: 1.0, size: 2 }, Merge { left: 3, right: 2, height: 4.5, size: 3 }],
            Linkage::Average,
        )
        .unwrap()
    }

    #[test]
    fn newick_branch_lengths() {
        assert_eq!(three().to_newick(), "(('A':1.000000,'B':1.000000):3.500000,'C':4.500000);\n");
    }

    #[test]
    fn newick_escapes_quotes() {
        let t = Dendrogram::new(
            vec!["Bob's".into(), "X".into()],
            vec![Merge { left: 0, right: 1, height: 2.0, size: 2 }],
            Linkage::Single,
        )
        .unwrap();
        assert_eq!(t.to_newick(), "('Bob''s':2.000000,'X':2.000000);\n");
    }

    #[test]
    fn linkage_json_round_trips() {
        let t = three();
        let back = Dendrogram::from_linkage_json(&t.to_linkage_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_malformed_trees() {
        let labels = vec!["A".to_string(), "B".to_string(), "C".to_string()];
        let bad_size =
            vec![Merge { left: 0, right: 1, height: 1.0, size: 3 }, Merge { left: 3, right: 2, height: 2.0, size: 3 }];
        assert!(Dendrogram::new(labels.clone(), bad_size, Linkage::Average).is_err());
        let reused =
            vec![Merge { left: 0, right: 1, height: 1.0, size: 2 }, Merge { left: 0, right: 2, height: 2.0, size: 2 }];
        assert!(Dendrogram::new(labels.clone(), reused, Linkage::Average).is_err());
        assert!(Dendrogram::new(labels, vec![], Linkage::Average).is_err());
    }

    #[test]
    fn clusters_list_leaf_sets() {
        assert_eq!(three().clusters(), vec![vec![0, 1], vec![0, 1, 2]]);
    }
}
