use std::fmt;
use std::str::FromStr;

use super::{ClusterError, CondensedDistanceMatrix, Dendrogram, Merge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Linkage {
    /// Unweighted mean over cross pairs (UPGMA).
    #[default]
    Average,
    Complete,
    Single,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Average, Linkage::Complete, Linkage::Single];

    pub fn as_str(self) -> &'static str {
        match self {
            Linkage::Average => "average",
            Linkage::Complete => "complete",
            Linkage::Single => "single",
        }
    }

    /// Lance-Williams update for the distance from `a ∪ b` to another cluster.
    fn combine(self, d_a: f64, size_a: usize, d_b: f64, size_b: usize) -> f64 {
        match self {
            Linkage::Average => (size_a as f64 * d_a + size_b as f64 * d_b) / (size_a + size_b) as f64,
            Linkage::Complete => d_a.max(d_b),
            Linkage::Single => d_a.min(d_b),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Linkage {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "average" | "upgma" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            "single" => Ok(Linkage::Single),
            other => Err(ClusterError::UnknownOption { kind: "linkage", value: other.to_string() }),
        }
    }
}

struct Cluster {
    node: usize,
    size: usize,
    /// Smallest leaf rank in label order; identifies the cluster in tie-breaks.
    key: usize,
}

/// Agglomerative clustering over a condensed matrix.
///
/// Leaves are processed in label order, so the tree does not depend on the
/// order of the input. Equal distances are resolved by the pair whose smallest
/// labels sort first; the cluster holding the smaller label becomes the left child.
pub fn hac(d: &CondensedDistanceMatrix, linkage: Linkage) -> Result<Dendrogram, ClusterError> {
    let n = d.len();
    if n < 2 {
        return Err(ClusterError::TooFewObservations(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d.labels()[a].cmp(&d.labels()[b]));

    // Square matrix over active slots, indexed by label rank. Entries were
    // validated as finite and nonnegative when the condensed matrix was built.
    let mut dist: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|s| d.get(order[r], order[s])).collect()).collect();
    let mut slots: Vec<Option<Cluster>> =
        (0..n).map(|rank| Some(Cluster { node: order[rank], size: 1, key: rank })).collect();

    let mut merges = Vec::with_capacity(n - 1);
    let mut floor = 0.0f64;
    for step in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for i in 0..n {
            let Some(ci) = &slots[i] else { continue };
            for j in i + 1..n {
                let Some(cj) = &slots[j] else { continue };
                let keys = (ci.key.min(cj.key), ci.key.max(cj.key));
                let candidate = (dist[i][j], keys, i, j);
                let better = match &best {
                    None => true,
                    Some(b) => candidate.0.total_cmp(&b.0).then(candidate.1.cmp(&b.1)).is_lt(),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        let (height, _, i, j) = best.expect("at least two active clusters");
        let a = slots[i].take().expect("active");
        let b = slots[j].take().expect("active");
        let (left, right) = if a.key < b.key { (&a, &b) } else { (&b, &a) };
        // A mean can round an ulp below its smallest term; keep heights monotone.
        let height = height.max(floor);
        floor = height;
        merges.push(Merge { left: left.node, right: right.node, height, size: a.size + b.size });

        for k in 0..n {
            if k == i || k == j || slots[k].is_none() {
                continue;
            }
            let merged = linkage.combine(dist[i][k], a.size, dist[j][k], b.size);
            dist[i][k] = merged;
            dist[k][i] = merged;
        }
        slots[i] = Some(Cluster { node: n + step, size: a.size + b.size, key: a.key.min(b.key) });
    }
    Dendrogram::new(d.labels().to_vec(), merges, linkage)
}
