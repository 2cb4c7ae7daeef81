use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::ClusterError;
use crate::patterns::CuisineVector;

/// Vector distance between two cuisines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `1 - |A ∩ B| / |A ∪ B|` over each vector's nonzero coordinates.
    Jaccard,
    /// `1 - u·v / (|u| |v|)`. Not a metric: the triangle inequality can fail.
    Cosine,
    Euclidean,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Jaccard, Metric::Cosine, Metric::Euclidean];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Jaccard => "jaccard",
            Metric::Cosine => "cosine",
            Metric::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jaccard" => Ok(Metric::Jaccard),
            "cosine" => Ok(Metric::Cosine),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(ClusterError::UnknownOption { kind: "metric", value: other.to_string() }),
        }
    }
}

/// Where the entries of a [`CondensedDistanceMatrix`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceTag {
    Vector(Metric),
    Haversine,
    Cophenetic,
    Given,
}

/// Upper triangle of a symmetric distance matrix, row-major, without the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedDistanceMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
    tag: DistanceTag,
}

/// Offset of pair `(i, j)`, `i < j`, among `n` observations.
#[inline]
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    n * i - i * (i + 1) / 2 + j - i - 1
}

impl CondensedDistanceMatrix {
    /// Wraps precomputed distances, checking shape, label uniqueness and that
    /// every entry is finite and nonnegative.
    pub fn new(labels: Vec<String>, values: Vec<f64>, tag: DistanceTag) -> Result<Self, ClusterError> {
        let n = labels.len();
        if n < 2 {
            return Err(ClusterError::TooFewObservations(n));
        }
        if values.len() != n * (n - 1) / 2 {
            return Err(ClusterError::WrongCondensedLength { expected: n * (n - 1) / 2, actual: values.len() });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(ClusterError::DuplicateLabel(dup.clone()));
        }
        let matrix = CondensedDistanceMatrix { labels, values, tag };
        for i in 0..n {
            for j in i + 1..n {
                let d = matrix.get(i, j);
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(ClusterError::InvalidDistance {
                        a: matrix.labels[i].clone(),
                        b: matrix.labels[j].clone(),
                        value: d,
                    });
                }
            }
        }
        Ok(matrix)
    }

    /// Builds the matrix from a pairwise function evaluated in parallel.
    pub fn from_fn<F>(labels: Vec<String>, tag: DistanceTag, f: F) -> Result<Self, ClusterError>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let n = labels.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let values = pairs.par_iter().map(|&(i, j)| f(i, j)).collect();
        Self::new(labels, values, tag)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tag(&self) -> DistanceTag {
        self.tag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.0,
            Less => self.values[condensed_index(self.len(), i, j)],
            Greater => self.values[condensed_index(self.len(), j, i)],
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

pub fn jaccard(a: &[f64], b: &[f64]) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x != 0.0, y != 0.0);
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

/// Cosine distance; `None` when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((1.0 - dot / (na * nb)).clamp(0.0, 2.0))
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pairwise distances between labelled rows of equal length.
pub fn pairwise_rows<R: AsRef<[f64]> + Sync>(
    labels: Vec<String>,
    rows: &[R],
    metric: Metric,
) -> Result<CondensedDistanceMatrix, ClusterError> {
    if rows.len() != labels.len() {
        return Err(ClusterError::WrongCondensedLength { expected: labels.len(), actual: rows.len() });
    }
    if rows.len() < 2 {
        return Err(ClusterError::TooFewObservations(rows.len()));
    }
    let dim = rows[0].as_ref().len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.as_ref().len() != dim) {
        return Err(ClusterError::LengthMismatch { label: labels[i].clone(), expected: dim, actual: r.as_ref().len() });
    }
    if metric == Metric::Cosine {
        if let Some(i) = rows.iter().position(|r| r.as_ref().iter().all(|&x| x == 0.0)) {
            return Err(ClusterError::ZeroVector(labels[i].clone()));
        }
    }
    CondensedDistanceMatrix::from_fn(labels, DistanceTag::Vector(metric), |i, j| {
        let (a, b) = (rows[i].as_ref(), rows[j].as_ref());
        match metric {
            Metric::Jaccard => jaccard(a, b),
            Metric::Cosine => cosine(a, b).expect("zero vectors rejected above"),
            Metric::Euclidean => euclidean(a, b),
        }
    })
}

pub fn pairwise_distances(vectors: &[CuisineVector], metric: Metric) -> Result<CondensedDistanceMatrix, ClusterError> {
    let labels = vectors.iter().map(|v| v.cuisine.clone()).collect();
    let rows: Vec<Vec<f64>> = vectors.iter().map(CuisineVector::values).collect();
    pairwise_rows(labels, &rows, metric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> Vec<f64> {
        s.chars().map(|c| if c == '1' { 1.0 } else { 0.0 }).collect()
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn jaccard_hand_example() {
        assert!((jaccard(&bits("1100"), &bits("1010")) - 2.0 / 3.0).abs() < 1e-12);
        let d = pairwise_rows(labels(2), &[bits("1100"), bits("1010")], Metric::Jaccard).unwrap();
        assert_eq!(format!("{:.6}", d.get(0, 1)), "0.666667");
    }

    #[test]
    fn euclidean_hand_example() {
        assert_eq!(euclidean(&bits("110"), &bits("100")), 1.0);
    }

    #[test]
    fn identical_vectors_have_zero_distance() {
        let v = vec![0.3, 1.0, 0.0, 2.5];
        for metric in Metric::ALL {
            let d = pairwise_rows(labels(2), &[v.clone(), v.clone()], metric).unwrap();
            assert!(d.get(0, 1).abs() < 1e-12, "{metric}");
        }
    }

    #[test]
    fn cosine_rejects_zero_vector() {
        let err = pairwise_rows(labels(2), &[bits("000"), bits("100")], Metric::Cosine).unwrap_err();
        assert!(matches!(err, ClusterError::ZeroVector(l) if l == "c0"));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let err = pairwise_rows(labels(2), &[bits("10"), bits("100")], Metric::Euclidean).unwrap_err();
        assert!(matches!(err, ClusterError::LengthMismatch { .. }));
    }

    #[test]
    fn condensed_layout_is_row_major() {
        let d = CondensedDistanceMatrix::new(labels(4), vec![1., 2., 3., 4., 5., 6.], DistanceTag::Given).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(0, 3), 3.0);
        assert_eq!(d.get(1, 2), 4.0);
        assert_eq!(d.get(3, 2), 6.0);
        assert_eq!(d.get(2, 2), 0.0);
    }

    #[test]
    fn invalid_entries_are_rejected() {
        assert!(matches!(
            CondensedDistanceMatrix::new(labels(2), vec![-1.0], DistanceTag::Given),
            Err(ClusterError::InvalidDistance { .. })
        ));
        assert!(matches!(
            CondensedDistanceMatrix::new(labels(2), vec![f64::NAN], DistanceTag::Given),
            Err(ClusterError::InvalidDistance { .. })
        ));
        assert!(matches!(
            CondensedDistanceMatrix::new(vec!["a".into(), "a".into()], vec![1.0], DistanceTag::Given),
            Err(ClusterError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let dim = rng.gen_range(1..16);
            let rows: Vec<Vec<f64>> =
                (0..3).map(|_| (0..dim).map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 }).collect()).collect();
            for metric in [Metric::Jaccard, Metric::Euclidean] {
                let d = pairwise_rows(labels(3), &rows, metric).unwrap();
                for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                    assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-12);
                    assert_eq!(d.get(i, j), d.get(j, i));
                    assert_eq!(d.get(i, j) == 0.0, rows[i] == rows[j]);
                }
            }
        }
    }
}
