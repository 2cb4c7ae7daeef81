//! Cuisine distances, agglomerative clustering and K-means.

mod dendrogram;
mod distance;
mod hac;
pub mod kmeans;

use thiserror::Error;

pub use dendrogram::{Dendrogram, Merge};
pub use distance::{
    condensed_index, cosine, euclidean, jaccard, pairwise_distances, pairwise_rows, CondensedDistanceMatrix,
    DistanceTag, Metric,
};
pub use hac::{hac, Linkage};
pub use kmeans::{kmeans_elbow, KMeansResult};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("condensed matrix should have {expected} entries, got {actual}")]
    WrongCondensedLength { expected: usize, actual: usize },
    #[error("`{label}` has {actual} coordinates, expected {expected}")]
    LengthMismatch { label: String, expected: usize, actual: usize },
    #[error("`{0}` is an all-zero vector; cosine distance is undefined")]
    ZeroVector(String),
    #[error("distance between `{a}` and `{b}` is {value}; expected a finite nonnegative number")]
    InvalidDistance { a: String, b: String, value: f64 },
    #[error("label `{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("unknown {kind} `{value}`")]
    UnknownOption { kind: &'static str, value: String },
    #[error("k range {k_min}..={k_max} is invalid for {n} points")]
    InvalidK { k_min: usize, k_max: usize, n: usize },
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error("malformed dendrogram: {0}")]
    MalformedTree(String),
}
