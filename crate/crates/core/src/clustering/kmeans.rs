//! Lloyd's K-means with k-means++ seeding and a WCSS elbow scan.

use std::ops::RangeInclusive;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ClusterError;

pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub wcss: f64,
    /// Seed of the winning restart.
    pub seed: u64,
    /// Index of the winning restart; index `restarts` is the nested start
    /// grown from the previous k.
    pub best_restart: usize,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydRun {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// WCSS after the initial assignment and after every iteration.
    pub trace: Vec<f64>,
}

impl LloydRun {
    pub fn wcss(&self) -> f64 {
        *self.trace.last().expect("trace is never empty")
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sum of squared Euclidean distances from points to their assigned centroids.
pub fn wcss(points: &[Vec<f64>], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    points.iter().zip(assignments).map(|(p, &c)| sq_dist(p, &centroids[c])).sum()
}

/// Assigns each point to its nearest centroid. A point keeps its previous
/// centroid unless another one is strictly closer; otherwise the lowest index wins.
fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>], previous: Option<&[usize]>) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut best = previous.map_or(0, |prev| prev[idx]);
            let mut best_d = sq_dist(p, &centroids[best]);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

/// Moves each centroid to the mean of its points; empty clusters stay put.
fn update(points: &[Vec<f64>], centroids: &mut [Vec<f64>], assignments: &[usize]) {
    let dim = centroids[0].len();
    let mut sums = vec![vec![0.0; dim]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (p, &c) in points.iter().zip(assignments) {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(p) {
            *s += x;
        }
    }
    for ((centroid, sum), &count) in centroids.iter_mut().zip(sums).zip(&counts) {
        if count > 0 {
            *centroid = sum.into_iter().map(|s| s / count as f64).collect();
        }
    }
}

/// Runs Lloyd iterations from `init` until assignments stop changing.
pub fn lloyd(points: &[Vec<f64>], init: Vec<Vec<f64>>, max_iterations: usize) -> LloydRun {
    let mut centroids = init;
    let mut assignments = assign(points, &centroids, None);
    let mut trace = vec![wcss(points, &centroids, &assignments)];
    for _ in 0..max_iterations {
        update(points, &mut centroids, &assignments);
        let next = assign(points, &centroids, Some(&assignments));
        trace.push(wcss(points, &centroids, &next));
        if next == assignments {
            break;
        }
        assignments = next;
    }
    LloydRun { centroids, assignments, trace }
}

/// k-means++ seeding: each new centroid is drawn with probability
/// proportional to its squared distance from the nearest chosen one.
pub fn kmeans_plus_plus<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut chosen = vec![rng.gen_range(0..points.len())];
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let next = match WeightedIndex::new(&nearest) {
            Ok(dist) => dist.sample(rng),
            // Every point coincides with a chosen centroid.
            Err(_) => (0..points.len()).find(|i| !chosen.contains(i)).expect("k <= n"),
        };
        chosen.push(next);
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

/// Seed of restart `restart` for `k`, derived from the run seed.
pub fn restart_seed(seed: u64, k: usize, restart: usize) -> u64 {
    splitmix64(seed ^ splitmix64(((k as u64) << 32) | restart as u64))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Best-of-`restarts` K-means for every k in `k_range`.
///
/// From the second k on, one extra start reuses the previous best centroids
/// plus the point farthest from its centroid, so WCSS never increases with k.
pub fn kmeans_elbow(
    points: &[Vec<f64>],
    k_range: RangeInclusive<usize>,
    restarts: usize,
    seed: u64,
) -> Result<Vec<KMeansResult>, ClusterError> {
    let n = points.len();
    if n == 0 {
        return Err(ClusterError::TooFewObservations(0));
    }
    let dim = points[0].len();
    if let Some(i) = points.iter().position(|p| p.len() != dim) {
        return Err(ClusterError::LengthMismatch {
            label: format!("point {i}"),
            expected: dim,
            actual: points[i].len(),
        });
    }
    let (k_min, k_max) = (*k_range.start(), *k_range.end());
    if k_min == 0 || k_min > k_max || k_max > n {
        return Err(ClusterError::InvalidK { k_min, k_max, n });
    }
    if restarts == 0 {
        return Err(ClusterError::NoRestarts);
    }

    let mut results: Vec<KMeansResult> = Vec::with_capacity(k_max - k_min + 1);
    for k in k_range {
        let mut runs: Vec<(usize, u64, LloydRun)> = (0..restarts)
            .into_par_iter()
            .map(|r| {
                let s = restart_seed(seed, k, r);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let init = kmeans_plus_plus(points, k, &mut rng);
                (r, s, lloyd(points, init, MAX_ITERATIONS))
            })
            .collect();
        if let Some(prev) = results.last() {
            let farthest = farthest_point(points, &prev.centroids, &prev.assignments);
            let mut init = prev.centroids.clone();
            init.push(points[farthest].clone());
            runs.push((restarts, restart_seed(seed, k, restarts), lloyd(points, init, MAX_ITERATIONS)));
        }
        let (best_restart, best_seed, best) =
            runs.into_iter().reduce(|a, b| if b.2.wcss() < a.2.wcss() { b } else { a }).expect("at least one restart");
        let wcss = best.wcss();
        results.push(KMeansResult {
            k,
            centroids: best.centroids,
            assignments: best.assignments,
            wcss,
            seed: best_seed,
            best_restart,
            restarts,
        });
    }
    Ok(results)
}

fn farthest_point(points: &[Vec<f64>], centroids: &[Vec<f64>], assignments: &[usize]) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (p, &c)) in points.iter().zip(assignments).enumerate() {
        let d = sq_dist(p, &centroids[c]);
        if d > best.1 {
            best = (i, d);
        }
    }
    best.0
}
