//! Seeded k-means with k-means++ initialization and restarts.

use crate::rng::{stream_rng, StreamPurpose};
use ndarray::Array2;
use rand::Rng;

const MAX_ITERS: usize = 300;

/// Cluster the rows of `rows` into `n` groups. Runs `restarts` independent
/// k-means++ initializations and keeps the lowest-inertia result (earliest
/// restart wins ties). Returns 1-based labels; deterministic in `seed`.
pub fn kmeans(rows: &Array2<f64>, n: usize, seed: u64, restarts: usize) -> Vec<usize> {
    let points = rows.nrows();
    assert!(n >= 1 && n <= points, "cluster count {n} out of range for {points} points");
    assert!(restarts >= 1);

    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..restarts {
        let mut rng = stream_rng(seed, StreamPurpose::KmeansInit, r as u64);
        let centers = plus_plus_init(rows, n, &mut rng);
        let (labels, inertia) = lloyd(rows, centers);
        if best.as_ref().map_or(true, |(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    best.expect("at least one restart").1
}

fn sq_dist(rows: &Array2<f64>, i: usize, center: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (c, &v) in center.iter().enumerate() {
        let d = rows[(i, c)] - v;
        acc += d * d;
    }
    acc
}

fn plus_plus_init(rows: &Array2<f64>, n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let points = rows.nrows();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(n);
    let first = rng.gen_range(0..points);
    centers.push(rows.row(first).to_vec());

    let mut dists: Vec<f64> = (0..points).map(|i| sq_dist(rows, i, &centers[0])).collect();
    while centers.len() < n {
        let total: f64 = dists.iter().sum();
        let pick = if total <= 0.0 {
            // All points coincide with a center; any index works.
            rng.gen_range(0..points)
        } else {
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = points - 1;
            for (i, &d) in dists.iter().enumerate() {
                u -= d;
                if u <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centers.push(rows.row(pick).to_vec());
        for i in 0..points {
            let d = sq_dist(rows, i, centers.last().unwrap());
            if d < dists[i] {
                dists[i] = d;
            }
        }
    }
    centers
}

fn lloyd(rows: &Array2<f64>, mut centers: Vec<Vec<f64>>) -> (Vec<usize>, f64) {
    let points = rows.nrows();
    let dim = rows.ncols();
    let n = centers.len();
    let mut labels = vec![0usize; points];

    for _ in 0..MAX_ITERS {
        let mut changed = false;
        for i in 0..points {
            let mut best = 0;
            let mut best_d = sq_dist(rows, i, &centers[0]);
            for c in 1..n {
                let d = sq_dist(rows, i, &centers[c]);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; n];
        let mut counts = vec![0usize; n];
        for i in 0..points {
            counts[labels[i]] += 1;
            for c in 0..dim {
                sums[labels[i]][c] += rows[(i, c)];
            }
        }
        for c in 0..n {
            // Empty clusters keep their previous center.
            if counts[c] > 0 {
                for k in 0..dim {
                    centers[c][k] = sums[c][k] / counts[c] as f64;
                }
            }
        }
    }

    let inertia: f64 = (0..points).map(|i| sq_dist(rows, i, &centers[labels[i]])).sum();
    (labels.iter().map(|&l| l + 1).collect(), inertia)
}
