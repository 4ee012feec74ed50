// scratch probe, removed before finishing
use s3comp::consensus::{damped_omp, sample_dropout_masks, ConsensusParams, DropoutPlan};
use s3comp::dataset::{generate_synthetic, DataMatrix, SyntheticSpec};
use s3comp::sparse::SparseCoefVector;

// consensus objective of Eq-12 style for one column: (1/T) sum_t [ ||x_j - Xi b_t||^2 + lambda ||b_t - c||^2 ]
fn column_objective(
    x: &DataMatrix,
    j: usize,
    plan: &DropoutPlan,
    subs: &[SparseCoefVector],
    c: &SparseCoefVector,
    lambda: f64,
) -> f64 {
    let t_count = subs.len();
    let mut total = 0.0;
    for (t, b) in subs.iter().enumerate() {
        let mut r = x.col(j).to_vec();
        for (i, v) in b.iter() {
            if plan.is_kept(t, i) {
                for (ri, xi) in r.iter_mut().zip(x.col(i)) {
                    *ri -= v * xi;
                }
            }
        }
        let res: f64 = r.iter().map(|v| v * v).sum();
        let mut pen = 0.0;
        for i in 0..x.num_points() {
            let d = b.get(i) - c.get(i);
            pen += d * d;
        }
        total += res + lambda * pen;
    }
    total / t_count as f64
}

fn main() {
    let spec = SyntheticSpec { n: 5, d: 6, ambient_dim: 9, points_per_subspace: 60, seed: 2 };
    let (x, _) = generate_synthetic(&spec).unwrap();
    let n = x.num_points();
    let plan = sample_dropout_masks(n, 0.4, 15, 2);
    let params = ConsensusParams::new(5, 0.7);
    let lambda = params.lambda;

    // Manual consensus loop on a few columns with instrumentation.
    for j in [0usize, 77, 250] {
        let mut c = SparseCoefVector::zeros(n);
        let mut prev_supports: Vec<Vec<usize>> = vec![vec![]; 15];
        println!("column {j}:");
        for outer in 1..=12 {
            let mut subs = Vec::new();
            let mut flips = 0;
            for t in 0..15 {
                let keep: Vec<usize> = plan.keep_set(t).iter().copied().filter(|&i| i != j).collect();
                let b = damped_omp(&x, &keep, x.col(j), &c, params.s, lambda, params.eps_inner).unwrap();
                let sup: Vec<usize> = b.support().collect();
                flips += sup.iter().filter(|i| !prev_supports[t].contains(i)).count();
                prev_supports[t] = sup;
                subs.push(b);
            }
            // mean average
            let mut dense = vec![0.0; n];
            for b in &subs {
                for (i, v) in b.iter() {
                    dense[i] += v / 15.0;
                }
            }
            let c_new = SparseCoefVector::from_dense(&dense);
            let rel = c_new.dist2(&c) / c.norm2().max(1e-12);
            let obj = column_objective(&x, j, &plan, &subs, &c_new, lambda);
            println!("  it{outer}: rel={rel:.4} obj={obj:.5} support_flips={flips} nnz={}", c_new.nnz());
            c = c_new;
        }
    }
}
