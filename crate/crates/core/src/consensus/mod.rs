//! Dropout masks, damped pursuit, and the consensus solver built on them.
//!
//! The pipeline: sample `T` Bernoulli keep/drop masks once, then for every
//! point alternate between (a) solving `T` damped pursuits against the
//! masked dictionaries given the current consensus vector and (b) averaging
//! the subsolutions into a new consensus vector, until the relative change
//! is small. Running a single outer iteration gives the cheap one-shot
//! variant; iterating to convergence gives the full variant.

mod damped;
mod objective;

pub use damped::{damped_omp, damped_omp_union, psi_score};
pub use objective::{dropout_objective_mc, regularized_objective};

pub use crate::omp::SolveError;

use crate::dataset::DataMatrix;
use crate::rng::{stream_rng, StreamPurpose};
use crate::sparse::{SelfExpressionMatrix, SparseCoefVector};
use rand::Rng;
use rayon::prelude::*;

/// How the `T` subsolutions are combined into the consensus vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Divide the entrywise sum by `T`.
    #[default]
    Mean,
    /// Divide entry `i` by `r_i`, the number of subsolutions in which it is
    /// nonzero.
    Star,
}

/// `T` fixed Bernoulli keep/drop masks at dropout rate `delta`.
///
/// Masks are sampled once and shared by every column solve; each column
/// additionally excludes its own index from the candidate sets.
#[derive(Debug, Clone)]
pub struct DropoutPlan {
    delta: f64,
    seed: u64,
    /// Kept indices per subproblem, ascending.
    keep_sets: Vec<Vec<usize>>,
    /// Membership flags per subproblem, length N.
    kept_flags: Vec<Vec<bool>>,
}

impl DropoutPlan {
    pub fn num_subproblems(&self) -> usize {
        self.keep_sets.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_points(&self) -> usize {
        self.kept_flags.first().map_or(0, Vec::len)
    }

    /// Kept indices of subproblem `t`, ascending.
    pub fn keep_set(&self, t: usize) -> &[usize] {
        &self.keep_sets[t]
    }

    pub fn is_kept(&self, t: usize, i: usize) -> bool {
        self.kept_flags[t][i]
    }

    /// Dropped indices of subproblem `t`, ascending.
    pub fn dropped_set(&self, t: usize) -> Vec<usize> {
        (0..self.num_points()).filter(|&i| !self.kept_flags[t][i]).collect()
    }
}

/// Sample a dropout plan: every index is kept independently with probability
/// `1 - delta` in each of the `t_count` masks. Deterministic in the seed.
pub fn sample_dropout_masks(n: usize, delta: f64, t_count: usize, seed: u64) -> DropoutPlan {
    assert!((0.0..1.0).contains(&delta), "dropout rate must be in [0, 1)");
    assert!(t_count >= 1, "need at least one subproblem");
    let mut keep_sets = Vec::with_capacity(t_count);
    let mut kept_flags = Vec::with_capacity(t_count);
    for t in 0..t_count {
        let mut rng = stream_rng(seed, StreamPurpose::Masks, t as u64);
        let mut keep = Vec::with_capacity(n);
        let mut flags = vec![false; n];
        for i in 0..n {
            if rng.gen::<f64>() >= delta {
                keep.push(i);
                flags[i] = true;
            }
        }
        keep_sets.push(keep);
        kept_flags.push(flags);
    }
    DropoutPlan { delta, seed, keep_sets, kept_flags }
}

/// Parameters of the consensus solver.
#[derive(Debug, Clone, Copy)]
pub struct ConsensusParams {
    /// Per-subproblem sparsity budget.
    pub s: usize,
    /// Penalty weight tying subsolutions to the consensus vector. Zero is
    /// permitted only for the plain-OMP equivalence mode; consensus solves
    /// use a positive value (the useful range is roughly [0.1, 1.0]).
    pub lambda: f64,
    /// Residual tolerance of the inner pursuit.
    pub eps_inner: f64,
    /// Relative-change threshold of the outer loop.
    pub eps_outer: f64,
    /// Outer iteration cap.
    pub max_outer: usize,
    pub averaging: Averaging,
    /// Allow picking atoms from the dropped set when the kept-set score is
    /// not profitable (the union selection rule).
    pub union_selection: bool,
}

impl ConsensusParams {
    pub fn new(s: usize, lambda: f64) -> Self {
        Self {
            s,
            lambda,
            eps_inner: 1e-6,
            eps_outer: 1e-3,
            max_outer: 10,
            averaging: Averaging::Mean,
            union_selection: false,
        }
    }
}

fn average(
    subs: &[SparseCoefVector],
    n: usize,
    averaging: Averaging,
) -> SparseCoefVector {
    // Collect in t order, then stable-sort by index: within one index the
    // summation order stays t-ascending, so the reduction is reproducible.
    let mut all: Vec<(usize, f64)> = Vec::new();
    for b in subs {
        all.extend(b.iter());
    }
    all.sort_by_key(|&(i, _)| i);
    let t_count = subs.len() as f64;
    let mut entries: Vec<(usize, f64)> = Vec::new();
    let mut pos = 0;
    while pos < all.len() {
        let idx = all[pos].0;
        let mut sum = 0.0;
        let mut count = 0.0;
        while pos < all.len() && all[pos].0 == idx {
            sum += all[pos].1;
            count += 1.0;
            pos += 1;
        }
        let value = match averaging {
            Averaging::Mean => sum / t_count,
            Averaging::Star => sum / count,
        };
        entries.push((idx, value));
    }
    SparseCoefVector::from_entries(n, entries)
}

fn consensus_column(
    x: &DataMatrix,
    j: usize,
    plan: &DropoutPlan,
    params: &ConsensusParams,
    history: Option<&mut Vec<SparseCoefVector>>,
) -> Result<(SparseCoefVector, usize, bool), SolveError> {
    let n = x.num_points();
    let mut c = SparseCoefVector::zeros(n);
    let mut history = history;
    let mut converged = false;
    let mut iters = 0;

    for _ in 0..params.max_outer {
        let mut subs = Vec::with_capacity(plan.num_subproblems());
        for t in 0..plan.num_subproblems() {
            let dropped;
            let dropped_ref = if params.union_selection {
                dropped = plan.dropped_set(t);
                Some(dropped.as_slice())
            } else {
                None
            };
            let b = damped::damped_omp_excluding(
                x,
                plan.keep_set(t),
                Some(&plan.kept_flags[t]),
                dropped_ref,
                j,
                x.col(j),
                &c,
                params.s,
                params.lambda,
                params.eps_inner,
                None,
            )?;
            subs.push(b);
        }
        let c_new = average(&subs, n, params.averaging);
        let rel = c_new.dist2(&c) / c.norm2().max(1e-12);
        c = c_new;
        iters += 1;
        if let Some(h) = history.as_deref_mut() {
            h.push(c.clone());
        }
        if rel < params.eps_outer {
            converged = true;
            break;
        }
    }
    Ok((c, iters, converged))
}

/// Consensus vector for point `j`: alternate damped pursuits over the `T`
/// masked dictionaries with averaging, until the relative change of the
/// consensus vector falls below `eps_outer` or `max_outer` is reached. The
/// support size of the result is at most `s * T`.
pub fn consensus_solve(
    x: &DataMatrix,
    j: usize,
    plan: &DropoutPlan,
    params: &ConsensusParams,
) -> Result<SparseCoefVector, SolveError> {
    crate::omp::check_sparsity(params.s, x.num_points())?;
    consensus_column(x, j, plan, params, None).map(|(c, _, _)| c)
}

/// Full consensus result for a whole matrix, with the per-outer-iteration
/// relative change of the assembled matrix.
#[derive(Debug, Clone)]
pub struct ConsensusMatrixResult {
    pub matrix: SelfExpressionMatrix,
    /// `||C_k - C_{k-1}||_F / max(||C_{k-1}||_F, 1e-12)` for k = 2, 3, ...
    /// Columns that stopped early hold their final value.
    pub relative_changes: Vec<f64>,
    /// Largest per-column outer iteration count.
    pub outer_iterations: usize,
    /// True when every column converged before the iteration cap.
    pub converged: bool,
}

fn consensus_matrix_impl(
    x: &DataMatrix,
    plan: &DropoutPlan,
    params: &ConsensusParams,
    trace: bool,
) -> Result<ConsensusMatrixResult, SolveError> {
    let n = x.num_points();
    crate::omp::check_sparsity(params.s, n)?;
    assert_eq!(plan.num_points(), n, "plan was sampled for a different N");

    let per_column: Result<Vec<_>, SolveError> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut history = if trace { Some(Vec::new()) } else { None };
            consensus_column(x, j, plan, params, history.as_mut())
                .map(|(c, iters, conv)| (c, iters, conv, history))
                .map_err(|e| SolveError::Column { index: j, source: Box::new(e) })
        })
        .collect();
    let per_column = per_column?;

    let outer_iterations = per_column.iter().map(|(_, it, _, _)| *it).max().unwrap_or(0);
    let converged = per_column.iter().all(|(_, _, conv, _)| *conv);
    let columns: Vec<SparseCoefVector> =
        per_column.iter().map(|(c, _, _, _)| c.clone()).collect();
    let matrix = SelfExpressionMatrix::from_columns(columns);

    let mut relative_changes = Vec::new();
    if trace && outer_iterations >= 2 {
        let snapshot = |k: usize| -> SelfExpressionMatrix {
            SelfExpressionMatrix::from_columns(
                per_column
                    .iter()
                    .map(|(_, _, _, h)| {
                        let h = h.as_ref().expect("trace enabled");
                        h[k.min(h.len() - 1)].clone()
                    })
                    .collect(),
            )
        };
        let mut prev = snapshot(0);
        for k in 1..outer_iterations {
            let cur = snapshot(k);
            relative_changes.push(SelfExpressionMatrix::relative_change(&cur, &prev));
            prev = cur;
        }
    }

    Ok(ConsensusMatrixResult { matrix, relative_changes, outer_iterations, converged })
}

/// One-shot variant: a single outer iteration per column.
pub fn s3comp_matrix(
    x: &DataMatrix,
    plan: &DropoutPlan,
    params: &ConsensusParams,
) -> Result<SelfExpressionMatrix, SolveError> {
    let one_shot = ConsensusParams { max_outer: 1, ..*params };
    Ok(consensus_matrix_impl(x, plan, &one_shot, false)?.matrix)
}

/// Fully iterated variant.
pub fn s3comp_c_matrix(
    x: &DataMatrix,
    plan: &DropoutPlan,
    params: &ConsensusParams,
) -> Result<SelfExpressionMatrix, SolveError> {
    Ok(consensus_matrix_impl(x, plan, params, false)?.matrix)
}

/// Fully iterated variant with the outer-iteration convergence trace.
pub fn s3comp_c_matrix_traced(
    x: &DataMatrix,
    plan: &DropoutPlan,
    params: &ConsensusParams,
) -> Result<ConsensusMatrixResult, SolveError> {
    consensus_matrix_impl(x, plan, params, true)
}
