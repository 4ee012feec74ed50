//! Min-cost assignment on integer cost matrices (Hungarian method with
//! potentials and shortest augmenting paths, O(n^3)).

/// Optimal assignment of rows to columns of a square integer cost matrix,
/// minimizing the total cost. Returns `assign[row] = col`.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    assert!(n > 0 && cost.iter().all(|r| r.len() == n), "square matrix required");

    // 1-based working arrays; p[j] is the row matched to column j.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assign = vec![usize::MAX; n];
    for j in 1..=n {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Maximum total value of a (possibly rectangular) nonnegative count matrix
/// under a one-to-one row/column matching. Pads to square internally.
pub fn max_matching_total(counts: &[Vec<u64>]) -> u64 {
    let rows = counts.len();
    let cols = counts.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let n = rows.max(cols);
    let peak = counts.iter().flatten().copied().max().unwrap_or(0) as i64;
    // Maximize counts == minimize (peak - count); padding cells carry count 0.
    let cost: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = if i < rows && j < cols { counts[i][j] as i64 } else { 0 };
                    peak - c
                })
                .collect()
        })
        .collect();
    let assign = min_cost_assignment(&cost);
    let mut total = 0;
    for (i, &j) in assign.iter().enumerate().take(rows) {
        if j < cols {
            total += counts[i][j];
        }
    }
    total
}
