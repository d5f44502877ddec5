//! Minimum-cost bijection between two equal-sized node sets.
//!
//! Solves the square assignment problem exactly with the O(n^3)
//! potentials-based Hungarian method, then refines the answer to the
//! lexicographically smallest optimal assignment: among all bijections of
//! minimum total cost, row 0 gets the lowest usable column, then row 1, and
//! so on. Costs are integers, so optimality checks are exact.

/// A bijection row -> column together with its total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub row_to_col: Vec<usize>,
    pub total_cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("cost matrix is not square: {rows} rows but row {row} has {len} columns")]
    NotSquare { rows: usize, row: usize, len: usize },
}

/// Returns the minimum-total-cost bijection of a square cost matrix, ties
/// broken by lowest row index, then lowest column index.
pub fn kuhn_munkres(cost: &[Vec<u64>]) -> Result<Assignment, AssignmentError> {
    let n = cost.len();
    for (row, r) in cost.iter().enumerate() {
        if r.len() != n {
            return Err(AssignmentError::NotSquare {
                rows: n,
                row,
                len: r.len(),
            });
        }
    }
    if n == 0 {
        return Ok(Assignment {
            row_to_col: Vec::new(),
            total_cost: 0,
        });
    }

    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    let optimum = min_total(cost, &rows, &cols);

    // Fix rows in order, always to the lowest column that still allows the
    // remaining rows to reach the optimum. Each feasibility probe is an exact
    // sub-problem solve on integer costs.
    let mut row_to_col = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut fixed = 0i64;
    for i in 0..n {
        let rest_rows: Vec<usize> = ((i + 1)..n).collect();
        for j in 0..n {
            if used[j] {
                continue;
            }
            let rest_cols: Vec<usize> = (0..n).filter(|&c| !used[c] && c != j).collect();
            let candidate = fixed + cost[i][j] as i64 + min_total(cost, &rest_rows, &rest_cols);
            if candidate == optimum {
                row_to_col[i] = j;
                used[j] = true;
                fixed += cost[i][j] as i64;
                break;
            }
        }
        debug_assert_ne!(row_to_col[i], usize::MAX, "some column must be feasible");
    }

    Ok(Assignment {
        row_to_col,
        total_cost: optimum as u64,
    })
}

/// Minimum assignment total over the sub-matrix selected by `rows` x `cols`
/// (equal lengths). Classic shortest-augmenting-path Hungarian with row and
/// column potentials.
fn min_total(cost: &[Vec<u64>], rows: &[usize], cols: &[usize]) -> i64 {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    if n == 0 {
        return 0;
    }
    let at = |i: usize, j: usize| cost[rows[i - 1]][cols[j - 1]] as i64;

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
                if !used[j] {
                    let cur = at(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else if minv[j] != i64::MAX {
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

    (1..=n).map(|j| at(p[j], j)).sum()
}
