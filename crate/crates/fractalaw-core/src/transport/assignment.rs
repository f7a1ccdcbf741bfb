//! Exact minimum-cost assignment (Hungarian algorithm, shortest
//! augmenting path formulation, O(n^3)).

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Solve the square assignment problem exactly.
///
/// Returns `(perm, total)` where `perm[i]` is the column assigned to row
/// `i` and `total` is the minimal cost. Entries must be finite; ties are
/// broken deterministically by scan order.
pub fn assignment_solve(cost: &[Vec<f64>]) -> Result<(Vec<usize>, f64)> {
    let n = cost.len();
    if n == 0 {
        return Err(Error::EmptyMeasure);
    }
    for row in cost {
        if row.len() != n {
            return Err(Error::LengthMismatch(row.len(), n));
        }
        if row.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
    }

    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[j] = 1-based row matched to column j (0 = unmatched).
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
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

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            perm[p[j] - 1] = j - 1;
        }
    }
    let total = math::sum((0..n).map(|i| cost[i][perm[i]]));
    Ok((perm, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_diagonal_picks_identity() {
        let cost = vec![
            vec![0.0, 5.0, 5.0],
            vec![5.0, 0.0, 5.0],
            vec![5.0, 5.0, 0.0],
        ];
        let (perm, total) = assignment_solve(&cost).unwrap();
        assert_eq!(perm, vec![0, 1, 2]);
        assert_eq!(total, 0.0);
    }

    #[test]
    fn two_by_two_prefers_cheaper_permutation() {
        let cost = vec![vec![1.0, 3.0], vec![3.0, 1.0]];
        let (perm, total) = assignment_solve(&cost).unwrap();
        assert_eq!(perm, vec![0, 1]);
        assert_eq!(total, 2.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(assignment_solve(&[]).is_err());
        assert!(assignment_solve(&[vec![1.0, 2.0]]).is_err());
        assert!(assignment_solve(&[vec![f64::INFINITY]]).is_err());
    }
}
