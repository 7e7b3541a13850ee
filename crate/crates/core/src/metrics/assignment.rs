//! Exact minimum-cost assignment (Hungarian method, potentials +
//! augmenting paths, O(n^3)).

use crate::Scalar;

/// Solves the square assignment problem for the given cost function.
///
/// Returns `assign` with `assign[row] = col`, minimizing the total cost.
/// Deterministic: equal-cost alternatives resolve by column order.
pub fn solve_min<S: Scalar>(n: usize, cost: impl Fn(usize, usize) -> S) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let inf = S::infinity();
    // 1-based arrays; p[j] is the row matched to column j, p[0] the row
    // currently being placed.
    let mut u = vec![S::zero(); n + 1];
    let mut v = vec![S::zero(); n + 1];
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
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
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

    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}

/// Maximizes total weight over a (possibly rectangular) weight matrix.
///
/// Returns `assign[row] = Some(col)` for rows matched to a real column.
/// The matrix is padded square with zero weight; padded matches are
/// reported as `None`.
pub fn solve_max_rectangular<S: Scalar>(weights: &[Vec<S>]) -> Vec<Option<usize>> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return vec![None; rows];
    }
    let n = rows.max(cols);
    let assign = solve_min(n, |r, c| {
        if r < rows && c < cols {
            -weights[r][c]
        } else {
            S::zero()
        }
    });
    assign
        .into_iter()
        .take(rows)
        .map(|c| (c < cols).then_some(c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(costs: &[Vec<f64>], assign: &[usize]) -> f64 {
        assign.iter().enumerate().map(|(r, &c)| costs[r][c]).sum()
    }

    fn brute_min(costs: &[Vec<f64>]) -> f64 {
        let n = costs.len();
        let mut cols: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut cols, 0, &mut |perm| {
            let t: f64 = perm.iter().enumerate().map(|(r, &c)| costs[r][c]).sum();
            if t < best {
                best = t;
            }
        });
        best
    }

    fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, f);
            items.swap(k, i);
        }
    }

    #[test]
    fn known_three_by_three() {
        let costs = vec![
            vec![4.0, 1.0, 3.0],
            vec![2.0, 0.0, 5.0],
            vec![3.0, 2.0, 2.0],
        ];
        let assign = solve_min(3, |r, c| costs[r][c]);
        assert_eq!(total(&costs, &assign), 5.0);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..200 {
            let n = 1 + (next() % 6) as usize;
            let costs: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| (next() % 1000) as f64 / 10.0).collect())
                .collect();
            let assign = solve_min(n, |r, c| costs[r][c]);
            let mut seen = vec![false; n];
            for &c in &assign {
                assert!(!seen[c], "assignment must be injective");
                seen[c] = true;
            }
            let ours = total(&costs, &assign);
            let best = brute_min(&costs);
            assert!((ours - best).abs() < 1e-9, "trial {trial}: {ours} vs {best}");
        }
    }

    #[test]
    fn rectangular_max_overlap() {
        // 1 hypothesis row, 2 reference columns: picks the bigger overlap.
        let w = vec![vec![4.0f64, 4.5]];
        assert_eq!(solve_max_rectangular(&w), vec![Some(1)]);

        // 3 rows, 2 columns: one row goes unmatched.
        let w = vec![vec![5.0f64, 0.0], vec![0.0, 5.0], vec![1.0, 1.0]];
        let assign = solve_max_rectangular(&w);
        assert_eq!(assign[0], Some(0));
        assert_eq!(assign[1], Some(1));
        assert_eq!(assign[2], None);
    }
}
