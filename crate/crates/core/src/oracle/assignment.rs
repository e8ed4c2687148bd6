use crate::error::{invalid, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with row/column potentials, O(n³)). Returns `assign[i]` = column of row `i`.
pub fn solve_assignment<T: Scalar>(cost: &DenseMatrix<T>) -> Result<Vec<usize>> {
    let n = cost.rows();
    if cost.cols() != n {
        return invalid("assignment needs a square cost matrix");
    }
    let inf = T::infinity();
    // 1-based: index 0 is the virtual root column.
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
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
    Ok(assign)
}

pub fn permutation_matrix<T: Scalar>(assign: &[usize]) -> DenseMatrix<T> {
    let n = assign.len();
    let mut m = DenseMatrix::zeros(n, n);
    for (i, &j) in assign.iter().enumerate() {
        m.set(i, j, T::one());
    }
    m
}

/// `Σ_i X[i, assign[i]]`, summed in row order.
pub fn assignment_objective<T: Scalar>(x: &DenseMatrix<T>, assign: &[usize]) -> T {
    assign.iter().enumerate().fold(T::zero(), |acc, (i, &j)| acc + x.get(i, j))
}

/// Nearest permutation matrix to a square `X` and the distance to it.
pub fn nearest_permutation<T: Scalar>(x: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, T)> {
    let assign = solve_assignment(&x.map(|v| -v))?;
    let p = permutation_matrix(&assign);
    let d = (x - &p).frobenius_norm();
    Ok((p, d))
}

/// Same as [`nearest_permutation`] by trying all `n!` permutations in
/// lexicographic order. Only sensible for small `n`.
pub fn nearest_permutation_exhaustive<T: Scalar>(x: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, T)> {
    let n = x.rows();
    if x.cols() != n {
        return invalid("nearest permutation needs a square matrix");
    }
    if n > 10 {
        return invalid("exhaustive permutation search is limited to n <= 10");
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (assignment_objective(x, &perm), perm.clone());
    while next_permutation(&mut perm) {
        let obj = assignment_objective(x, &perm);
        if obj > best.0 {
            best = (obj, perm.clone());
        }
    }
    let p = permutation_matrix(&best.1);
    let d = (x - &p).frobenius_norm();
    Ok((p, d))
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
