//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! One-sided Jacobi orthogonalises the columns of a working copy of `X` while
//! accumulating the rotations in `V`. On convergence the column norms are the
//! singular values and the normalised columns are the left vectors. It is
//! slower than Golub-Kahan for large matrices but accurate to a few ulps in
//! the reconstruction, which is what every distance formula downstream needs.

use super::matrix::{dot, norm2, DenseMatrix};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 80;

/// `X = left · diag(singular) · rightᵀ` with `singular` sorted descending.
#[derive(Debug, Clone)]
pub struct SvdResult<T: Scalar> {
    /// `n x r`, orthonormal columns.
    pub left: DenseMatrix<T>,
    /// `r` nonnegative values, descending.
    pub singular: Vec<T>,
    /// `r x r`, orthogonal.
    pub right: DenseMatrix<T>,
}

impl<T: Scalar> SvdResult<T> {
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let mut us = self.left.clone();
        for (j, &s) in self.singular.iter().enumerate() {
            for v in us.column_mut(j) {
                *v = *v * s;
            }
        }
        us.matmul(&self.right.transpose())
    }

    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let smax = self.singular.first().copied().unwrap_or_else(T::zero);
        if smax == T::zero() {
            return 0;
        }
        self.singular.iter().filter(|&&s| s > rel_tol * smax).count()
    }
}

/// Thin SVD of an `n x r` matrix with `r ≤ n`.
pub fn thin_svd<T: Scalar>(x: &DenseMatrix<T>) -> Result<SvdResult<T>> {
    let (n, r) = x.shape();
    if r > n {
        return invalid(format!("thin_svd needs cols <= rows, got {n}x{r}"));
    }
    if !x.is_finite() {
        return invalid("thin_svd input has non-finite entries");
    }

    let mut a = x.clone();
    let mut v = DenseMatrix::<T>::identity(r, r);
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..r {
            for q in (p + 1)..r {
                let alpha = dot(a.column(p), a.column(p));
                let beta = dot(a.column(q), a.column(q));
                let gamma = dot(a.column(p), a.column(q));
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                rotate_columns(&mut a, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = (0..r).map(|j| norm2(a.column(j))).collect();
    let mut order: Vec<usize> = (0..r).collect();
    // Stable sort keeps the original column order among equal values.
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let smax = order.first().map_or(T::zero(), |&j| norms[j]);
    let cutoff = smax * eps * T::lit(r.max(1) as f64);

    let mut left = DenseMatrix::<T>::zeros(n, r);
    let mut right = DenseMatrix::<T>::zeros(r, r);
    let mut singular = Vec::with_capacity(r);
    let mut filled = 0usize;
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        right.column_mut(dst).copy_from_slice(v.column(src));
        if s > cutoff && s > T::zero() {
            for (o, &val) in left.column_mut(dst).iter_mut().zip(a.column(src)) {
                *o = val / s;
            }
            filled += 1;
            singular.push(s);
        } else {
            singular.push(if s > cutoff { s } else { T::zero() });
        }
    }

    if filled < r {
        let basis = left.columns(0..filled.max(1));
        let known = if filled == 0 { None } else { Some(&basis) };
        let extra = orthonormal_completion(n, known, r - filled);
        for k in 0..(r - filled) {
            left.column_mut(filled + k).copy_from_slice(extra.column(k));
        }
    }

    Ok(SvdResult { left, singular, right })
}

fn rotate_columns<T: Scalar>(m: &mut DenseMatrix<T>, p: usize, q: usize, c: T, s: T) {
    let rows = m.rows();
    for i in 0..rows {
        let mp = m.get(i, p);
        let mq = m.get(i, q);
        m.set(i, p, c * mp - s * mq);
        m.set(i, q, s * mp + c * mq);
    }
}

/// `count` orthonormal vectors in `ℝⁿ` orthogonal to the columns of `basis`
/// (assumed orthonormal). Greedy over coordinate vectors with two passes of
/// Gram-Schmidt; ties go to the smallest coordinate index.
pub(crate) fn orthonormal_completion<T: Scalar>(
    n: usize,
    basis: Option<&DenseMatrix<T>>,
    count: usize,
) -> DenseMatrix<T> {
    let mut vecs: Vec<Vec<T>> = match basis {
        Some(b) => (0..b.cols()).map(|j| b.column(j).to_vec()).collect(),
        None => Vec::new(),
    };
    let start = vecs.len();
    assert!(start + count <= n, "cannot complete beyond the ambient dimension");

    for _ in 0..count {
        let mut best: Option<(T, Vec<T>)> = None;
        for i in 0..n {
            let mut cand = vec![T::zero(); n];
            cand[i] = T::one();
            for _pass in 0..2 {
                for b in &vecs {
                    let c = dot(b, &cand);
                    for (x, &y) in cand.iter_mut().zip(b) {
                        *x = *x - c * y;
                    }
                }
            }
            let nrm = norm2(&cand);
            if best.as_ref().is_none_or(|(bn, _)| nrm > *bn) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, mut cand) = best.expect("n > 0");
        for x in cand.iter_mut() {
            *x = *x / nrm;
        }
        vecs.push(cand);
    }

    let cols: Vec<Vec<T>> = vecs.into_iter().skip(start).collect();
    if cols.is_empty() {
        return DenseMatrix::from_vec_unchecked(n, 0, Vec::new());
    }
    DenseMatrix::from_vec_unchecked(n, count, cols.concat())
}
