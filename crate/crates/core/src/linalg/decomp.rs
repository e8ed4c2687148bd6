use super::matrix::{norm2, DenseMatrix};
use super::svd::{orthonormal_completion, thin_svd, SvdResult};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Relative singular-value cutoff used to decide numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Unitary polar factor `U Vᵀ` of `X = U Σ Vᵀ`: a nearest point of the
/// Stiefel manifold in every unitarily invariant norm.
///
/// For rank-deficient input the completed left vectors of the SVD are used,
/// which gives one of the (then non-unique) minimisers.
pub fn polar_factor<T: Scalar>(x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let svd = thin_svd(x)?;
    Ok(polar_from_svd(&svd))
}

pub fn polar_from_svd<T: Scalar>(svd: &SvdResult<T>) -> DenseMatrix<T> {
    svd.left.matmul(&svd.right.transpose())
}

pub fn singular_values<T: Scalar>(x: &DenseMatrix<T>) -> Result<Vec<T>> {
    Ok(thin_svd(x)?.singular)
}

/// `‖σ(X) − 1‖₂`, the Frobenius distance from `X` to the Stiefel manifold.
pub fn sigma_gap<T: Scalar>(x: &DenseMatrix<T>) -> Result<T> {
    let s = singular_values(x)?;
    Ok(sigma_gap_of(&s))
}

pub(crate) fn sigma_gap_of<T: Scalar>(singular: &[T]) -> T {
    let d: Vec<T> = singular.iter().map(|&s| s - T::one()).collect();
    norm2(&d)
}

/// Largest singular value. Accepts wide matrices by transposing.
pub fn spectral_norm<T: Scalar>(x: &DenseMatrix<T>) -> Result<T> {
    let s = if x.cols() > x.rows() {
        singular_values(&x.transpose())?
    } else {
        singular_values(x)?
    };
    Ok(s.first().copied().unwrap_or_else(T::zero))
}

/// Orthonormal basis `V ∈ St^{n,k}` of the orthogonal complement of
/// `range(Y1)`, with `k = n − rank(Y1)`.
pub fn orth_complement_basis<T: Scalar>(y1: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let (n, r1) = y1.shape();
    if r1 >= n {
        return invalid(format!(
            "orth_complement_basis needs fewer columns than rows, got {n}x{r1}"
        ));
    }
    let svd = thin_svd(y1)?;
    let rank = svd.rank(T::lit(RANK_TOL));
    let range = if rank == 0 { None } else { Some(svd.left.columns(0..rank)) };
    Ok(orthonormal_completion(n, range.as_ref(), n - rank))
}

/// Solves the square system `A x = b` by LU with partial pivoting.
pub(crate) fn solve_linear<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return invalid("solve_linear needs a square system");
    }
    let mut m: Vec<Vec<T>> = (0..n).map(|i| a.row(i)).collect();
    let mut rhs = b.to_vec();
    let scale = a.max_abs().max(T::min_positive_value());
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, m[i][k].abs()))
            .fold((k, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax <= scale * T::epsilon() {
            return invalid("singular linear system");
        }
        m.swap(k, piv);
        rhs.swap(k, piv);
        for i in (k + 1)..n {
            let f = m[i][k] / m[k][k];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let v = m[k][j];
                m[i][j] = m[i][j] - f * v;
            }
            rhs[i] = rhs[i] - f * rhs[k];
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let s = ((k + 1)..n).fold(rhs[k], |acc, j| acc - m[k][j] * x[j]);
        x[k] = s / m[k][k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_of_orthonormal_is_itself() {
        let s = 0.5f64.sqrt();
        let x = DenseMatrix::from_rows(&[[s, 0.0], [s, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let u = polar_factor(&x).unwrap();
        assert!((&u - &x).frobenius_norm() < 1e-14);
    }

    #[test]
    fn polar_of_positive_scaling() {
        let x = DenseMatrix::<f64>::identity(3, 3).scale(2.0);
        let u = polar_factor(&x).unwrap();
        assert!((&u - &DenseMatrix::identity(3, 3)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn sigma_gap_of_scaled_embedding() {
        // 2·[I₂; 0] has singular values (2, 2): gap (2−1)·√2.
        let x = DenseMatrix::<f64>::identity(4, 2).scale(2.0);
        assert!((sigma_gap(&x).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let x = DenseMatrix::from_diagonal(&[3.0, 1.0]);
        assert_eq!(spectral_norm(&x).unwrap(), 3.0);
        assert_eq!(spectral_norm(&DenseMatrix::<f64>::identity(4, 4)).unwrap(), 1.0);
    }

    #[test]
    fn complement_of_first_axis() {
        let y = DenseMatrix::from_rows(&[[1.0], [0.0], [0.0]]).unwrap();
        let v = orth_complement_basis(&y).unwrap();
        assert_eq!(v.shape(), (3, 2));
        assert!(y.tr_matmul(&v).frobenius_norm() < 1e-15);
        assert!((&v.gram() - &DenseMatrix::identity(2, 2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn complement_of_zero_is_everything() {
        let v = orth_complement_basis(&DenseMatrix::<f64>::zeros(3, 1)).unwrap();
        assert_eq!(v.shape(), (3, 3));
        assert!((&v.gram() - &DenseMatrix::identity(3, 3)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn complement_rejects_square() {
        assert!(orth_complement_basis(&DenseMatrix::<f64>::identity(3, 3)).is_err());
    }

    #[test]
    fn lu_solves_small_system() {
        let a = DenseMatrix::from_rows(&[[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]]).unwrap();
        let x = solve_linear(&a, &[5.0, 3.0, 6.0]).unwrap();
        for (got, want) in x.iter().zip([1.4f64, 1.6, 1.8]) {
            assert!((got - want).abs() < 1e-13);
        }
        let sing = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(solve_linear(&sing, &[1.0, 1.0]).is_err());
    }
}
