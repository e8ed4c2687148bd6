use crate::linalg::norm2;
use crate::scalar::Scalar;

/// Nearest point of the nonnegative part of the unit sphere.
///
/// If `x` has a positive entry this is `x₊/‖x₊‖`; otherwise the coordinate
/// vector at the largest entry (smallest index on ties).
pub fn project_nonneg_sphere<T: Scalar>(x: &[T]) -> Vec<T> {
    assert!(!x.is_empty(), "empty vector");
    let pos: Vec<T> = x.iter().map(|v| v.max(T::zero())).collect();
    let p = norm2(&pos);
    if p > T::zero() {
        return pos.into_iter().map(|v| v / p).collect();
    }
    let mut m = 0;
    for (i, &v) in x.iter().enumerate() {
        if v > x[m] {
            m = i;
        }
    }
    let mut e = vec![T::zero(); x.len()];
    e[m] = T::one();
    e
}

/// Distance from `x` to the nonnegative part of the unit sphere.
pub fn dist_nonneg_sphere<T: Scalar>(x: &[T]) -> T {
    let u = project_nonneg_sphere(x);
    let d: Vec<T> = x.iter().zip(&u).map(|(&a, &b)| a - b).collect();
    norm2(&d)
}
