//! Seeded random matrices.
//!
//! Every generator takes a `ChaCha8Rng`, so a `u64` seed reproduces a draw on
//! any platform. Per-sample seeds are derived with SplitMix64.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::linalg::{orth_complement_basis, polar_factor, DenseMatrix};
use crate::manifold::{sign_reduce, SignPattern};
use crate::scalar::Scalar;

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One SplitMix64 step; used to derive independent child seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for item `index` of a stream rooted at `seed`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

pub fn uniform_matrix<T: Scalar>(rng: &mut SampleRng, rows: usize, cols: usize, lo: f64, hi: f64) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| T::lit(rng.random_range(lo..=hi)))
}

pub fn gaussian_matrix<T: Scalar>(rng: &mut SampleRng, rows: usize, cols: usize) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let g: f64 = StandardNormal.sample(rng);
        T::lit(g)
    })
}

/// Polar factor of a Gaussian matrix: Haar-distributed on `St^{n,r}`.
pub fn random_stiefel<T: Scalar>(rng: &mut SampleRng, n: usize, r: usize) -> Result<DenseMatrix<T>> {
    polar_factor(&gaussian_matrix(rng, n, r))
}

/// Random point of `St^{n,r}_+`: each column gets at least one private row,
/// every other row joins a random column or stays empty, entries are
/// uniform in `(0, 1]` before normalisation.
pub fn random_nonneg_stiefel<T: Scalar>(rng: &mut SampleRng, n: usize, r: usize) -> DenseMatrix<T> {
    assert!(r <= n, "need r <= n");
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(rng);
    let mut owner = vec![None; n];
    for (j, &i) in rows.iter().take(r).enumerate() {
        owner[i] = Some(j);
    }
    for &i in rows.iter().skip(r) {
        if rng.random_bool(0.5) {
            owner[i] = Some(rng.random_range(0..r));
        }
    }
    let mut m = DenseMatrix::zeros(n, r);
    for (i, o) in owner.iter().enumerate() {
        if let Some(j) = *o {
            m.set(i, j, T::lit(1.0 - rng.random::<f64>()));
        }
    }
    for j in 0..r {
        let nrm = crate::linalg::norm2(m.column(j));
        for i in 0..n {
            let v = m.get(i, j) / nrm;
            m.set(i, j, v);
        }
    }
    m
}

/// Random point of `St^{n,r}_S`.
pub fn random_sign_stiefel<T: Scalar>(
    rng: &mut SampleRng,
    n: usize,
    pattern: &SignPattern,
) -> Result<DenseMatrix<T>> {
    let r = pattern.r();
    let r1 = pattern.r1();
    let ybar = if r1 == 0 {
        random_stiefel(rng, n, r)?
    } else {
        let y1 = random_nonneg_stiefel::<T>(rng, n, r1);
        if r1 == r {
            y1
        } else {
            let v = orth_complement_basis(&y1)?;
            let g = gaussian_matrix(rng, v.cols(), r - r1);
            y1.hstack(&v.matmul(&polar_factor(&g)?))
        }
    };
    // Reduction only depends on the pattern, so any matrix of the right
    // shape provides the permutation and signs.
    let red = sign_reduce(&DenseMatrix::<T>::zeros(n, r), pattern)?;
    Ok(red.restore(&ybar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draw() {
        let a: DenseMatrix<f64> = gaussian_matrix(&mut rng_from_seed(3), 4, 2);
        let b: DenseMatrix<f64> = gaussian_matrix(&mut rng_from_seed(3), 4, 2);
        assert_eq!(a, b);
        assert_ne!(child_seed(3, 0), child_seed(3, 1));
    }

    #[test]
    fn random_feasible_points() {
        let mut rng = rng_from_seed(11);
        let s = SignPattern::new(3, &[0], &[1]).unwrap();
        for _ in 0..50 {
            let x: DenseMatrix<f64> = random_sign_stiefel(&mut rng, 5, &s).unwrap();
            assert!(s.admits(&x));
            assert!(x.gram_residual().frobenius_norm() < 1e-12);
        }
        let x: DenseMatrix<f64> = random_nonneg_stiefel(&mut rng, 4, 4);
        assert!(x.is_nonnegative());
        assert!(x.gram_residual().frobenius_norm() < 1e-14);
    }
}
