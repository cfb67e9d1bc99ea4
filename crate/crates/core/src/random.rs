//! Seeded random matrices.
//!
//! All generators draw from a ChaCha8 stream seeded with a `u64`, so every
//! result is reproducible bit-for-bit across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::group_flow::GroupSpec;
use crate::linalg::orthonormalize;
use crate::mat::Mat;
use crate::scalar::{Field, Quat};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A scalar whose active components are independent standard normals.
pub fn gaussian_scalar(rng: &mut impl Rng, field: Field) -> Quat {
    let mut c = [0.0; 4];
    for v in c.iter_mut().take(field.dim()) {
        *v = rng.sample(StandardNormal);
    }
    Quat::from_array(c)
}

pub fn gaussian(rng: &mut impl Rng, field: Field, rows: usize, cols: usize) -> Mat {
    let mut m = Mat::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian_scalar(rng, field);
        }
    }
    m
}

/// Haar-distributed element of O(n), U(n) or Sp(n) according to `field`.
///
/// Gram–Schmidt of a Gaussian matrix is QR with a positive real diagonal in
/// `R`, which makes `Q` Haar distributed.
pub fn haar(rng: &mut impl Rng, field: Field, n: usize) -> Mat {
    loop {
        let g = gaussian(rng, field, n, n);
        if let Ok(q) = orthonormalize(&g) {
            return q;
        }
    }
}

/// Orthonormal basis of a uniformly random `m`-dimensional subspace of `kⁿ`.
pub fn random_subspace(rng: &mut impl Rng, field: Field, n: usize, m: usize) -> Mat {
    loop {
        let g = gaussian(rng, field, n, m);
        if let Ok(q) = orthonormalize(&g) {
            return q;
        }
    }
}

/// Hermitian matrix `(G + G*)/2` with Gaussian `G`.
pub fn random_hermitian(rng: &mut impl Rng, field: Field, n: usize) -> Mat {
    gaussian(rng, field, n, n).hermitian_part()
}

/// Diagonal with distinct positive increasing entries drawn from `[0.5, 3]`.
pub fn random_morse_diagonal(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
        d.sort_by(f64::total_cmp);
        if d.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return d;
        }
    }
}

/// Deterministic group element for `(spec, seed)`.
pub fn random_element(spec: GroupSpec, seed: u64) -> Mat {
    haar(&mut rng(seed), spec.field(), spec.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_flow::Family;

    #[test]
    fn orthogonal_membership() {
        let x = random_element(GroupSpec::new(Family::O, 3), 1);
        assert_eq!(x.field(), Field::R);
        assert!((&(&x.transpose() * &x) - &Mat::identity(Field::R, 3)).norm() < 1e-10);
    }

    #[test]
    fn unitary_determinant_modulus() {
        let x = random_element(GroupSpec::new(Family::U, 2), 7);
        let det = x[(0, 0)] * x[(1, 1)] - x[(0, 1)] * x[(1, 0)];
        assert!((det.abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = GroupSpec::new(Family::Sp, 3);
        assert_eq!(random_element(spec, 11), random_element(spec, 11));
        assert_ne!(random_element(spec, 11), random_element(spec, 12));
    }
}
