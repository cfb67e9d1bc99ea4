//! Independent oracles for the integration tests. Everything here goes through
//! the real representation of a matrix and nalgebra, never through the
//! crate's own eigensolver or inverse.

#![allow(dead_code)]

use morseflow::{Field, Mat, Quat};
use nalgebra::DMatrix;

/// Real matrix of left multiplication by `q` on `(1, i, j, k)` coordinates,
/// truncated to the field.
fn left_mult(q: Quat, d: usize) -> [[f64; 4]; 4] {
    let [a, b, c, e] = q.to_array();
    let full = [[a, -b, -c, -e], [b, a, -e, c], [c, e, a, -b], [e, -c, b, a]];
    let mut out = [[0.0; 4]; 4];
    for r in 0..d {
        for s in 0..d {
            out[r][s] = full[r][s];
        }
    }
    out
}

pub fn real_rep(m: &Mat) -> DMatrix<f64> {
    let d = m.field().dim();
    let mut r = DMatrix::zeros(m.rows() * d, m.cols() * d);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let l = left_mult(m[(i, j)], d);
            for p in 0..d {
                for q in 0..d {
                    r[(i * d + p, j * d + q)] = l[p][q];
                }
            }
        }
    }
    r
}

pub fn from_real_rep(r: &DMatrix<f64>, field: Field) -> Mat {
    let d = field.dim();
    Mat::from_fn(field, r.nrows() / d, r.ncols() / d, |i, j| {
        let mut c = [0.0; 4];
        for p in 0..d {
            c[p] = r[(i * d + p, j * d)];
        }
        Quat::from_array(c)
    })
}

/// Eigenvalues of a Hermitian matrix, ascending. Each eigenvalue of the real
/// representation appears `d` times.
pub fn oracle_eigenvalues(m: &Mat) -> Vec<f64> {
    let d = m.field().dim();
    let mut v: Vec<f64> = real_rep(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(d).collect()
}

pub fn oracle_expm(m: &Mat) -> Mat {
    from_real_rep(&real_rep(m).exp(), m.field())
}

pub fn oracle_inverse(m: &Mat) -> Mat {
    from_real_rep(&real_rep(m).try_inverse().expect("invertible"), m.field())
}

/// Newton iteration `Q ← (Q + Q^{-*})/2` for the unitary polar factor, then
/// `J = A Q*` so that `A = J Q`.
pub fn newton_polar(a: &Mat) -> (Mat, Mat) {
    let r = real_rep(a);
    let mut q = r.clone();
    for _ in 0..100 {
        let inv_t = q.clone().try_inverse().expect("nondegenerate").transpose();
        let next = (&q + &inv_t) * 0.5;
        let done = (&next - &q).norm() < 1e-15 * next.norm();
        q = next;
        if done {
            break;
        }
    }
    let j = &r * q.transpose();
    (from_real_rep(&j, a.field()), from_real_rep(&q, a.field()))
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.data().iter().zip(b.data()).map(|(x, y)| (*x - *y).abs()).fold(0.0, f64::max)
}

/// Coefficients of the Gaussian binomial `[n, k]` in `t^step`, by summing
/// `t^(step·Σ(jᵢ − i))` over every `k`-subset `j₁ < … < j_k` of `1..=n`.
pub fn brute_gaussian_binomial(n: usize, k: usize, step: usize) -> Vec<u64> {
    let mut coeffs = vec![0u64; step * k * (n - k) + 1];
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let jumps: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        let dim: usize = jumps.iter().enumerate().map(|(i, j)| j - (i + 1)).sum();
        coeffs[step * dim] += 1;
    }
    coeffs
}

pub const FIELDS: [Field; 3] = [Field::R, Field::C, Field::H];
