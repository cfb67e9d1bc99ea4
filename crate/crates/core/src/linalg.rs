//! Spectral decompositions and matrix functions.
//!
//! Both decompositions are Jacobi methods carried out directly in quaternion
//! arithmetic. A Jacobi step first rotates the phase of one column so that the
//! pivot becomes real, then applies a real Givens rotation; real scalars
//! commute with everything, so the classical real formulas apply unchanged.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::{Field, Quat};
use crate::tolerances::Tolerances;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix, `S = V diag(λ) V*`.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Nondecreasing eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: Mat,
}

impl HermEig {
    /// `V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Mat {
        let d: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        &self.vectors.scale_cols(&d) * &self.vectors.conj_transpose()
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> Mat {
        self.apply(|l| l)
    }
}

/// Hermitian eigensolver with the default Hermitian tolerance.
pub fn herm_eig(s: &Mat) -> Result<HermEig> {
    herm_eig_with(s, Tolerances::default().hermitian)
}

/// Cyclic Jacobi eigensolver. `tol` bounds `‖S − S*‖` relative to `max(1, ‖S‖)`.
pub fn herm_eig_with(s: &Mat, tol: f64) -> Result<HermEig> {
    if !s.is_square() {
        return Err(Error::Dimension(format!("eigensolver needs a square matrix, got {}x{}", s.rows(), s.cols())));
    }
    if !s.is_finite() {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    if !s.is_hermitian(tol) {
        return Err(Error::Precondition(format!(
            "matrix is not Hermitian (defect {:.3e})",
            s.hermitian_defect()
        )));
    }
    let n = s.rows();
    let mut a = s.hermitian_part();
    let mut v = Mat::identity(s.field(), n);
    let total = a.norm();
    if total == 0.0 || n == 1 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(HermEig { values, vectors: v });
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= 1e-12 * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let h = a[(p, q)];
                let g = h.abs();
                if g <= 1e-300 || g <= 1e-18 * total {
                    continue;
                }
                let d = h.conj().scale(1.0 / g);
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let theta = (beta - alpha) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                rotate_cols(&mut a, p, q, d, c, sn);
                rotate_rows(&mut a, p, q, d.conj(), c, sn);
                rotate_cols(&mut v, p, q, d, c, sn);
                a[(p, q)] = Quat::ZERO;
                a[(q, p)] = Quat::ZERO;
                a[(p, p)] = Quat::real(alpha - t * g);
                a[(q, q)] = Quat::real(beta + t * g);
            }
        }
    }
    if !converged && off_norm(&a) > 1e-12 * total {
        return Err(Error::NoConvergence(format!("Jacobi eigensolver after {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    Ok(HermEig { values, vectors: v.columns(order) })
}

fn off_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Column `q` is first multiplied on the right by `d`, then columns `p, q`
/// undergo the real rotation `[[c, s], [−s, c]]`.
fn rotate_cols(m: &mut Mat, p: usize, q: usize, d: Quat, c: f64, s: f64) {
    for r in 0..m.rows() {
        let xp = m[(r, p)];
        let xq = m[(r, q)] * d;
        m[(r, p)] = xp.scale(c) - xq.scale(s);
        m[(r, q)] = xp.scale(s) + xq.scale(c);
    }
}

/// Adjoint of [`rotate_cols`] acting on rows; `dl` is the left phase.
fn rotate_rows(m: &mut Mat, p: usize, q: usize, dl: Quat, c: f64, s: f64) {
    for r in 0..m.cols() {
        let yp = m[(p, r)];
        let yq = dl * m[(q, r)];
        m[(p, r)] = yp.scale(c) - yq.scale(s);
        m[(q, r)] = yp.scale(s) + yq.scale(c);
    }
}

/// Thin singular value decomposition `A = U Σ V*` of a matrix with at least
/// as many rows as columns. Singular values are nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: Mat,
    pub v: Mat,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(a: &Mat) -> Result<Svd> {
    if a.rows() < a.cols() {
        return Err(Error::Dimension(format!("svd expects rows >= cols, got {}x{}", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    let n = a.cols();
    let mut w = a.clone();
    let mut v = Mat::identity(a.field(), n);
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, g) = col_gram(&w, p, q);
                let gamma = g.abs();
                if gamma <= 1e-15 * (alpha * beta).sqrt() || gamma <= 1e-300 {
                    continue;
                }
                rotated = true;
                let d = g.conj().scale(1.0 / gamma);
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate_cols(&mut w, p, q, d, c, s);
                rotate_cols(&mut v, p, q, d, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence(format!("Jacobi SVD after {MAX_SWEEPS} sweeps")));
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let inv: Vec<f64> = sigma.iter().map(|&s| if s > 0.0 { 1.0 / s } else { 0.0 }).collect();
    let u = w.columns(order.iter().copied()).scale_cols(&inv);
    Ok(Svd { sigma, u, v: v.columns(order) })
}

fn col_gram(w: &Mat, p: usize, q: usize) -> (f64, f64, Quat) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut g = Quat::ZERO;
    for r in 0..w.rows() {
        let x = w[(r, p)];
        let y = w[(r, q)];
        alpha += x.norm_sqr();
        beta += y.norm_sqr();
        g += x.conj() * y;
    }
    (alpha, beta, g)
}

/// Singular values of any matrix, nonincreasing.
pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    if a.rows() >= a.cols() {
        Ok(svd(a)?.sigma)
    } else {
        Ok(svd(&a.conj_transpose())?.sigma)
    }
}

/// Smallest singular value of a square matrix.
pub fn sigma_min(a: &Mat) -> Result<f64> {
    Ok(singular_values(a)?.last().copied().unwrap_or(0.0))
}

/// Hyperbolic and exponential matrix functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatFn {
    Exp,
    Sinh,
    Cosh,
    Tanh,
}

impl MatFn {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            MatFn::Exp => x.exp(),
            MatFn::Sinh => x.sinh(),
            MatFn::Cosh => x.cosh(),
            MatFn::Tanh => x.tanh(),
        }
    }
}

/// `f(A t)` for Hermitian `A`, via one eigendecomposition.
pub fn mat_func(a: &Mat, t: f64, kind: MatFn) -> Result<Mat> {
    let eig = herm_eig(a)?;
    Ok(eig.apply(|l| kind.eval(l * t)))
}

/// Matrix exponential of an arbitrary square matrix (Taylor with scaling and
/// squaring).
pub fn expm(b: &Mat) -> Mat {
    assert!(b.is_square(), "expm: square matrix required");
    let norm = b.norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = b.scale(0.5f64.powi(squarings as i32));
    let mut e = &Mat::identity(b.field(), b.rows()) + &exp_minus_identity_small(&scaled);
    for _ in 0..squarings {
        e = &e * &e;
    }
    e
}

/// `exp(B) − I`, accurate when `B` is small.
pub fn exp_minus_identity(b: &Mat) -> Mat {
    if b.norm() <= 0.5 {
        exp_minus_identity_small(b)
    } else {
        &expm(b) - &Mat::identity(b.field(), b.rows())
    }
}

fn exp_minus_identity_small(b: &Mat) -> Mat {
    let mut term = b.clone();
    let mut sum = b.clone();
    for k in 2..40 {
        term = (&term * b).scale(1.0 / k as f64);
        let tn = term.norm();
        sum += &term;
        if tn <= 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Cayley transform `(I − X)(I + X)⁻¹` with the default threshold on `σ_min(I + X)`.
pub fn cayley(x: &Mat) -> Result<Mat> {
    cayley_with(x, Tolerances::default().cayley_sigma)
}

pub fn cayley_with(x: &Mat, min_sigma: f64) -> Result<Mat> {
    if !x.is_square() {
        return Err(Error::Dimension(format!("cayley transform of a {}x{} matrix", x.rows(), x.cols())));
    }
    let id = Mat::identity(x.field(), x.rows());
    let plus = &id + x;
    let s = sigma_min(&plus)?;
    if s <= min_sigma {
        return Err(Error::Singular(format!("I + X has smallest singular value {s:.3e}")));
    }
    (&id - x).right_divide(&plus)
}

/// Modified Gram–Schmidt (two passes) on the columns of `z`.
///
/// Fails when a column loses more than all but `1e-10` of its norm, i.e. when
/// `z` is numerically rank deficient.
pub fn orthonormalize(z: &Mat) -> Result<Mat> {
    let (n, m) = z.shape();
    let mut q = z.clone();
    for j in 0..m {
        let original = column_norm(&q, j);
        for _pass in 0..2 {
            for i in 0..j {
                let mut r = Quat::ZERO;
                for row in 0..n {
                    r += q[(row, i)].conj() * q[(row, j)];
                }
                for row in 0..n {
                    let qi = q[(row, i)];
                    q[(row, j)] -= qi * r;
                }
            }
        }
        let nrm = column_norm(&q, j);
        if nrm <= 1e-10 * original.max(1e-300) || nrm == 0.0 {
            return Err(Error::Precondition(format!("columns are linearly dependent at column {j}")));
        }
        for row in 0..n {
            q[(row, j)] = q[(row, j)].scale(1.0 / nrm);
        }
    }
    Ok(q)
}

fn column_norm(m: &Mat, j: usize) -> f64 {
    (0..m.rows()).map(|r| m[(r, j)].norm_sqr()).sum::<f64>().sqrt()
}

/// Nearest unitary matrix `X (X*X)^{-1/2}`.
pub fn unitary_factor(x: &Mat) -> Result<Mat> {
    let g = (&x.conj_transpose() * x).hermitian_part();
    let eig = herm_eig(&g)?;
    if eig.values[0] <= 1e-24 * eig.values.last().copied().unwrap_or(1.0).max(1e-300) {
        return Err(Error::Singular("matrix is rank deficient".into()));
    }
    Ok(x * &eig.apply(|l| 1.0 / l.sqrt()))
}

/// Orthogonal projector onto the column span of an orthonormal `q`.
pub fn projector(q: &Mat) -> Mat {
    q * &q.conj_transpose()
}

/// Orthonormal basis of `{v : M v = 0}` for square `m`, from right singular
/// vectors with `σ ≤ tol`.
pub fn null_space(m: &Mat, tol: f64) -> Result<Mat> {
    let s = svd(m)?;
    let idx: Vec<usize> = (0..s.sigma.len()).filter(|&k| s.sigma[k] <= tol).collect();
    Ok(s.v.columns(idx))
}

/// `a` promoted to `field` when it is a smaller field, otherwise cloned.
pub fn lift(a: &Mat, field: Field) -> Mat {
    if a.field() < field {
        a.promote(field)
    } else {
        a.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(field: Field, n: usize, salt: f64) -> Mat {
        Mat::from_fn(field, n, n, |i, j| {
            let s = (i * n + j) as f64 + salt;
            let q = Quat::new((1.1 * s).sin(), (0.3 * s).cos(), (2.1 * s).sin(), (0.9 * s + 0.2).cos());
            match field {
                Field::R => Quat::real(q.re),
                Field::C => Quat::complex(q.re, q.i),
                Field::H => q,
            }
        })
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let e = herm_eig(&Mat::diag_real(Field::R, &[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix_eigenvalues() {
        let e = herm_eig(&Mat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quaternion_eigen_reconstruction() {
        for n in 1..7 {
            let b = sample(Field::H, n, n as f64);
            let s = (&b + &b.conj_transpose()).scale(0.5);
            let e = herm_eig(&s).unwrap();
            assert!((&e.reconstruct() - &s).norm() < 1e-12 * s.norm().max(1.0));
            assert!(e.vectors.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(herm_eig(&m), Err(Error::Precondition(_))));
    }

    #[test]
    fn svd_reconstructs() {
        for field in [Field::R, Field::C, Field::H] {
            let a = sample(field, 5, 0.7);
            let s = svd(&a).unwrap();
            let rec = &s.u.scale_cols(&s.sigma) * &s.v.conj_transpose();
            assert!((&rec - &a).norm() < 1e-12 * a.norm());
            assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_detects_rank_deficiency() {
        let m = Mat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0], &[0.0, 0.0]]);
        let s = singular_values(&m).unwrap();
        assert!(s[1] < 1e-14);
        let wide = m.conj_transpose();
        assert_eq!(singular_values(&wide).unwrap().len(), 2);
    }

    #[test]
    fn expm_of_skew_is_rotation() {
        let b = Mat::from_rows(&[&[0.0, -0.7], &[0.7, 0.0]]);
        let r = expm(&b);
        assert!((r[(0, 0)].re - 0.7f64.cos()).abs() < 1e-14);
        assert!((r[(1, 0)].re - 0.7f64.sin()).abs() < 1e-14);
        let big = b.scale(20.0);
        assert!(expm(&big).unitarity_defect() < 1e-12);
    }

    #[test]
    fn exp_minus_identity_small_argument() {
        let b = Mat::diag_real(Field::R, &[1e-9, -2e-9]);
        let e = exp_minus_identity(&b);
        assert!((e[(0, 0)].re - 1e-9f64.exp_m1()).abs() < 1e-24);
    }

    #[test]
    fn cayley_basics() {
        let id = Mat::identity(Field::R, 3);
        assert!(cayley(&id).unwrap().norm() == 0.0);
        assert_eq!(cayley(&Mat::zeros(Field::R, 3, 3)).unwrap(), id);
        assert!(matches!(cayley(&id.scale(-1.0)), Err(Error::Singular(_))));
    }

    #[test]
    fn gram_schmidt_quaternion() {
        let z = sample(Field::H, 4, 2.0).columns(0..2);
        let q = orthonormalize(&z).unwrap();
        assert!(q.unitarity_defect() < 1e-14);
        let p1 = projector(&q);
        let dup = z.hstack(&z.column(0));
        assert!(orthonormalize(&dup).is_err());
        // the span is preserved
        assert!((&(&p1 * &z) - &z).norm() < 1e-12);
    }
}
