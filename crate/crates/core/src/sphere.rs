//! The cubic height `f = ⅓ Tr X³` on the sphere of traceless Hermitian
//! matrices with `Tr X² = 1`.
//!
//! The gradient flow commutes with `X`, so eigenvectors stay put and only the
//! spectrum moves. Normalized spectral gaps obey a Volterra chain whose
//! partial sums `bᵢ` solve the logistic equation `db/dτ = b(b − 1)` in the
//! time `dτ = (λₙ − λ₁) dt`.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json::fmt_num;
use crate::linalg::{herm_eig, projector};
use crate::mat::Mat;
use crate::random::random_hermitian;
use crate::scalar::Field;
use crate::spaces::orthonormal_basis;
use crate::tolerances::Tolerances;

const SPHERE_TOL: f64 = 1e-10;

/// Real dimension of the sphere: `n − 2 + d·n(n−1)/2`.
pub fn sphere_dim(field: Field, n: usize) -> usize {
    assert!(n >= 2, "sphere needs n >= 2");
    n - 2 + field.dim() * n * (n - 1) / 2
}

/// Hermitian `X` with `Tr X = 0` and `Tr X² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint(Mat);

impl SpherePoint {
    pub fn new(x: Mat) -> Result<Self> {
        if !x.is_square() || x.rows() < 2 {
            return Err(Error::Dimension(format!("sphere point must be square with n >= 2, got {}x{}", x.rows(), x.cols())));
        }
        if !x.is_hermitian(Tolerances::default().hermitian) {
            return Err(Error::Precondition("sphere point is not Hermitian".into()));
        }
        let (tr, tr2) = constraint_residuals(&x);
        if tr > SPHERE_TOL || tr2 > SPHERE_TOL {
            return Err(Error::Precondition(format!("off the sphere: |Tr X| = {tr:.3e}, |Tr X² − 1| = {tr2:.3e}")));
        }
        Ok(SpherePoint(x.hermitian_part()))
    }

    /// Removes the trace and rescales to unit norm.
    pub fn project(x: &Mat) -> Result<Self> {
        if !x.is_square() || x.rows() < 2 {
            return Err(Error::Dimension(format!("sphere point must be square with n >= 2, got {}x{}", x.rows(), x.cols())));
        }
        Ok(SpherePoint(project_unchecked(&x.hermitian_part())?))
    }

    pub fn random(rng: &mut impl Rng, field: Field, n: usize) -> Self {
        loop {
            if let Ok(p) = SpherePoint::project(&random_hermitian(rng, field, n)) {
                return p;
            }
        }
    }

    pub fn mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn field(&self) -> Field {
        self.0.field()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(herm_eig(&self.0)?.values)
    }
}

/// `(|Tr X|, |Tr X² − 1|)`.
pub fn constraint_residuals(x: &Mat) -> (f64, f64) {
    (x.re_trace().abs(), (x.dot(x) - 1.0).abs())
}

fn project_unchecked(x: &Mat) -> Result<Mat> {
    let n = x.rows();
    let shift = x.re_trace() / n as f64;
    let y = x - &Mat::identity(x.field(), n).scale(shift);
    let norm = y.norm();
    if !(norm > 1e-12) {
        return Err(Error::Precondition("matrix is a multiple of the identity".into()));
    }
    Ok(y.scale(1.0 / norm))
}

pub fn f_cubic(x: &SpherePoint) -> f64 {
    cube_trace(x.mat()) / 3.0
}

fn cube_trace(x: &Mat) -> f64 {
    (x * x).dot(x)
}

/// `X² − (Tr X³) X − I/n`, the projection of `X²` onto the tangent space.
pub fn sphere_grad_rhs(x: &SpherePoint) -> Mat {
    rhs(x.mat())
}

fn rhs(x: &Mat) -> Mat {
    let n = x.rows();
    let x2 = x * x;
    let c = x2.dot(x);
    &(&x2 - &x.scale(c)) - &Mat::identity(x.field(), n).scale(1.0 / n as f64)
}

/// Eigenvalues `(−√((n−m)/(nm)), √(m/(n(n−m))))` taken on `V` and `V⊥`.
pub fn critical_eigenvalues(n: usize, m: usize) -> Result<(f64, f64)> {
    if m == 0 || m >= n {
        return Err(Error::OutOfRange(format!("critical subspace dimension {m} not in 1..{n}")));
    }
    let (n, m) = (n as f64, m as f64);
    Ok((-((n - m) / (n * m)).sqrt(), (m / (n * (n - m))).sqrt()))
}

/// The critical point attached to `span(z)`.
pub fn critical_matrix(z: &Mat) -> Result<SpherePoint> {
    let n = z.rows();
    let (lo, hi) = critical_eigenvalues(n, z.cols())?;
    let q = orthonormal_basis(z)?;
    let p = projector(&q);
    let id = Mat::identity(z.field(), n);
    Ok(SpherePoint((&p.scale(lo) + &(&id - &p).scale(hi)).hermitian_part()))
}

/// Nested eigenspaces of `X`, grouped into clusters of nearly equal
/// eigenvalues and ordered by increasing eigenvalue.
#[derive(Clone, Debug)]
pub struct Eigenflag {
    /// Ascending eigenvalues, one per column of the stacked blocks.
    pub values: Vec<f64>,
    /// Orthonormal basis of each cluster's eigenspace.
    pub blocks: Vec<Mat>,
}

impl Eigenflag {
    /// `dim U₁ < dim U₂ < … < n`.
    pub fn dims(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                *acc += b.cols();
                Some(*acc)
            })
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.blocks.len() == self.values.len()
    }

    /// Orthonormal basis of `U_k = V₁ ⊕ … ⊕ V_k`, `k` counted from 1.
    pub fn subspace(&self, k: usize) -> Mat {
        assert!(k >= 1 && k <= self.blocks.len(), "flag has {} steps", self.blocks.len());
        self.blocks[1..k].iter().fold(self.blocks[0].clone(), |acc, b| acc.hstack(b))
    }

    /// Projectors onto the proper subspaces `U_1 … U_{k−1}`.
    pub fn projectors(&self) -> Vec<Mat> {
        (1..self.blocks.len()).map(|k| projector(&self.subspace(k))).collect()
    }

    fn basis(&self) -> Mat {
        self.subspace(self.blocks.len())
    }
}

/// Eigenflag with clusters split where consecutive eigenvalues differ by more
/// than `tol`.
pub fn eigenflag(x: &SpherePoint, tol: f64) -> Result<Eigenflag> {
    let eig = herm_eig(x.mat())?;
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=eig.values.len() {
        if i == eig.values.len() || eig.values[i] - eig.values[i - 1] > tol {
            blocks.push(eig.vectors.columns(start..i));
            start = i;
        }
    }
    Ok(Eigenflag { values: eig.values, blocks })
}

/// `aᵢ = (λᵢ₊₁ − λᵢ)/(λₙ − λ₁)` for ascending `λ`.
pub fn barycentric_from_values(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Dimension("need at least two eigenvalues".into()));
    }
    let width = values[n - 1] - values[0];
    if !(width > 0.0) {
        return Err(Error::Precondition("spectrum has zero width".into()));
    }
    Ok(values.windows(2).map(|w| ((w[1] - w[0]) / width).max(0.0)).collect())
}

pub fn barycentric(x: &SpherePoint) -> Result<Vec<f64>> {
    barycentric_from_values(&x.eigenvalues()?)
}

/// Inverse of [`barycentric_from_values`] on the sphere: the unique ascending
/// spectrum with the given gaps, zero sum and unit sum of squares.
pub fn values_from_barycentric(a: &[f64]) -> Result<Vec<f64>> {
    check_simplex(a)?;
    let b = partial_sums(a);
    let offsets: Vec<f64> = std::iter::once(0.0).chain(b).collect();
    let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
    let centered: Vec<f64> = offsets.iter().map(|o| o - mean).collect();
    let norm = centered.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(centered.iter().map(|c| c / norm).collect())
}

fn check_simplex(a: &[f64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Dimension("barycentric coordinates are empty".into()));
    }
    if a.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::Precondition("barycentric coordinates must be nonnegative".into()));
    }
    let s: f64 = a.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("barycentric coordinates sum to {s}")));
    }
    Ok(())
}

/// `bᵢ = a₁ + … + aᵢ`.
pub fn partial_sums(a: &[f64]) -> Vec<f64> {
    a.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// `aᵢ = bᵢ − bᵢ₋₁` with `b₀ = 0`.
pub fn differences(b: &[f64]) -> Vec<f64> {
    b.iter().enumerate().map(|(i, &x)| if i == 0 { x } else { x - b[i - 1] }).collect()
}

/// Flag-join coordinates of `X`: its eigenflag and its point on the flag's
/// simplex.
pub fn flag_join_coords(x: &SpherePoint) -> Result<(Eigenflag, Vec<f64>)> {
    let flag = eigenflag(x, Tolerances::default().eig_cluster)?;
    let a = barycentric_from_values(&flag.values)?;
    Ok((flag, a))
}

/// Rebuilds `X` from flag-join coordinates.
pub fn reconstruct(flag: &Eigenflag, a: &[f64]) -> Result<SpherePoint> {
    let v = flag.basis();
    if a.len() + 1 != v.cols() {
        return Err(Error::Dimension(format!("{} coordinates for a flag in dimension {}", a.len(), v.cols())));
    }
    let values = values_from_barycentric(a)?;
    let x = &v.scale_cols(&values) * &v.conj_transpose();
    Ok(SpherePoint(x.hermitian_part()))
}

/// `λ̇ᵢ = λᵢ² − (Σλ³) λᵢ − 1/n`.
pub fn eigenvalue_rhs(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let c: f64 = values.iter().map(|l| l * l * l).sum();
    values.iter().map(|l| l * l - c * l - 1.0 / n).collect()
}

/// `daᵢ/dτ = aᵢ (Σ_{k<i} a_k − Σ_{k>i} a_k)`.
pub fn volterra_rhs(a: &[f64]) -> Result<Vec<f64>> {
    check_simplex(a)?;
    let total: f64 = a.iter().sum();
    let mut below = 0.0;
    Ok(a.iter()
        .map(|&ai| {
            let above = total - below - ai;
            let r = ai * (below - above);
            below += ai;
            r
        })
        .collect())
}

/// `bᵢ(τ) = 1/(1 − cᵢ e^τ)` with `cᵢ = 1 − 1/bᵢ(0)`. The faces `bᵢ = 0` and
/// `bᵢ = 1` are fixed.
pub fn closed_form_b(b0: &[f64], tau: f64) -> Result<Vec<f64>> {
    if b0.is_empty() {
        return Err(Error::Dimension("empty b".into()));
    }
    if b0.iter().any(|&b| !(0.0..=1.0).contains(&b)) {
        return Err(Error::Precondition("b values must lie in [0, 1]".into()));
    }
    if b0.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("b values must be nondecreasing".into()));
    }
    if (b0[b0.len() - 1] - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition("last b value must be 1".into()));
    }
    Ok(b0
        .iter()
        .map(|&b| {
            if b == 0.0 || b == 1.0 {
                b
            } else {
                let c = 1.0 - 1.0 / b;
                1.0 / (1.0 - c * tau.exp())
            }
        })
        .collect())
}

/// Cross ratio `(λᵢ−λₖ)(λⱼ−λₗ) / ((λⱼ−λₖ)(λᵢ−λₗ))`.
pub fn cross_ratio(values: &[f64], i: usize, j: usize, k: usize, l: usize) -> f64 {
    let v = values;
    (v[i] - v[k]) * (v[j] - v[l]) / ((v[j] - v[k]) * (v[i] - v[l]))
}

/// Samples of a sphere-flow trajectory, one per step including `t = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct SphereTrajectory {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub points: Vec<SpherePoint>,
    pub eigenvalues: Vec<Vec<f64>>,
    pub f: Vec<f64>,
}

/// RK4 for the gradient flow of `f`, restoring both constraints after each
/// step.
pub fn integrate_sphere_flow(x0: &SpherePoint, t: f64, steps: usize) -> Result<SphereTrajectory> {
    if steps == 0 {
        return Err(Error::OutOfRange("steps must be at least 1".into()));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::OutOfRange(format!("time {t} must be finite and nonnegative")));
    }
    let h = t / steps as f64;
    let mut x = x0.mat().clone();
    let mut traj = SphereTrajectory { times: Vec::new(), points: Vec::new(), eigenvalues: Vec::new(), f: Vec::new() };
    for s in 0..=steps {
        if s > 0 {
            let k1 = rhs(&x);
            let k2 = rhs(&(&x + &k1.scale(h / 2.0)));
            let k3 = rhs(&(&x + &k2.scale(h / 2.0)));
            let k4 = rhs(&(&x + &k3.scale(h)));
            let incr = &(&k1 + &k2.scale(2.0)) + &(&k3.scale(2.0) + &k4);
            x = project_unchecked(&(&x + &incr.scale(h / 6.0)).hermitian_part())?;
        }
        let p = SpherePoint(x.clone());
        traj.times.push(s as f64 * h);
        traj.eigenvalues.push(p.eigenvalues()?);
        traj.f.push(f_cubic(&p));
        traj.points.push(p);
    }
    Ok(traj)
}

/// Cumulative trapezoid integral of `λₙ − λ₁` along the trajectory.
pub fn time_reparam(traj: &SphereTrajectory) -> Vec<f64> {
    let width = |v: &Vec<f64>| v[v.len() - 1] - v[0];
    let mut tau = vec![0.0];
    for i in 1..traj.times.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        let step = 0.5 * dt * (width(&traj.eigenvalues[i]) + width(&traj.eigenvalues[i - 1]));
        tau.push(tau[i - 1] + step);
    }
    tau
}

impl SphereTrajectory {
    /// Columns `t, tau, lambda_1..lambda_n, a_1..a_{n-1}, f`.
    pub fn to_csv(&self) -> Result<String> {
        let n = self.eigenvalues.first().map_or(0, Vec::len);
        let mut out = String::from("t,tau");
        for i in 1..=n {
            write!(out, ",lambda_{i}").unwrap();
        }
        for i in 1..n {
            write!(out, ",a_{i}").unwrap();
        }
        out.push_str(",f\n");
        let tau = time_reparam(self);
        for (i, values) in self.eigenvalues.iter().enumerate() {
            let a = barycentric_from_values(values)?;
            let row: Vec<String> = [self.times[i], tau[i]]
                .iter()
                .chain(values)
                .chain(&a)
                .chain(std::iter::once(&self.f[i]))
                .map(|&v| fmt_num(v))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// Matches a spectrum against the critical spectra: returns `m` when the
/// first `m` eigenvalues sit at the lower critical value and the rest at the
/// upper one, both within `tol`.
pub fn critical_dimension(values: &[f64], tol: f64) -> Option<usize> {
    let n = values.len();
    (1..n).find(|&m| {
        let (lo, hi) = critical_eigenvalues(n, m).unwrap();
        values[..m].iter().all(|v| (v - lo).abs() <= tol) && values[m..].iter().all(|v| (v - hi).abs() <= tol)
    })
}
