//! Gradient flows of height functions `f_A(X) = Re Tr(AX)` on O(n), U(n), Sp(n).
//!
//! With the metric induced by `Re Tr(X*Y)` the ascent flow is
//! `Ẋ = A* − XAX`. Writing `X = P Q⁻¹` turns it into the linear system
//! `Ṗ = A*Q`, `Q̇ = AP`, which is what every closed form below evaluates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, mat_func, sigma_min, unitary_factor, HermEig, MatFn};
use crate::mat::Mat;
use crate::scalar::Field;
use crate::tolerances::Tolerances;

/// Largest `σ·Δt` allowed in one step of the stepped closed form.
const STEP_GROWTH: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    O,
    U,
    Sp,
}

impl Family {
    pub fn field(self) -> Field {
        match self {
            Family::O => Field::R,
            Family::U => Field::C,
            Family::Sp => Field::H,
        }
    }

    pub fn from_field(field: Field) -> Family {
        match field {
            Field::R => Family::O,
            Field::C => Family::U,
            Field::H => Family::Sp,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::O => "O",
            Family::U => "U",
            Family::Sp => "Sp",
        })
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "O" => Ok(Family::O),
            "U" => Ok(Family::U),
            "Sp" => Ok(Family::Sp),
            other => Err(format!("unknown group `{other}` (expected O, U or Sp)")),
        }
    }
}

/// One of the compact groups O(n), U(n), Sp(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
}

impl GroupSpec {
    pub fn new(family: Family, n: usize) -> Self {
        GroupSpec { family, n }
    }

    pub fn field(&self) -> Field {
        self.family.field()
    }

    /// Real dimension `Σ_{k=1}^n (dk − 1)`.
    pub fn dim(&self) -> usize {
        let d = self.field().dim();
        (1..=self.n).map(|k| d * k - 1).sum()
    }

    /// `‖X*X − I‖`, or infinity when `X` has the wrong shape or field.
    pub fn membership_residual(&self, x: &Mat) -> f64 {
        if x.shape() != (self.n, self.n) || x.tightened().field() > self.field() {
            return f64::INFINITY;
        }
        x.unitarity_defect()
    }

    pub fn contains(&self, x: &Mat, tol: f64) -> bool {
        self.membership_residual(x) <= tol
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.n)
    }
}

fn check_square_pair(a: &Mat, x: &Mat) -> Result<()> {
    if !a.is_square() || a.shape() != x.shape() {
        return Err(Error::Dimension(format!(
            "A is {}x{} but X is {}x{}",
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

fn check_unitary(x: &Mat, tol: f64) -> Result<()> {
    let r = x.unitarity_defect();
    if !(r <= tol) {
        return Err(Error::Precondition(format!("X is not in the group (residual {r:.3e})")));
    }
    Ok(())
}

fn check_hermitian(a: &Mat) -> Result<()> {
    if !a.is_hermitian(Tolerances::default().hermitian) {
        return Err(Error::Precondition(format!("A is not Hermitian (defect {:.3e})", a.hermitian_defect())));
    }
    Ok(())
}

/// `Re Tr(AX)`.
pub fn height(a: &Mat, x: &Mat) -> Result<f64> {
    if a.cols() != x.rows() || a.rows() != x.cols() {
        return Err(Error::Dimension(format!(
            "cannot pair {}x{} with {}x{}",
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols()
        )));
    }
    Ok((a * x).re_trace())
}

/// `A* − XAX`, the ascent direction of `f_A` at `X ∈ G`.
pub fn grad_rhs(a: &Mat, x: &Mat) -> Result<Mat> {
    grad_rhs_with(a, x, Tolerances::default().membership)
}

pub fn grad_rhs_with(a: &Mat, x: &Mat, membership_tol: f64) -> Result<Mat> {
    check_square_pair(a, x)?;
    check_unitary(x, membership_tol)?;
    Ok(flow_field(a, x))
}

/// The vector field `A* − XAX` without the membership check.
pub fn flow_field(a: &Mat, x: &Mat) -> Mat {
    &a.conj_transpose() - &(&(x * a) * x)
}

fn step_count(t: f64, rate: f64) -> usize {
    let s = (t.abs() * rate / STEP_GROWTH).ceil();
    if s.is_finite() && s >= 1.0 {
        s as usize
    } else {
        1
    }
}

/// Solution of the flow for Hermitian `A` from `X0` at time `t`,
/// `(sinh(At) + cosh(At)X0)(cosh(At) + sinh(At)X0)⁻¹`.
///
/// The formula is evaluated in the eigenbasis of `A` by composing the same
/// map over short time steps, which keeps every hyperbolic function bounded
/// by `cosh(0.5)` no matter how large `t` is.
///
/// The group is invariant but not attracting for this map: near lower
/// critical points, rounding errors normal to the group grow like
/// `exp(2 max|λ| t)`. When `X0` lies in the group each step is therefore
/// followed by one Newton–Schulz polar correction, which removes the normal
/// error without moving points that are already on the group.
pub fn closed_flow(a: &Mat, x0: &Mat, t: f64) -> Result<Mat> {
    check_square_pair(a, x0)?;
    check_hermitian(a)?;
    if !t.is_finite() {
        return Err(Error::OutOfRange(format!("time {t}")));
    }
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let eig = herm_eig(a)?;
    closed_flow_eig(&eig, x0, t)
}

/// [`closed_flow`] with a precomputed eigendecomposition of `A`.
pub fn closed_flow_eig(eig: &HermEig, x0: &Mat, t: f64) -> Result<Mat> {
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let v = &eig.vectors;
    let vh = v.conj_transpose();
    let rate = eig.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let steps = step_count(t, rate);
    let dt = t / steps as f64;
    let c: Vec<f64> = eig.values.iter().map(|l| (l * dt).cosh()).collect();
    let s: Vec<f64> = eig.values.iter().map(|l| (l * dt).sinh()).collect();
    let s_mat = Mat::diag_real(Field::R, &s);
    let c_mat = Mat::diag_real(Field::R, &c);
    let retract = on_group(x0);
    let mut y = &(&vh * x0) * v;
    for _ in 0..steps {
        let num = &s_mat + &y.scale_rows(&c);
        let den = &c_mat + &y.scale_rows(&s);
        y = num.right_divide(&den)?;
        if retract {
            y = newton_schulz(&y);
        }
    }
    Ok(&(v * &y) * &vh)
}

/// Solution of the flow for an arbitrary square `A`:
/// `X(t) = (A* s(AA*) + c(A*A) X0)(c(AA*) + s(AA*) A X0)⁻¹` with
/// `c(μ) = cosh(√μ t)` and `s(μ) = sinh(√μ t)/√μ`, stepped like
/// [`closed_flow`].
pub fn closed_flow_general(a: &Mat, x0: &Mat, t: f64) -> Result<Mat> {
    check_square_pair(a, x0)?;
    if !t.is_finite() {
        return Err(Error::OutOfRange(format!("time {t}")));
    }
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let ah = a.conj_transpose();
    let left = herm_eig(&(&ah * a).hermitian_part())?;
    let right = herm_eig(&(a * &ah).hermitian_part())?;
    let smax = right.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let steps = step_count(t, smax);
    let dt = t / steps as f64;
    let c1 = left.apply(|mu| (mu.max(0.0).sqrt() * dt).cosh());
    let c2 = right.apply(|mu| (mu.max(0.0).sqrt() * dt).cosh());
    let s2 = right.apply(|mu| sinhc_time(mu, dt));
    let p_const = &ah * &s2;
    let q_gain = &s2 * a;
    let retract = on_group(x0);
    let mut x = x0.clone();
    for _ in 0..steps {
        let num = &p_const + &(&c1 * &x);
        let den = &c2 + &(&q_gain * &x);
        x = num.right_divide(&den)?;
        if retract {
            x = newton_schulz(&x);
        }
    }
    Ok(x)
}

fn on_group(x: &Mat) -> bool {
    x.is_square() && x.unitarity_defect() <= Tolerances::default().membership
}

/// One Newton–Schulz step `X (3I − X*X) / 2` toward the unitary polar factor.
fn newton_schulz(x: &Mat) -> Mat {
    let g = &x.conj_transpose() * x;
    let id3 = Mat::identity(g.field(), g.rows()).scale(3.0);
    (x * &(&id3 - &g)).scale(0.5)
}

/// `sinh(√μ t)/√μ`, continuous at `μ = 0`.
fn sinhc_time(mu: f64, t: f64) -> f64 {
    let r = mu.max(0.0).sqrt();
    let x = r * t;
    if x.abs() < 1e-4 {
        t * (1.0 + x * x / 6.0)
    } else {
        x.sinh() / r
    }
}

/// Classical RK4 on `Ẋ = A* − XAX`, retracting onto the group after each step.
pub fn numeric_flow(a: &Mat, x0: &Mat, t: f64, steps: usize) -> Result<Mat> {
    check_square_pair(a, x0)?;
    if steps == 0 {
        return Err(Error::OutOfRange("steps must be at least 1".into()));
    }
    if !t.is_finite() {
        return Err(Error::OutOfRange(format!("time {t}")));
    }
    check_unitary(x0, Tolerances::default().membership)?;
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let h = t / steps as f64;
    let mut x = x0.clone();
    for _ in 0..steps {
        let k1 = flow_field(a, &x);
        let k2 = flow_field(a, &(&x + &k1.scale(h / 2.0)));
        let k3 = flow_field(a, &(&x + &k2.scale(h / 2.0)));
        let k4 = flow_field(a, &(&x + &k3.scale(h)));
        let incr = &(&k1 + &k2.scale(2.0)) + &(&k3.scale(2.0) + &k4);
        x = unitary_factor(&(&x + &incr.scale(h / 6.0)))?;
    }
    Ok(x)
}

/// `exp(−At) Y0 exp(−At)`, the Cayley image of the flow.
pub fn linearized_flow(a: &Mat, y0: &Mat, t: f64) -> Result<Mat> {
    check_square_pair(a, y0)?;
    check_hermitian(a)?;
    if t == 0.0 {
        return Ok(y0.clone());
    }
    let e = mat_func(a, -t, MatFn::Exp)?;
    Ok(&(&e * y0) * &e)
}

/// Polar factors `A = J Q` with `J` Hermitian positive definite and `Q` in the group.
#[derive(Clone, Debug)]
pub struct Polar {
    pub j: Mat,
    pub q: Mat,
    /// Flow time at which the residual target was met.
    pub time: f64,
    /// Final `‖A* − XAX‖`.
    pub residual: f64,
}

/// Polar decomposition read off the flow started at `X0 = 0`.
///
/// From `X0 = 0` the flow has the closed form `X(t) = A* g_t(AA*)` with
/// `g_t(μ) = tanh(√μ t)/√μ`, and `X(t) → Q*`. The time is doubled from 1
/// until the gradient residual falls below target.
pub fn polar_via_flow(a: &Mat) -> Result<Polar> {
    polar_via_flow_with(a, &Tolerances::default())
}

pub fn polar_via_flow_with(a: &Mat, tol: &Tolerances) -> Result<Polar> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("polar decomposition of a {}x{} matrix", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(Error::Precondition("matrix has non-finite entries".into()));
    }
    let smin = sigma_min(a)?;
    if smin <= tol.nondegenerate {
        return Err(Error::Conditioning(format!("smallest singular value {smin:.3e}")));
    }
    let ah = a.conj_transpose();
    let eig = herm_eig(&(a * &ah).hermitian_part())?;
    let target = tol.polar_residual * a.norm().max(1.0);
    let limit = 65536.0 / smin;
    let mut t = 1.0;
    while t <= limit {
        let x = &ah * &eig.apply(|mu| tanhc_time(mu, t));
        let residual = flow_field(a, &x).norm();
        if residual < target {
            let q = x.conj_transpose();
            let j = a * &x;
            return Ok(Polar { j, q, time: t, residual });
        }
        t *= 2.0;
    }
    Err(Error::Conditioning(format!("flow did not reach the residual target by t = {limit:.3e}")))
}

/// `tanh(√μ t)/√μ`, continuous at `μ = 0`.
fn tanhc_time(mu: f64, t: f64) -> f64 {
    let r = mu.max(0.0).sqrt();
    let x = r * t;
    if x.abs() < 1e-4 {
        t * (1.0 - x * x / 3.0)
    } else {
        x.tanh() / r
    }
}

/// `‖(A₂A₁ − A₁A₂)X + X(A₁A₂ − A₂A₁)‖`, the Lie bracket of the two flows at `X`.
pub fn bracket_residual(a1: &Mat, a2: &Mat, x: &Mat) -> Result<f64> {
    check_square_pair(a1, x)?;
    check_square_pair(a2, x)?;
    let comm = &(a1 * a2) - &(a2 * a1);
    Ok((&(x * &comm) - &(&comm * x)).norm())
}
