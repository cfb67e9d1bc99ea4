//! Symmetric spaces embedded in the classical groups.
//!
//! Each space is the fixed-point set of an involution of its ambient group and
//! carries a point reflection `S_x` with `S_x(x) = x`. Height flows of the
//! ambient group preserve the space when `A` obeys the matching linear
//! constraint, listed in [`SpaceSpec::a_constraint_residual`].

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_flow::{closed_flow, closed_flow_general, Family, GroupSpec};
use crate::linalg::{herm_eig, orthonormalize, projector, singular_values};
use crate::mat::Mat;
use crate::random::{haar, random_subspace, rng};
use crate::scalar::{Field, Quat};
use crate::tolerances::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceSpec {
    /// The group O(n), U(n) or Sp(n) itself.
    Group(GroupSpec),
    /// `m`-planes in `kⁿ`, embedded as reflections `2P − I`.
    Grassmann { n: usize, m: usize, field: Field },
    /// U(n)/O(n): symmetric unitary `n×n` matrices.
    LagGrass(usize),
    /// O(2n)/U(n): real `2n×2n` orthogonal `X` with `Xᵀ = −X`.
    ComplexStruct(usize),
    /// U(2n)/Sp(n): complex `2n×2n` unitary `X` with `Xᵀ = −X`.
    QuatStruct(usize),
    /// Sp(n)/U(n): quaternionic unitary `X` with `X* = −X`.
    SpModU(usize),
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Group(g) => write!(f, "{g}"),
            SpaceSpec::Grassmann { n, m, field } => write!(f, "G({n},{m},{field})"),
            SpaceSpec::LagGrass(n) => write!(f, "U({n})/O({n})"),
            SpaceSpec::ComplexStruct(n) => write!(f, "O({})/U({n})", 2 * n),
            SpaceSpec::QuatStruct(n) => write!(f, "U({})/Sp({n})", 2 * n),
            SpaceSpec::SpModU(n) => write!(f, "Sp({n})/U({n})"),
        }
    }
}

/// Standard symplectic form `blockdiag([[0,−1],[1,0]], …)` of size `2n`.
pub fn standard_j(field: Field, n: usize) -> Mat {
    let mut j = Mat::zeros(field, 2 * n, 2 * n);
    for b in 0..n {
        j[(2 * b, 2 * b + 1)] = Quat::real(-1.0);
        j[(2 * b + 1, 2 * b)] = Quat::real(1.0);
    }
    j
}

impl SpaceSpec {
    /// The group whose flows are restricted to this space.
    pub fn ambient(&self) -> GroupSpec {
        match *self {
            SpaceSpec::Group(g) => g,
            SpaceSpec::Grassmann { n, field, .. } => GroupSpec::new(Family::from_field(field), n),
            SpaceSpec::LagGrass(n) => GroupSpec::new(Family::U, n),
            SpaceSpec::ComplexStruct(n) => GroupSpec::new(Family::O, 2 * n),
            SpaceSpec::QuatStruct(n) => GroupSpec::new(Family::U, 2 * n),
            SpaceSpec::SpModU(n) => GroupSpec::new(Family::Sp, n),
        }
    }

    pub fn field(&self) -> Field {
        self.ambient().field()
    }

    /// Matrix size of the embedding.
    pub fn size(&self) -> usize {
        self.ambient().n
    }

    /// Real dimension of the space.
    pub fn dim(&self) -> usize {
        match *self {
            SpaceSpec::Group(g) => g.dim(),
            SpaceSpec::Grassmann { n, m, field } => field.dim() * m * (n - m.min(n)),
            SpaceSpec::LagGrass(n) => n * (n + 1) / 2,
            SpaceSpec::ComplexStruct(n) => n * (n.max(1) - 1),
            SpaceSpec::QuatStruct(n) => 2 * n * n - n,
            SpaceSpec::SpModU(n) => n * n + n,
        }
    }

    /// Sum of the defining-equation residuals; infinite for wrong shape or field.
    pub fn membership_residual(&self, x: &Mat) -> f64 {
        let k = self.size();
        if x.shape() != (k, k) || x.tightened().field() > self.field() {
            return f64::INFINITY;
        }
        let id = Mat::identity(x.field(), k);
        match *self {
            SpaceSpec::Group(_) => x.unitarity_defect(),
            SpaceSpec::Grassmann { n, m, .. } => {
                let sq = (&(x * x) - &id).norm();
                let tr = (x.re_trace() - (2.0 * m as f64 - n as f64)).abs();
                x.hermitian_defect() + sq + tr
            }
            SpaceSpec::LagGrass(_) => (x - &x.transpose()).norm() + x.unitarity_defect(),
            SpaceSpec::ComplexStruct(_) | SpaceSpec::QuatStruct(_) => {
                (x + &x.transpose()).norm() + x.unitarity_defect()
            }
            SpaceSpec::SpModU(_) => (x + &x.conj_transpose()).norm() + x.unitarity_defect(),
        }
    }

    pub fn contains(&self, x: &Mat, tol: f64) -> bool {
        self.membership_residual(x) <= tol
    }

    fn require_member(&self, x: &Mat, tol: f64, what: &str) -> Result<()> {
        let r = self.membership_residual(x);
        if r <= tol {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{what} is not a point of {self} (residual {r:.3e})")))
        }
    }

    /// Residual of the constraint on `A` under which the flow preserves the space:
    /// Grassmannians need `A* = A`, U(n)/O(n) needs `Aᵀ = A`, O(2n)/U(n) needs a
    /// real `Aᵀ = −A`, U(2n)/Sp(n) needs `Aᵀ = −A`, Sp(n)/U(n) needs `A* = −A`.
    pub fn a_constraint_residual(&self, a: &Mat) -> f64 {
        let k = self.size();
        if a.shape() != (k, k) || a.tightened().field() > self.field() {
            return f64::INFINITY;
        }
        match self {
            SpaceSpec::Group(_) => 0.0,
            SpaceSpec::Grassmann { .. } => a.hermitian_defect(),
            SpaceSpec::LagGrass(_) => (a - &a.transpose()).norm(),
            SpaceSpec::ComplexStruct(_) | SpaceSpec::QuatStruct(_) => (a + &a.transpose()).norm(),
            SpaceSpec::SpModU(_) => (a + &a.conj_transpose()).norm(),
        }
    }

    /// The point reflection `S_x(y)`.
    pub fn reflect(&self, x: &Mat, y: &Mat) -> Result<Mat> {
        let tol = Tolerances::default().membership;
        self.require_member(x, tol, "x")?;
        self.require_member(y, tol, "y")?;
        Ok(self.reflect_unchecked(x, y))
    }

    pub fn reflect_unchecked(&self, x: &Mat, y: &Mat) -> Mat {
        match self {
            SpaceSpec::Group(_) => &(x * &y.conj_transpose()) * x,
            SpaceSpec::Grassmann { .. } => &(x * y) * x,
            SpaceSpec::LagGrass(_) => &(x * &y.conj()) * x,
            SpaceSpec::ComplexStruct(_) | SpaceSpec::SpModU(_) => -(&(x * y) * x),
            SpaceSpec::QuatStruct(_) => -(&(x * &y.conj()) * x),
        }
    }

    /// A random point of the space.
    pub fn sample(&self, rng: &mut impl Rng) -> Mat {
        match *self {
            SpaceSpec::Group(g) => haar(rng, g.field(), g.n),
            SpaceSpec::Grassmann { n, m, field } => {
                let q = random_subspace(rng, field, n, m);
                (&projector(&q).scale(2.0) - &Mat::identity(field, n)).promote(field)
            }
            SpaceSpec::LagGrass(n) => {
                let u = haar(rng, Field::C, n);
                &u * &u.transpose()
            }
            SpaceSpec::ComplexStruct(n) => {
                let o = haar(rng, Field::R, 2 * n);
                &(&o * &standard_j(Field::R, n)) * &o.transpose()
            }
            SpaceSpec::QuatStruct(n) => {
                let u = haar(rng, Field::C, 2 * n);
                &(&u * &standard_j(Field::C, n)) * &u.transpose()
            }
            SpaceSpec::SpModU(n) => {
                let q = haar(rng, Field::H, n);
                let i = Mat::identity(Field::H, n).left_scale(Quat::I);
                &(&q * &i) * &q.conj_transpose()
            }
        }
    }
}

/// `2 Z (Z*Z)⁻¹ Z* − I`, the reflection fixing `span(Z)`.
pub fn grassmann_embed(z: &Mat) -> Result<Mat> {
    let q = orthonormal_basis(z)?;
    Ok(&projector(&q).scale(2.0) - &Mat::identity(z.field(), z.rows()))
}

/// Orthonormal basis of `span(Z)`, rejecting numerically rank-deficient `Z`.
pub fn orthonormal_basis(z: &Mat) -> Result<Mat> {
    if z.cols() == 0 || z.cols() > z.rows() {
        return Err(Error::Dimension(format!("subspace basis of shape {}x{}", z.rows(), z.cols())));
    }
    let s = singular_values(z)?;
    let smin = s.last().copied().unwrap_or(0.0);
    if smin <= Tolerances::default().rank_zero * s[0].max(1.0) {
        return Err(Error::Precondition(format!("basis is rank deficient (sigma_min {smin:.3e})")));
    }
    orthonormalize(z)
}

/// `exp(At) Z`, re-orthonormalized.
pub fn grassmann_flow(z: &Mat, a: &Mat, t: f64) -> Result<Mat> {
    if a.rows() != z.rows() || !a.is_square() {
        return Err(Error::Dimension(format!("A is {}x{} but Z has {} rows", a.rows(), a.cols(), z.rows())));
    }
    let mut q = orthonormal_basis(z)?;
    if t == 0.0 {
        return Ok(q);
    }
    let eig = herm_eig(a)?;
    let spread = eig.values.last().unwrap() - eig.values[0];
    let steps = ((t.abs() * spread / 0.5).ceil() as usize).max(1);
    let dt = t / steps as f64;
    let shift = eig.values.iter().sum::<f64>() / eig.values.len() as f64;
    let step = eig.apply(|l| ((l - shift) * dt).exp());
    for _ in 0..steps {
        q = orthonormalize(&(&step * &q))?;
    }
    Ok(q)
}

/// `‖P₁ − P₂‖` for the orthogonal projectors onto two column spans.
pub fn subspace_distance(z1: &Mat, z2: &Mat) -> Result<f64> {
    let q1 = orthonormal_basis(z1)?;
    let q2 = orthonormal_basis(z2)?;
    if q1.rows() != q2.rows() {
        return Err(Error::Dimension("subspaces live in different spaces".into()));
    }
    Ok((&projector(&q1) - &projector(&q2)).norm())
}

/// Outcome of flowing sampled points and measuring how far they leave the space.
#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub space: String,
    pub samples: usize,
    pub time: f64,
    pub max_residual: f64,
    pub passed: bool,
}

/// Flows `samples` random points of `space` for time `t` under the ambient
/// height flow of `A` and reports the worst membership residual.
pub fn check_invariance(space: SpaceSpec, a: &Mat, samples: usize, t: f64, seed: u64) -> Result<InvarianceReport> {
    let r = space.a_constraint_residual(a);
    if r > Tolerances::default().membership * a.norm().max(1.0) {
        return Err(Error::Precondition(format!("A violates the constraint of {space} (residual {r:.3e})")));
    }
    check_invariance_unconstrained(space, a, samples, t, seed)
}

/// [`check_invariance`] without validating `A`; used for negative controls.
pub fn check_invariance_unconstrained(
    space: SpaceSpec,
    a: &Mat,
    samples: usize,
    t: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    let k = space.size();
    if a.shape() != (k, k) {
        return Err(Error::Dimension(format!("A must be {k}x{k} for {space}")));
    }
    let mut g = rng(seed);
    let hermitian = a.is_hermitian(Tolerances::default().hermitian);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x0 = space.sample(&mut g);
        let a = a.promote(a.field().join(x0.field()));
        let x = if hermitian { closed_flow(&a, &x0, t)? } else { closed_flow_general(&a, &x0, t)? };
        worst = worst.max(space.membership_residual(&x.promote(x.field().max(space.field()))));
    }
    Ok(InvarianceReport {
        space: space.to_string(),
        samples,
        time: t,
        max_residual: worst,
        passed: worst < Tolerances::default().membership_post_flow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_spaces() -> Vec<SpaceSpec> {
        vec![
            SpaceSpec::Group(GroupSpec::new(Family::O, 3)),
            SpaceSpec::Group(GroupSpec::new(Family::U, 3)),
            SpaceSpec::Group(GroupSpec::new(Family::Sp, 2)),
            SpaceSpec::Grassmann { n: 4, m: 2, field: Field::C },
            SpaceSpec::Grassmann { n: 3, m: 1, field: Field::H },
            SpaceSpec::LagGrass(3),
            SpaceSpec::ComplexStruct(2),
            SpaceSpec::QuatStruct(2),
            SpaceSpec::SpModU(2),
        ]
    }

    #[test]
    fn samples_are_members() {
        let mut g = rng(3);
        for s in all_spaces() {
            for _ in 0..5 {
                let x = s.sample(&mut g);
                assert!(s.membership_residual(&x) < 1e-12, "{s}: {}", s.membership_residual(&x));
            }
        }
    }

    #[test]
    fn reflection_fixes_its_center() {
        let mut g = rng(9);
        for s in all_spaces() {
            let x = s.sample(&mut g);
            let y = s.sample(&mut g);
            assert!((&s.reflect(&x, &x).unwrap() - &x).norm() < 1e-12, "{s}");
            let sy = s.reflect(&x, &y).unwrap();
            assert!(s.membership_residual(&sy) < 1e-11, "{s}");
        }
    }

    #[test]
    fn group_reflection_at_identity_is_adjoint() {
        let s = SpaceSpec::Group(GroupSpec::new(Family::U, 2));
        let y = s.sample(&mut rng(1));
        let id = Mat::identity(Field::C, 2);
        assert!((&s.reflect(&id, &y).unwrap() - &y.conj_transpose()).norm() < 1e-15);
    }

    #[test]
    fn coordinate_grassmann_embedding() {
        let z = Mat::identity(Field::R, 4).columns(0..2);
        let x = grassmann_embed(&z).unwrap();
        assert_eq!(x, Mat::diag_real(Field::R, &[1.0, 1.0, -1.0, -1.0]));
        let full = grassmann_embed(&Mat::identity(Field::R, 3)).unwrap();
        assert_eq!(full, Mat::identity(Field::R, 3));
        let bad = Mat::from_rows(&[&[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]]);
        assert!(matches!(grassmann_embed(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn space_dimensions() {
        assert_eq!(SpaceSpec::ComplexStruct(2).dim(), 2);
        assert_eq!(SpaceSpec::QuatStruct(1).dim(), 1);
        assert_eq!(SpaceSpec::SpModU(1).dim(), 2);
        assert_eq!(SpaceSpec::Grassmann { n: 4, m: 2, field: Field::C }.dim(), 8);
    }

    #[test]
    fn constraint_violation_is_an_error() {
        let a = Mat::diag_real(Field::R, &[1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            check_invariance(SpaceSpec::ComplexStruct(2), &a, 3, 1.0, 0),
            Err(Error::Precondition(_))
        ));
    }
}
