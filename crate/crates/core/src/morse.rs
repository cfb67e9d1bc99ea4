//! Critical points, Morse indices and numerical Hessians of height functions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::betti::IntPolynomial;
use crate::error::{Error, Result};
use crate::group_flow::{height, Family, GroupSpec};
use crate::linalg::{exp_minus_identity, herm_eig};
use crate::mat::Mat;
use crate::scalar::{Field, Quat};
use crate::spaces::{standard_j, SpaceSpec};
use crate::tolerances::Tolerances;

const MAX_ENUM_N: usize = 20;

/// Signs `ε ∈ {±1}ⁿ` naming the critical point `diag(ε₁, …, εₙ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(eps: Vec<i8>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::OutOfRange("empty sign vector".into()));
        }
        if let Some(bad) = eps.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::Parse(format!("sign entries must be +1 or -1, found {bad}")));
        }
        Ok(SignVector(eps))
    }

    pub fn all(n: usize, sign: i8) -> Self {
        SignVector(vec![sign; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// 1-based positions carrying `+1`.
    pub fn plus_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e == 1).map(|(i, _)| i + 1)
    }

    pub fn count_plus(&self) -> usize {
        self.plus_positions().count()
    }

    pub fn to_matrix(&self, field: Field) -> Mat {
        let v: Vec<f64> = self.0.iter().map(|&e| e as f64).collect();
        Mat::diag_real(field, &v)
    }
}

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        SignVector::new(v)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(s: SignVector) -> Vec<i8> {
        s.0
    }
}

/// All `2ⁿ` sign vectors in lexicographic order with `−1 < +1`.
pub fn enumerate_critical(n: usize) -> Result<Vec<SignVector>> {
    if n == 0 || n > MAX_ENUM_N {
        return Err(Error::OutOfRange(format!("n = {n} outside 1..={MAX_ENUM_N}")));
    }
    Ok((0u32..1 << n)
        .map(|bits| SignVector((0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { 1 } else { -1 }).collect()))
        .collect())
}

/// `Σ_{k: ε_k = 1} (d k − 1)`.
pub fn morse_index(eps: &SignVector, field: Field) -> usize {
    let d = field.dim();
    eps.plus_positions().map(|k| d * k - 1).sum()
}

/// `diag(d − 1, 2d − 1, …, nd − 1)`, whose height at each critical point
/// equals the index minus the coindex.
pub fn morse_smale_matrix(n: usize, field: Field) -> Result<Mat> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let d = field.dim();
    let v: Vec<f64> = (1..=n).map(|k| (d * k - 1) as f64).collect();
    Ok(Mat::diag_real(field, &v))
}

/// `Σ_ε t^{ind(ε)}` over all critical points of the group.
pub fn index_generating_polynomial(n: usize, field: Field) -> Result<IntPolynomial> {
    let d = field.dim();
    count_polynomial(n, |k| d * k - 1)
}

/// Enumerates sign vectors, where `+1` at 1-based position `j` contributes `c(j)`.
fn count_polynomial(n: usize, c: impl Fn(usize) -> usize) -> Result<IntPolynomial> {
    let signs = enumerate_critical(n)?;
    let weights: Vec<usize> = (1..=n).map(&c).collect();
    let mut counts = vec![0u64; weights.iter().sum::<usize>() + 1];
    for eps in &signs {
        let idx: usize = eps.plus_positions().map(|j| weights[j - 1]).sum();
        counts[idx] += 1;
    }
    Ok(IntPolynomial::from_u64s(&counts))
}

/// The four compact symmetric spaces whose cells are counted by Grassmannians.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetricKind {
    /// U(n)/O(n)
    LagGrass,
    /// O(2n)/U(n)
    ComplexStruct,
    /// U(2n)/Sp(n)
    QuatStruct,
    /// Sp(n)/U(n)
    SpModU,
}

impl SymmetricKind {
    pub const ALL: [SymmetricKind; 4] =
        [SymmetricKind::LagGrass, SymmetricKind::ComplexStruct, SymmetricKind::QuatStruct, SymmetricKind::SpModU];

    pub fn space(self, n: usize) -> SpaceSpec {
        match self {
            SymmetricKind::LagGrass => SpaceSpec::LagGrass(n),
            SymmetricKind::ComplexStruct => SpaceSpec::ComplexStruct(n),
            SymmetricKind::QuatStruct => SpaceSpec::QuatStruct(n),
            SymmetricKind::SpModU => SpaceSpec::SpModU(n),
        }
    }

    pub fn label(self, n: usize) -> String {
        self.space(n).to_string()
    }

    /// Field of the Grassmannians in the cell decomposition.
    pub fn grassmann_field(self) -> Field {
        match self {
            SymmetricKind::LagGrass => Field::R,
            SymmetricKind::ComplexStruct | SymmetricKind::SpModU => Field::C,
            SymmetricKind::QuatStruct => Field::H,
        }
    }

    /// Index contributed by `+1` at 1-based position `j`.
    pub fn weight(self, j: usize) -> usize {
        match self {
            SymmetricKind::LagGrass => j,
            SymmetricKind::ComplexStruct => 2 * (j - 1),
            SymmetricKind::QuatStruct => 4 * j - 3,
            SymmetricKind::SpModU => 2 * j,
        }
    }

    /// Lowest index among critical points with `k` entries `+1`:
    /// `k(k+1)/2`, `k(k−1)`, `k(2k−1)`, `k(k+1)`.
    pub fn shift(self, k: usize) -> usize {
        (1..=k).map(|j| self.weight(j)).sum()
    }
}

/// Critical-point count polynomial of a symmetric space from its index formula.
pub fn space_index_polynomial(kind: SymmetricKind, n: usize) -> Result<IntPolynomial> {
    count_polynomial(n, |j| kind.weight(j))
}

/// Closed-form index of the critical point `eps` of the standard height
/// function on `space`; `None` when `eps` is not a critical point there.
pub fn space_index_formula(space: &SpaceSpec, eps: &SignVector) -> Option<usize> {
    match *space {
        SpaceSpec::Group(g) => (eps.len() == g.n).then(|| morse_index(eps, g.field())),
        SpaceSpec::Grassmann { n, m, field } => {
            if eps.len() != n || eps.count_plus() != m {
                return None;
            }
            let jumps: usize = eps.plus_positions().enumerate().map(|(k, j)| j - (k + 1)).sum();
            Some(field.dim() * jumps)
        }
        SpaceSpec::LagGrass(n) | SpaceSpec::ComplexStruct(n) | SpaceSpec::QuatStruct(n) | SpaceSpec::SpModU(n) => {
            if eps.len() != n {
                return None;
            }
            let kind = symmetric_kind(space)?;
            Some(eps.plus_positions().map(|j| kind.weight(j)).sum())
        }
    }
}

fn symmetric_kind(space: &SpaceSpec) -> Option<SymmetricKind> {
    match space {
        SpaceSpec::LagGrass(_) => Some(SymmetricKind::LagGrass),
        SpaceSpec::ComplexStruct(_) => Some(SymmetricKind::ComplexStruct),
        SpaceSpec::QuatStruct(_) => Some(SymmetricKind::QuatStruct),
        SpaceSpec::SpModU(_) => Some(SymmetricKind::SpModU),
        _ => None,
    }
}

/// Standard height matrix and critical point on `space` for weights `a` and signs `eps`.
///
/// On the group, Grassmannians and U(n)/O(n) these are `diag(a)` and
/// `diag(ε)`. On the structure spaces the diagonal is replaced by `2×2`
/// blocks `−a_j J₂` and `ε_j J₂` (or `−a_j i` and `ε_j i` on Sp(n)/U(n)),
/// chosen so that the height is `c·Σ a_j ε_j` with `c > 0`.
pub fn standard_critical_pair(space: &SpaceSpec, a: &[f64], eps: &SignVector) -> Result<(Mat, Mat)> {
    let n = eps.len();
    if a.len() != n {
        return Err(Error::Dimension(format!("{} weights for {} signs", a.len(), n)));
    }
    if space_index_formula(space, eps).is_none() {
        return Err(Error::Dimension(format!("sign vector of length {n} does not name a critical point of {space}")));
    }
    let field = space.field();
    let e: Vec<f64> = eps.signs().iter().map(|&s| s as f64).collect();
    Ok(match space {
        SpaceSpec::Group(_) | SpaceSpec::Grassmann { .. } | SpaceSpec::LagGrass(_) => {
            (Mat::diag_real(field, a), Mat::diag_real(field, &e))
        }
        SpaceSpec::ComplexStruct(_) | SpaceSpec::QuatStruct(_) => {
            let j2 = standard_j(field, 1);
            let mut am = Mat::zeros(field, 2 * n, 2 * n);
            let mut xm = Mat::zeros(field, 2 * n, 2 * n);
            for b in 0..n {
                am.set_block(2 * b, 2 * b, &j2.scale(-a[b]));
                xm.set_block(2 * b, 2 * b, &j2.scale(e[b]));
            }
            (am, xm)
        }
        SpaceSpec::SpModU(_) => {
            let da: Vec<Quat> = a.iter().map(|&x| Quat::I.scale(-x)).collect();
            let de: Vec<Quat> = e.iter().map(|&x| Quat::I.scale(x)).collect();
            (Mat::diag(field, &da).promote(field), Mat::diag(field, &de).promote(field))
        }
    })
}

/// Counts of positive, negative and zero Hessian eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn total(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }

    /// `n₋ − n₊`.
    pub fn index_minus_coindex(&self) -> i64 {
        self.n_minus as i64 - self.n_plus as i64
    }
}

/// How the acting group moves a point of the space.
#[derive(Clone, Copy, Debug)]
enum Action {
    /// `X · g`
    Right,
    /// `g X g*`
    Conjugate,
    /// `g X gᵀ`
    Congruence,
}

/// Acting group for each space: its action, field and matrix size.
fn chart(space: &SpaceSpec) -> (Action, Field, usize) {
    match *space {
        SpaceSpec::Group(g) => (Action::Right, g.field(), g.n),
        SpaceSpec::Grassmann { n, field, .. } => (Action::Conjugate, field, n),
        SpaceSpec::LagGrass(n) => (Action::Congruence, Field::C, n),
        SpaceSpec::ComplexStruct(n) => (Action::Congruence, Field::R, 2 * n),
        SpaceSpec::QuatStruct(n) => (Action::Congruence, Field::C, 2 * n),
        SpaceSpec::SpModU(n) => (Action::Conjugate, Field::H, n),
    }
}

/// Orthonormal basis of the skew-Hermitian `n×n` matrices over `field`.
fn skew_basis(field: Field, n: usize) -> Vec<Mat> {
    let mut basis = Vec::new();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for &u in field.imaginary_units() {
            let mut b = Mat::zeros(field, n, n);
            b[(i, i)] = u;
            basis.push(b);
        }
        for j in i + 1..n {
            for &u in field.units() {
                let mut b = Mat::zeros(field, n, n);
                b[(i, j)] = u.scale(r);
                b[(j, i)] = -u.conj().scale(r);
                basis.push(b);
            }
        }
    }
    basis
}

fn tangent(action: Action, x: &Mat, b: &Mat) -> Mat {
    match action {
        Action::Right => x * b,
        Action::Conjugate => &(b * x) - &(x * b),
        Action::Congruence => &(b * x) + &(x * &b.transpose()),
    }
}

/// `φ(B) − X` where `e1 = exp(B) − I`.
fn displacement(action: Action, x: &Mat, e1: &Mat) -> Mat {
    match action {
        Action::Right => x * e1,
        Action::Conjugate => {
            let e1h = e1.conj_transpose();
            let xe = x * &e1h;
            &(&(e1 * x) + &xe) + &(e1 * &xe)
        }
        Action::Congruence => {
            let e1t = e1.transpose();
            let xe = x * &e1t;
            &(&(e1 * x) + &xe) + &(e1 * &xe)
        }
    }
}

/// Signature of the Hessian of `f_A` at the critical point `X` of `space`.
///
/// The Hessian of `c ↦ f_A(φ_X(Σ c_k B_k))` over an orthonormal basis of the
/// acting Lie algebra is found by central second differences (polarized for
/// mixed terms, one Richardson step), then restricted to a complement of the
/// isotropy directions and normalized so that the tangent images are
/// orthonormal in the ambient metric.
pub fn hessian_signature(a: &Mat, x: &Mat, space: &SpaceSpec) -> Result<Signature> {
    hessian_signature_with(a, x, space, &Tolerances::default())
}

pub fn hessian_signature_with(a: &Mat, x: &Mat, space: &SpaceSpec, tol: &Tolerances) -> Result<Signature> {
    let k = space.size();
    if a.shape() != (k, k) || x.shape() != (k, k) {
        return Err(Error::Dimension(format!("{space} needs {k}x{k} matrices")));
    }
    let r = space.membership_residual(x);
    if r > tol.membership {
        return Err(Error::Precondition(format!("X is not a point of {space} (residual {r:.3e})")));
    }
    let (action, field, size) = chart(space);
    let x = x.promote(x.field().max(field));
    let ah = a.conj_transpose();
    let basis = skew_basis(field, size);
    let tangents: Vec<Mat> = basis.iter().map(|b| tangent(action, &x, b)).collect();

    let scale = a.norm().max(1.0);
    let grad = tangents.iter().map(|t| ah.dot(t).abs()).fold(0.0, f64::max);
    if grad > tol.critical * scale {
        return Err(Error::Precondition(format!("X is not a critical point (gradient {grad:.3e})")));
    }

    let dim = basis.len();
    let delta = |coef: &[(usize, f64)]| -> f64 {
        let mut b = Mat::zeros(field, size, size);
        for &(i, c) in coef {
            b += &basis[i].scale(c);
        }
        ah.dot(&displacement(action, &x, &exp_minus_identity(&b)))
    };
    let quad = |coef: &[(usize, f64)], h: f64| -> f64 {
        let plus: Vec<(usize, f64)> = coef.iter().map(|&(i, c)| (i, c * h)).collect();
        let minus: Vec<(usize, f64)> = coef.iter().map(|&(i, c)| (i, -c * h)).collect();
        (delta(&plus) + delta(&minus)) / (h * h)
    };
    let h = 1e-4;
    let richardson = |coef: &[(usize, f64)]| (4.0 * quad(coef, h / 2.0) - quad(coef, h)) / 3.0;

    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            if i == j {
                richardson(&[(i, 1.0)])
            } else {
                (richardson(&[(i, 1.0), (j, 1.0)]) - richardson(&[(i, 1.0), (j, -1.0)])) / 4.0
            }
        })
        .collect();
    let mut hess = Mat::zeros(Field::R, dim, dim);
    for (&(i, j), &v) in pairs.iter().zip(&entries) {
        hess[(i, j)] = Quat::real(v);
        hess[(j, i)] = Quat::real(v);
    }

    let gram = Mat::from_fn(Field::R, dim, dim, |i, j| Quat::real(tangents[i].dot(&tangents[j])));
    let ge = herm_eig(&gram)?;
    let top = ge.values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..dim).filter(|&i| ge.values[i] > 1e-8 * top).collect();
    let inv_sqrt: Vec<f64> = keep.iter().map(|&i| 1.0 / ge.values[i].sqrt()).collect();
    let w = ge.vectors.columns(keep.iter().copied()).scale_cols(&inv_sqrt);
    let reduced = (&(&w.transpose() * &hess) * &w).hermitian_part();
    let re = herm_eig(&reduced)?;
    let zero = tol.hessian_zero * a.norm();
    let mut sig = Signature { n_plus: 0, n_minus: 0, n_zero: 0 };
    for &l in &re.values {
        if l > zero {
            sig.n_plus += 1;
        } else if l < -zero {
            sig.n_minus += 1;
        } else {
            sig.n_zero += 1;
        }
    }
    Ok(sig)
}

/// One critical point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub eps: SignVector,
    pub index_formula: usize,
    pub signature: Signature,
    pub height_value: f64,
}

/// Formula index, numerical signature and height at every `diag(ε)` of the group.
pub fn group_sweep(group: GroupSpec, a: &Mat) -> Result<Vec<IndexRecord>> {
    let field = group.field();
    let a = a.promote(a.field().max(field));
    let space = SpaceSpec::Group(group);
    enumerate_critical(group.n)?
        .into_par_iter()
        .map(|eps| {
            let x = eps.to_matrix(field);
            Ok(IndexRecord {
                index_formula: morse_index(&eps, field),
                signature: hessian_signature(&a, &x, &space)?,
                height_value: height(&a, &x)?,
                eps,
            })
        })
        .collect()
}

/// Numerical signatures at every standard critical point of `space` for weights `a`.
pub fn space_census(space: &SpaceSpec, a: &[f64]) -> Result<Vec<IndexRecord>> {
    let n = a.len();
    let candidates: Vec<SignVector> = enumerate_critical(n)?
        .into_iter()
        .filter(|e| space_index_formula(space, e).is_some())
        .collect();
    candidates
        .into_par_iter()
        .map(|eps| {
            let (am, xm) = standard_critical_pair(space, a, &eps)?;
            Ok(IndexRecord {
                index_formula: space_index_formula(space, &eps).expect("filtered"),
                signature: hessian_signature(&am, &xm, space)?,
                height_value: height(&am, &xm)?,
                eps,
            })
        })
        .collect()
}

/// Group of the given field and size.
pub fn group_of(field: Field, n: usize) -> GroupSpec {
    GroupSpec::new(Family::from_field(field), n)
}
