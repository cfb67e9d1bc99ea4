//! Schubert symbols and the cell decomposition of a group by `−1`-eigenspaces.
//!
//! For `A = diag(a)` with `0 < a₁ < … < aₙ`, a group element `X` lies in the
//! cell labelled by the Schubert symbol of the orthogonal complement `W` of its
//! `−1`-eigenspace, taken against the coordinate flag `U_l = span(e₁, …, e_l)`.
//! Under the flow `W(t) = exp(At) W(0)`, so the limit is the critical point
//! with `+1` exactly at the jump positions of `W`.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group_flow::closed_flow_eig;
use crate::linalg::{herm_eig, orthonormalize, projector, sigma_min, singular_values, svd, unitary_factor};
use crate::mat::Mat;
use crate::morse::SignVector;
use crate::random::{gaussian, haar, random_subspace, rng};
use crate::scalar::Field;
use crate::spaces::orthonormal_basis;
use crate::tolerances::Tolerances;

/// Jump positions `1 ≤ j₁ < … < j_m ≤ n` where `dim(V ∩ U_l)` increases.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SchubertSymbol {
    pub jumps: Vec<usize>,
}

impl SchubertSymbol {
    pub fn new(jumps: Vec<usize>, n: usize) -> Result<Self> {
        validate_jumps(&jumps, Some(n))?;
        Ok(SchubertSymbol { jumps })
    }

    pub fn dim(&self) -> usize {
        self.jumps.len()
    }

    /// Partition `λ = (j_m − m, …, j₁ − 1)`, nonincreasing.
    pub fn to_partition(&self) -> Vec<usize> {
        self.jumps.iter().enumerate().rev().map(|(k, &j)| j - (k + 1)).collect()
    }

    /// Inverse of [`SchubertSymbol::to_partition`] for `m`-planes in `kⁿ`.
    pub fn from_partition(lambda: &[usize], n: usize) -> Result<Self> {
        let m = lambda.len();
        if lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parse("partition must be nonincreasing".into()));
        }
        let jumps = (0..m).map(|k| lambda[m - 1 - k] + k + 1).collect();
        SchubertSymbol::new(jumps, n)
    }

    /// Real dimension `d · Σ (j_k − k)` of the cell in the Grassmannian.
    pub fn grassmann_cell_dim(&self, field: Field) -> usize {
        field.dim() * self.to_partition().iter().sum::<usize>()
    }
}

fn validate_jumps(jumps: &[usize], n: Option<usize>) -> Result<()> {
    if jumps.first().is_some_and(|&j| j == 0) {
        return Err(Error::Parse("jumps are 1-based".into()));
    }
    if jumps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse("jumps must be strictly increasing".into()));
    }
    if let (Some(n), Some(&last)) = (n, jumps.last()) {
        if last > n {
            return Err(Error::OutOfRange(format!("jump {last} exceeds n = {n}")));
        }
    }
    Ok(())
}

impl fmt::Display for SchubertSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.jumps.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Label of a cell of the group: the dimension of `W` and its Schubert symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub m: usize,
    pub symbol: SchubertSymbol,
}

impl CellId {
    pub fn new(symbol: SchubertSymbol) -> Self {
        CellId { m: symbol.dim(), symbol }
    }

    /// Real dimension of the cell in the group:
    /// `d · Σ (j_k − k) + Σ_{k=1}^{m} (d k − 1) = Σ_k (d j_k − 1)`.
    pub fn group_cell_dim(&self, field: Field) -> usize {
        let d = field.dim();
        self.symbol.grassmann_cell_dim(field) + (1..=self.m).map(|k| d * k - 1).sum::<usize>()
    }

    /// The critical point reached by the flow: `+1` at the jumps, `−1` elsewhere.
    pub fn critical_point(&self, n: usize) -> Result<SignVector> {
        validate_jumps(&self.symbol.jumps, Some(n))?;
        let mut eps = vec![-1i8; n];
        for &j in &self.symbol.jumps {
            eps[j - 1] = 1;
        }
        SignVector::new(eps)
    }

    /// Cell whose flow limit is `eps`.
    pub fn from_critical_point(eps: &SignVector) -> Self {
        CellId::new(SchubertSymbol { jumps: eps.plus_positions().collect() })
    }

    /// `{"m": m, "jumps": […]}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "m": self.m, "jumps": self.symbol.jumps }).to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("cell JSON: {e}")))?;
        let obj = v.as_object().ok_or_else(|| Error::Parse("cell must be a JSON object".into()))?;
        if obj.keys().any(|k| k != "m" && k != "jumps") {
            return Err(Error::Parse("cell object accepts only `m` and `jumps`".into()));
        }
        let m = obj
            .get("m")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing nonnegative integer `m`".into()))? as usize;
        let jumps: Vec<usize> = obj
            .get("jumps")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array `jumps`".into()))?
            .iter()
            .map(|j| j.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("bad jump {j}"))))
            .collect::<Result<_>>()?;
        if jumps.len() != m {
            return Err(Error::Parse(format!("m = {m} but {} jumps given", jumps.len())));
        }
        validate_jumps(&jumps, None)?;
        Ok(CellId { m, symbol: SchubertSymbol { jumps } })
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[m={} {}]", self.m, self.symbol)
    }
}

/// Numerical rank with an explicit indeterminate band.
pub fn numerical_rank(m: &Mat, tol: &Tolerances) -> Result<usize> {
    let s = singular_values(m)?;
    let mut rank = 0;
    for &x in &s {
        if x > tol.rank_nonzero {
            rank += 1;
        } else if x >= tol.rank_zero {
            return Err(Error::Indeterminate(format!("singular value {x:.3e} inside the indeterminate band")));
        }
    }
    Ok(rank)
}

/// Jump sequence of `span(Z)` against the coordinate flag.
pub fn schubert_symbol(z: &Mat) -> Result<SchubertSymbol> {
    schubert_symbol_with(z, &Tolerances::default())
}

pub fn schubert_symbol_with(z: &Mat, tol: &Tolerances) -> Result<SchubertSymbol> {
    let q = orthonormal_basis(z)?;
    let (n, m) = q.shape();
    let mut jumps = Vec::with_capacity(m);
    // dim(V ∩ U_l) = m − rank of the rows below l
    for l in 1..=n {
        let below = q.rows_from(l);
        let r = if below.rows() == 0 { 0 } else { numerical_rank(&below, tol)? };
        let meet = m - r;
        while jumps.len() < meet {
            jumps.push(l);
        }
    }
    Ok(SchubertSymbol { jumps })
}

fn check_morse_diagonal(a: &Mat, increasing: bool) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Dimension("A must be square".into()));
    }
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            let q = a[(i, j)];
            if (i != j && q.abs() != 0.0) || q.imag_abs() != 0.0 {
                return Err(Error::Precondition("A must be a real diagonal matrix".into()));
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    if d.iter().any(|&x| x <= 0.0) {
        return Err(Error::Precondition("A must have positive diagonal".into()));
    }
    let mut sorted = d.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("A must have distinct diagonal entries".into()));
    }
    if increasing && sorted != d {
        return Err(Error::Precondition("A must have increasing diagonal".into()));
    }
    Ok(d)
}

/// Cell of `X ∈ G` for the height function of `A = diag(a)`, `0 < a₁ < … < aₙ`.
pub fn classify(x: &Mat, a: &Mat) -> Result<CellId> {
    classify_with(x, a, &Tolerances::default())
}

pub fn classify_with(x: &Mat, a: &Mat, tol: &Tolerances) -> Result<CellId> {
    if x.shape() != a.shape() {
        return Err(Error::Dimension(format!("X is {}x{} but A is {}x{}", x.rows(), x.cols(), a.rows(), a.cols())));
    }
    check_morse_diagonal(a, true)?;
    let r = x.unitarity_defect();
    if !(r <= tol.membership) {
        return Err(Error::Precondition(format!("X is not in the group (residual {r:.3e})")));
    }
    let n = x.rows();
    let s = svd(&(x + &Mat::identity(x.field(), n)))?;
    let mut keep = Vec::new();
    for (k, &sigma) in s.sigma.iter().enumerate() {
        if sigma >= tol.ambiguity {
            keep.push(k);
        } else if sigma >= tol.minus_one {
            return Err(Error::Ambiguous(format!("eigenvalue at distance {sigma:.3e} from -1")));
        }
    }
    if keep.is_empty() {
        return Ok(CellId::new(SchubertSymbol { jumps: Vec::new() }));
    }
    let w = s.v.columns(keep);
    Ok(CellId::new(schubert_symbol_with(&w, tol)?))
}

/// Every cell of the group of `n×n` matrices, ordered by jump sets.
pub fn enumerate_cells(n: usize) -> Vec<CellId> {
    let mut cells: Vec<CellId> = (0u32..1 << n)
        .map(|bits| {
            let jumps = (1..=n).filter(|j| bits >> (j - 1) & 1 == 1).collect();
            CellId::new(SchubertSymbol { jumps })
        })
        .collect();
    cells.sort();
    cells
}

/// Nearest critical point `diag(ε)` to `X`, if within distance `0.5`.
pub fn nearest_critical(x: &Mat) -> Option<SignVector> {
    let n = x.rows();
    let eps: Vec<i8> = (0..n).map(|i| if x[(i, i)].re >= 0.0 { 1 } else { -1 }).collect();
    let eps = SignVector::new(eps).ok()?;
    let d = (x - &eps.to_matrix(x.field())).norm();
    (d < 0.5).then_some(eps)
}

/// A group element whose `−1`-eigenspace is a random `k`-plane and whose other
/// eigenvalues stay at least `0.1` away from `−1`.
pub fn sample_with_minus_one_dim(rng: &mut impl Rng, field: Field, n: usize, k: usize) -> Mat {
    assert!(k <= n);
    if k == 0 {
        loop {
            let x = haar(rng, field, n);
            if sigma_min(&(&x + &Mat::identity(field, n))).is_ok_and(|s| s > 0.1) {
                return x;
            }
        }
    }
    loop {
        let q1 = random_subspace(rng, field, n, k);
        let Ok(full) = orthonormalize(&q1.hstack(&gaussian(rng, field, n, n - k))) else {
            continue;
        };
        let q2 = full.columns(k..n);
        let rot = haar(rng, field, n - k);
        if n > k && !sigma_min(&(&rot + &Mat::identity(field, n - k))).is_ok_and(|s| s > 0.1) {
            continue;
        }
        let minus = -(&q1 * &q1.conj_transpose());
        return &minus + &(&(&q2 * &rot) * &q2.conj_transpose());
    }
}

/// Critical point `diag(ε)` that the flow from `x0` settles at, read off the
/// trajectory up to time `t_max` as its first close approach.
///
/// Points of lower cells are only approximately in their cell once stored, and
/// rounding carries them away from the critical point they approach. The
/// dimension of the `−1`-eigenspace of `x0` is constant along the flow, so it
/// is restored exactly after every step.
pub fn flow_limit(a: &Mat, x0: &Mat, t_max: f64) -> Result<Option<SignVector>> {
    let eig = herm_eig(a)?;
    let rate = eig.values.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(1e-3);
    let dt = 0.25 / rate;
    let mut x = x0.clone();
    let mut t = 0.0;
    let mut best: Option<(SignVector, f64)> = None;
    let id = Mat::identity(x0.field(), x0.rows());
    let k = singular_values(&(x0 + &id))?.iter().filter(|&&s| s < Tolerances::default().minus_one).count();
    loop {
        if let Some(eps) = nearest_critical(&x) {
            let d = (&x - &eps.to_matrix(x.field())).norm();
            if d < 1e-10 {
                return Ok(Some(eps));
            }
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((eps, d));
            }
        }
        if let Some((eps, d)) = &best {
            let cur = nearest_critical(&x).map_or(f64::INFINITY, |e| (&x - &e.to_matrix(x.field())).norm());
            if *d < APPROACH && cur > 10.0 * d {
                return Ok(Some(eps.clone()));
            }
        }
        if t >= t_max {
            return Ok(best.filter(|b| b.1 < APPROACH).map(|b| b.0));
        }
        x = closed_flow_eig(&eig, &x, dt)?;
        if k > 0 {
            x = snap_minus_one(&x, k)?;
        }
        t += dt;
    }
}

/// Restores an exact `−1`-eigenspace of dimension `k` on a unitary `x`.
fn snap_minus_one(x: &Mat, k: usize) -> Result<Mat> {
    let n = x.rows();
    let id = Mat::identity(x.field(), n);
    let w = svd(&(x + &id))?.v.columns(n - k..n);
    let p = projector(&w);
    unitary_factor(&(&(x * &(&id - &p)) - &p))
}

const APPROACH: f64 = 0.02;

/// Result of comparing flow limits under two commuting height functions.
#[derive(Clone, Debug, Serialize)]
pub struct SharedDecompositionReport {
    pub samples: usize,
    pub matches: usize,
    pub mismatches: usize,
    /// Points whose trajectory did not settle within the time limit.
    pub inconclusive: usize,
    pub passed: bool,
}

/// Flows seeded points of the group under `A1` and `A2` (diagonal, distinct
/// positive entries) and compares the critical points they approach.
///
/// Points are drawn with `−1`-eigenspaces of every dimension `0..n`, so lower
/// cells are exercised; limits are read with [`flow_limit`].
pub fn shared_decomposition_check(
    a1: &Mat,
    a2: &Mat,
    field: Field,
    samples: usize,
    seed: u64,
) -> Result<SharedDecompositionReport> {
    if a1.shape() != a2.shape() {
        return Err(Error::Dimension("A1 and A2 differ in shape".into()));
    }
    let d1 = check_morse_diagonal(a1, false)?;
    check_morse_diagonal(a2, false)?;
    let n = d1.len();
    let a1 = a1.promote(a1.field().max(field));
    let a2 = a2.promote(a2.field().max(field));
    let mut g = rng(seed);
    let points: Vec<Mat> = (0..samples).map(|s| sample_with_minus_one_dim(&mut g, field, n, s % n)).collect();
    let limits: Vec<(Option<SignVector>, Option<SignVector>)> = points
        .par_iter()
        .map(|x0| Ok((flow_limit(&a1, x0, LIMIT_TIME)?, flow_limit(&a2, x0, LIMIT_TIME)?)))
        .collect::<Result<_>>()?;
    let mut report = SharedDecompositionReport { samples, matches: 0, mismatches: 0, inconclusive: 0, passed: false };
    for pair in limits {
        match pair {
            (Some(p), Some(q)) if p == q => report.matches += 1,
            (Some(_), Some(_)) => report.mismatches += 1,
            _ => report.inconclusive += 1,
        }
    }
    report.passed = report.mismatches == 0 && report.inconclusive == 0;
    Ok(report)
}

const LIMIT_TIME: f64 = 200.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Quat;

    #[test]
    fn coordinate_symbol() {
        let e = Mat::identity(Field::R, 4);
        let z = e.columns([0, 2]);
        assert_eq!(schubert_symbol(&z).unwrap().jumps, vec![1, 3]);
    }

    #[test]
    fn diagonal_line_symbol() {
        let z = Mat::from_rows(&[&[1.0], &[1.0], &[0.0]]);
        assert_eq!(schubert_symbol(&z).unwrap().jumps, vec![2]);
    }

    #[test]
    fn partitions_round_trip() {
        let s = SchubertSymbol::new(vec![2, 3, 6], 6).unwrap();
        assert_eq!(s.to_partition(), vec![3, 1, 1]);
        assert_eq!(SchubertSymbol::from_partition(&[3, 1, 1], 6).unwrap(), s);
        assert!(SchubertSymbol::new(vec![2, 2], 4).is_err());
    }

    #[test]
    fn cell_dimensions() {
        let big = SchubertSymbol::new(vec![3, 4], 4).unwrap();
        assert_eq!(big.grassmann_cell_dim(Field::C), 8);
        let zero = SchubertSymbol::new(vec![1, 2], 4).unwrap();
        assert_eq!(zero.grassmann_cell_dim(Field::C), 0);
        let top = CellId::new(SchubertSymbol::new(vec![1, 2, 3], 3).unwrap());
        assert_eq!(top.group_cell_dim(Field::C), 9);
    }

    #[test]
    fn classify_coordinate_points() {
        let a = Mat::diag_real(Field::R, &[1.0, 2.0, 3.0]);
        let x = Mat::diag_real(Field::R, &[1.0, -1.0, 1.0]);
        let c = classify(&x, &a).unwrap();
        assert_eq!((c.m, c.symbol.jumps.clone()), (2, vec![1, 3]));
        let c = classify(&Mat::identity(Field::R, 3).scale(-1.0), &a).unwrap();
        assert_eq!(c.m, 0);
        assert!(c.symbol.jumps.is_empty());
    }

    #[test]
    fn ambiguity_band_raises() {
        let a = Mat::diag_real(Field::C, &[1.0, 2.0]);
        let th = std::f64::consts::PI - 1e-5;
        let x = Mat::diag(Field::C, &[Quat::complex(th.cos(), th.sin()), Quat::ONE]);
        assert!(matches!(classify(&x, &a), Err(Error::Ambiguous(_))));
    }

    #[test]
    fn indeterminate_rank_raises() {
        let z = Mat::from_rows(&[&[1.0], &[1e-8]]);
        assert!(matches!(schubert_symbol(&z), Err(Error::Indeterminate(_))));
    }

    #[test]
    fn cell_json() {
        let c = CellId::new(SchubertSymbol::new(vec![1, 3], 3).unwrap());
        assert_eq!(c.to_json(), r#"{"jumps":[1,3],"m":2}"#);
        assert_eq!(CellId::from_json(&c.to_json()).unwrap(), c);
        assert!(CellId::from_json(r#"{"m":1,"jumps":[1,2]}"#).is_err());
        assert!(CellId::from_json(r#"{"m":2,"jumps":[2,1]}"#).is_err());
    }

    #[test]
    fn cells_match_critical_points() {
        let eps = SignVector::new(vec![-1, 1, 1]).unwrap();
        let c = CellId::from_critical_point(&eps);
        assert_eq!(c.critical_point(3).unwrap(), eps);
        assert_eq!(enumerate_cells(3).len(), 8);
    }
}
