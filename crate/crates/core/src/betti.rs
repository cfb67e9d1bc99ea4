//! Exact integer polynomials and the cell-count identities for groups,
//! Grassmannians and compact symmetric spaces.
//!
//! Over R every polynomial here counts cells, i.e. it is a Z₂ Poincaré
//! polynomial; nothing is claimed about integral homology of O(n).

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::morse::{index_generating_polynomial, space_index_polynomial, SymmetricKind};
use crate::scalar::Field;

/// Polynomial in one variable with nonnegative arbitrary-precision coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigUint>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `t^deg`.
    pub fn monomial(deg: usize) -> Self {
        let mut coeffs = vec![BigUint::zero(); deg + 1];
        coeffs[deg] = BigUint::one();
        IntPolynomial { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<BigUint>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigUint {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `t^k · self`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigUint::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs }
    }

    /// `p(t^step)`.
    pub fn substitute_power(&self, step: usize) -> Self {
        assert!(step >= 1);
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigUint::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * step] = c.clone();
        }
        IntPolynomial { coeffs }
    }

    /// Sum of coefficients, i.e. the value at `t = 1`.
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    /// Adds `c · t^deg` in place.
    pub fn add_term(&mut self, deg: usize, c: &BigUint) {
        if c.is_zero() {
            return;
        }
        if self.coeffs.len() <= deg {
            self.coeffs.resize(deg + 1, BigUint::zero());
        }
        self.coeffs[deg] += c;
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    /// `{"coeffs":["…", …]}` with decimal-string coefficients.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("serializable")
    }

    pub fn to_value(&self) -> Value {
        let list: Vec<Value> = self.coeffs.iter().map(|c| Value::String(c.to_string())).collect();
        serde_json::json!({ "coeffs": list })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("polynomial JSON: {e}")))?;
        let obj = v.as_object().ok_or_else(|| Error::Parse("polynomial must be a JSON object".into()))?;
        if obj.len() != 1 {
            return Err(Error::Parse("polynomial object must have exactly the key `coeffs`".into()));
        }
        let list = obj
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array `coeffs`".into()))?;
        let mut coeffs = Vec::with_capacity(list.len());
        for item in list {
            let s = item
                .as_str()
                .ok_or_else(|| Error::Parse(format!("coefficient {item} must be a decimal string")))?;
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("coefficient `{s}` is not a nonnegative decimal integer")));
            }
            coeffs.push(s.parse::<BigUint>().map_err(|e| Error::Parse(e.to_string()))?);
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        IntPolynomial::from_json(&v.to_string()).map_err(serde::de::Error::custom)
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect();
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, o: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || o.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigUint::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Add for IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, o: IntPolynomial) -> IntPolynomial {
        &self + &o
    }
}

impl Mul for IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, o: IntPolynomial) -> IntPolynomial {
        &self * &o
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coef = if c.is_one() && i > 0 { String::new() } else { c.to_string() };
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{coef}t")?,
                _ => write!(f, "{coef}t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

/// `Π (1 + t^e)` over the given exponents.
pub fn product_of_binomials(exponents: impl IntoIterator<Item = usize>) -> IntPolynomial {
    exponents.into_iter().fold(IntPolynomial::one(), |acc, e| {
        &acc * &(&IntPolynomial::one() + &IntPolynomial::monomial(e))
    })
}

/// Gaussian binomial `[n choose k]_q` at `q = t^step`, by the Pascal recursion
/// `[n k] = [n−1 k] + q^{n−k} [n−1 k−1]`.
pub fn gaussian_binomial(n: usize, k: usize, step: usize) -> Result<IntPolynomial> {
    if k > n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds n = {n}")));
    }
    if step == 0 {
        return Err(Error::OutOfRange("step must be at least 1".into()));
    }
    // row[j] holds [m j] for the current m
    let mut row = vec![IntPolynomial::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let keep = if j < m { row[j].clone() } else { IntPolynomial::zero() };
            let add = if j > 0 { row[j - 1].shift(m - j) } else { IntPolynomial::zero() };
            next.push(&keep + &add);
        }
        row = next;
    }
    Ok(row[k].substitute_power(step))
}

/// Cell-count polynomial of the Grassmannian of `k`-planes in `kⁿ`.
pub fn poincare_grassmannian(n: usize, k: usize, field: Field) -> Result<IntPolynomial> {
    gaussian_binomial(n, k, field.dim())
}

/// Degree shift of the `k`-th Grassmannian piece of the group decomposition:
/// `k(k−1)/2`, `k²`, `k(2k+1)` for O, U, Sp.
pub fn group_shift(k: usize, field: Field) -> usize {
    match field {
        Field::R => k * (k.max(1) - 1) / 2,
        Field::C => k * k,
        Field::H => k * (2 * k + 1),
    }
}

/// `Σ_{k=0}^n t^{shift(k)} [n k]_{t^step}`.
pub fn decomposition_rhs(n: usize, step: usize, shift: impl Fn(usize) -> usize) -> Result<IntPolynomial> {
    let mut total = IntPolynomial::zero();
    for k in 0..=n {
        total = &total + &gaussian_binomial(n, k, step)?.shift(shift(k));
    }
    Ok(total)
}

/// Both sides of a polynomial identity and whether they agree exactly.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub lhs: IntPolynomial,
    pub rhs: IntPolynomial,
    pub passed: bool,
}

impl IdentityReport {
    fn new(identity: String, lhs: IntPolynomial, rhs: IntPolynomial) -> Self {
        let passed = lhs == rhs;
        IdentityReport { identity, lhs, rhs, passed }
    }

    /// Degrees where the two sides differ, with both coefficients.
    pub fn differences(&self) -> Vec<(usize, BigUint, BigUint)> {
        let n = self.lhs.coeffs().len().max(self.rhs.coeffs().len());
        (0..n)
            .filter_map(|i| {
                let (l, r) = (self.lhs.coeff(i), self.rhs.coeff(i));
                (l != r).then_some((i, l, r))
            })
            .collect()
    }
}

const MAX_VERIFY_N: usize = 12;

fn check_n(n: usize) -> Result<()> {
    if n > MAX_VERIFY_N {
        return Err(Error::OutOfRange(format!("n = {n} exceeds {MAX_VERIFY_N}")));
    }
    Ok(())
}

/// Critical-point count polynomial of the group equals the shifted sum of
/// Grassmannian cell counts.
pub fn verify_group_decomposition(n: usize, field: Field) -> Result<IdentityReport> {
    check_n(n)?;
    let lhs = index_generating_polynomial(n, field)?;
    let rhs = decomposition_rhs(n, field.dim(), |k| group_shift(k, field))?;
    let name = match field {
        Field::R => "O",
        Field::C => "U",
        Field::H => "Sp",
    };
    Ok(IdentityReport::new(format!("{name}({n})"), lhs, rhs))
}

/// The four symmetric-space identities, in the order U(n)/O(n), O(2n)/U(n),
/// U(2n)/Sp(n), Sp(n)/U(n).
pub fn verify_symmetric_space_decompositions(n: usize) -> Result<Vec<IdentityReport>> {
    check_n(n)?;
    SymmetricKind::ALL
        .iter()
        .map(|&kind| {
            let lhs = space_index_polynomial(kind, n)?;
            let rhs = decomposition_rhs(n, kind.grassmann_field().dim(), |k| kind.shift(k))?;
            Ok(IdentityReport::new(kind.label(n), lhs, rhs))
        })
        .collect()
}

/// q-Vandermonde splitting of a Grassmannian along `n = n1 + n2`.
pub fn verify_grassmann_split(n: usize, n1: usize, n2: usize, k: usize, field: Field) -> Result<IdentityReport> {
    if n1 + n2 != n {
        return Err(Error::Dimension(format!("{n1} + {n2} != {n}")));
    }
    if k > n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds n = {n}")));
    }
    let d = field.dim();
    let lhs = poincare_grassmannian(n, k, field)?;
    let mut rhs = IntPolynomial::zero();
    for k1 in 0..=k.min(n1) {
        let k2 = k - k1;
        if k2 > n2 {
            continue;
        }
        let term = &poincare_grassmannian(n1, k1, field)? * &poincare_grassmannian(n2, k2, field)?;
        rhs = &rhs + &term.shift(d * (n1 - k1) * k2);
    }
    Ok(IdentityReport::new(format!("G({n},{k},{field}) split {n1}+{n2}"), lhs, rhs))
}
