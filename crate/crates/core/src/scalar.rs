//! Scalars over R, C and H.
//!
//! Every matrix entry is stored as a quaternion `re + i·i + j·j + k·k`. The
//! reals and complex numbers are the subalgebras spanned by `{1}` and
//! `{1, i}`, so a single (associative, non-commutative) multiplication covers
//! all three fields and the [`Field`] tag only records which components may be
//! nonzero.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// The base field `k` of a matrix space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
    H,
}

impl Field {
    /// Real dimension of the field (1, 2 or 4).
    pub fn dim(self) -> usize {
        match self {
            Field::R => 1,
            Field::C => 2,
            Field::H => 4,
        }
    }

    /// Smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        self.max(other)
    }

    /// The real basis `{1, i, j, k}` truncated to this field.
    pub fn units(self) -> &'static [Quat] {
        &Quat::UNITS[..self.dim()]
    }

    /// Purely imaginary units of the field.
    pub fn imaginary_units(self) -> &'static [Quat] {
        &Quat::UNITS[1..self.dim()]
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::R => "R",
            Field::C => "C",
            Field::H => "H",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" => Ok(Field::R),
            "C" | "c" => Ok(Field::C),
            "H" | "h" => Ok(Field::H),
            other => Err(format!("unknown field `{other}` (expected R, C or H)")),
        }
    }
}

/// A quaternion `re + i·i + j·j + k·k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quat {
    pub re: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);
    pub const UNITS: [Quat; 4] = [Quat::ONE, Quat::I, Quat::J, Quat::K];

    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Quat { re, i, j, k }
    }

    pub const fn real(re: f64) -> Self {
        Quat::new(re, 0.0, 0.0, 0.0)
    }

    pub const fn complex(re: f64, im: f64) -> Self {
        Quat::new(re, im, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Quat::new(self.re, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn abs(self) -> f64 {
        // hypot-style scaling keeps tiny entries from underflowing
        let m = self.re.abs().max(self.i.abs()).max(self.j.abs()).max(self.k.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let s = Quat::new(self.re / m, self.i / m, self.j / m, self.k / m);
        m * s.norm_sqr().sqrt()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            None
        } else {
            Some(self.conj().scale(1.0 / n))
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Quat::new(self.re * s, self.i * s, self.j * s, self.k * s)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.i.is_finite() && self.j.is_finite() && self.k.is_finite()
    }

    /// Smallest field containing this value (exact test on components).
    pub fn field(self) -> Field {
        if self.j != 0.0 || self.k != 0.0 {
            Field::H
        } else if self.i != 0.0 {
            Field::C
        } else {
            Field::R
        }
    }

    /// Components as an array `[re, i, j, k]`.
    pub fn to_array(self) -> [f64; 4] {
        [self.re, self.i, self.j, self.k]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quat::new(a[0], a[1], a[2], a[3])
    }

    /// Imaginary part magnitude, i.e. distance from the real line.
    pub fn imag_abs(self) -> f64 {
        Quat::new(0.0, self.i, self.j, self.k).abs()
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.re + o.re, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.re - o.re, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.re, -self.i, -self.j, -self.k)
    }
}

impl Mul for Quat {
    type Output = Quat;
    #[inline]
    fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.re * o.re - self.i * o.i - self.j * o.j - self.k * o.k,
            self.re * o.i + self.i * o.re + self.j * o.k - self.k * o.j,
            self.re * o.j - self.i * o.k + self.j * o.re + self.k * o.i,
            self.re * o.k + self.i * o.j - self.j * o.i + self.k * o.re,
        )
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        self.scale(s)
    }
}

impl Div<f64> for Quat {
    type Output = Quat;
    fn div(self, s: f64) -> Quat {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quat {
    fn add_assign(&mut self, o: Quat) {
        *self = *self + o;
    }
}

impl SubAssign for Quat {
    fn sub_assign(&mut self, o: Quat) {
        *self = *self - o;
    }
}

impl MulAssign<f64> for Quat {
    fn mul_assign(&mut self, s: f64) {
        *self = self.scale(s);
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.re, self.i, self.j, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quat() -> impl Strategy<Value = Quat> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
            .prop_map(|(a, b, c, d)| Quat::new(a, b, c, d))
    }

    fn close(a: Quat, b: Quat) -> bool {
        (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn hamilton_relations() {
        assert_eq!(Quat::I * Quat::I, -Quat::ONE);
        assert_eq!(Quat::J * Quat::J, -Quat::ONE);
        assert_eq!(Quat::K * Quat::K, -Quat::ONE);
        assert_eq!(Quat::I * Quat::J, Quat::K);
        assert_eq!(Quat::J * Quat::I, -Quat::K);
        assert_eq!(Quat::J * Quat::K, Quat::I);
        assert_eq!(Quat::K * Quat::I, Quat::J);
    }

    #[test]
    fn complex_subalgebra_is_closed() {
        let a = Quat::complex(1.5, -2.0);
        let b = Quat::complex(0.25, 3.0);
        let p = a * b;
        assert_eq!(p.field(), Field::C);
        assert_eq!(p, Quat::complex(1.5 * 0.25 + 6.0, 4.5 - 0.5));
        assert_eq!(p, b * a);
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(Quat::ZERO.inv().is_none());
        let q = Quat::new(1.0, 2.0, -1.0, 0.5);
        assert!(close(q * q.inv().unwrap(), Quat::ONE));
    }

    #[test]
    fn field_parsing() {
        assert_eq!("H".parse::<Field>().unwrap(), Field::H);
        assert!("Q".parse::<Field>().is_err());
        assert_eq!(Field::R.join(Field::H), Field::H);
    }

    proptest! {
        #[test]
        fn conjugation_is_an_involution(q in quat()) {
            prop_assert_eq!(q.conj().conj(), q);
            prop_assert!((q.conj().abs() - q.abs()).abs() < 1e-12);
        }

        #[test]
        fn conj_reverses_products(p in quat(), q in quat()) {
            prop_assert!(close((p * q).conj(), q.conj() * p.conj()));
        }

        #[test]
        fn multiplication_is_associative(p in quat(), q in quat(), r in quat()) {
            prop_assert!(close((p * q) * r, p * (q * r)));
        }

        #[test]
        fn norm_is_multiplicative(p in quat(), q in quat()) {
            prop_assert!(((p * q).abs() - p.abs() * q.abs()).abs() < 1e-10 * (1.0 + p.abs() * q.abs()));
        }
    }
}
