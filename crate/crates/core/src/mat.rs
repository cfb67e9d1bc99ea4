//! Dense matrices over R, C or H.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::{Field, Quat};

/// A dense row-major matrix whose entries live in `field`.
///
/// Arithmetic operators panic on shape mismatch (as slicing does); the
/// checked entry points of the public API validate shapes first and return
/// [`Error::Dimension`]. Mixed-field arithmetic promotes to the larger field.
#[derive(Clone, PartialEq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Quat>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat { field, rows, cols, data: vec![Quat::ZERO; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = Quat::ONE;
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { field, rows, cols, data }.with_field_checked()
    }

    /// Builds from row-major entries; the entries must lie in `field`.
    pub fn from_entries(field: Field, rows: usize, cols: usize, data: Vec<Quat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(q) = data.iter().find(|q| !q.is_finite()) {
            return Err(Error::Parse(format!("non-finite entry {q}")));
        }
        if let Some(q) = data.iter().find(|q| q.field() > field) {
            return Err(Error::Parse(format!("entry {q} does not lie in field {field}")));
        }
        Ok(Mat { field, rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols, "from_real: wrong number of values");
        Mat { field: Field::R, rows, cols, data: values.iter().map(|&v| Quat::real(v)).collect() }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let flat: Vec<f64> = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Mat::from_real(r, c, &flat)
    }

    pub fn diag_real(field: Field, values: &[f64]) -> Self {
        let mut m = Mat::zeros(field, values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Quat::real(v);
        }
        m
    }

    pub fn diag(field: Field, values: &[Quat]) -> Self {
        let mut m = Mat::zeros(field, values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m.with_field_checked()
    }

    fn with_field_checked(mut self) -> Self {
        let needed = self.data.iter().map(|q| q.field()).max().unwrap_or(Field::R);
        if needed > self.field {
            self.field = needed;
        }
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Quat] {
        &self.data
    }

    /// Reinterprets the matrix over a larger field. Narrowing is refused.
    pub fn promote(&self, field: Field) -> Mat {
        assert!(field >= self.field, "promote cannot narrow {} to {}", self.field, field);
        Mat { field, ..self.clone() }
    }

    /// Retags the matrix with the smallest field containing its entries.
    pub fn tightened(&self) -> Mat {
        let field = self.data.iter().map(|q| q.field()).max().unwrap_or(Field::R);
        Mat { field, ..self.clone() }
    }

    pub fn conj_transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Mat {
        Mat { data: self.data.iter().map(|q| q.conj()).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { data: self.data.iter().map(|q| q.scale(s)).collect(), ..self.clone() }
    }

    /// `q · M` with the scalar on the left.
    pub fn left_scale(&self, q: Quat) -> Mat {
        Mat { data: self.data.iter().map(|&x| q * x).collect(), ..self.clone() }.with_field_checked()
    }

    /// `M · q` with the scalar on the right.
    pub fn right_scale(&self, q: Quat) -> Mat {
        Mat { data: self.data.iter().map(|&x| x * q).collect(), ..self.clone() }.with_field_checked()
    }

    pub fn trace(&self) -> Quat {
        (0..self.rows.min(self.cols)).fold(Quat::ZERO, |acc, i| acc + self[(i, i)])
    }

    /// `Re Tr(M)`.
    pub fn re_trace(&self) -> f64 {
        self.trace().re
    }

    /// `Re Tr(self* · other)` computed without forming the product.
    pub fn dot(&self, other: &Mat) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dot: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.i * b.i + a.j * b.j + a.k * b.k)
            .sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let s: f64 = self.data.iter().map(|q| q.scale(1.0 / m).norm_sqr()).sum();
        m * s.sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    pub fn row(&self, i: usize) -> &[Quat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Mat {
        Mat::from_fn(self.field, self.rows, 1, |i, _| self[(i, j)])
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, cols: impl IntoIterator<Item = usize>) -> Mat {
        let idx: Vec<usize> = cols.into_iter().collect();
        Mat::from_fn(self.field, self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// Rows `from..` as a new matrix.
    pub fn rows_from(&self, from: usize) -> Mat {
        let r = self.rows.saturating_sub(from);
        Mat::from_fn(self.field, r, self.cols, |i, j| self[(i + from, j)])
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(self.field, rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        self.field = self.field.join(b.field);
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack: row mismatch");
        let field = self.field.join(other.field);
        Mat::from_fn(field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let field = self.field.join(other.field);
        let mut m = Mat::zeros(field, self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    /// Multiplies row `i` by the real `d[i]` (i.e. `diag(d) · M`).
    pub fn scale_rows(&self, d: &[f64]) -> Mat {
        assert_eq!(d.len(), self.rows);
        Mat::from_fn(self.field, self.rows, self.cols, |i, j| self[(i, j)].scale(d[i]))
    }

    /// Multiplies column `j` by the real `d[j]` (i.e. `M · diag(d)`).
    pub fn scale_cols(&self, d: &[f64]) -> Mat {
        assert_eq!(d.len(), self.cols);
        Mat::from_fn(self.field, self.rows, self.cols, |i, j| self[(i, j)].scale(d[j]))
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Mat {
        (self + &self.conj_transpose()).scale(0.5)
    }

    /// `‖M − M*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        (self - &self.conj_transpose()).norm()
    }

    /// `‖M*M − I‖_F`, the group-membership residual.
    pub fn unitarity_defect(&self) -> f64 {
        let g = &self.conj_transpose() * self;
        (&g - &Mat::identity(self.field, self.cols)).norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() <= tol * self.norm().max(1.0)
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    ///
    /// Row operations multiply by scalars on the left, which keeps the
    /// elimination valid over the quaternions.
    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular("zero matrix".into()));
        }
        let mut a = self.clone();
        let mut inv = Mat::identity(self.field, n);
        for col in 0..n {
            let (pivot, pmag) = (col..n)
                .map(|r| (r, a[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= 1e-14 * scale * n as f64 {
                return Err(Error::Singular(format!("pivot {pmag:.3e} in column {col}")));
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p_inv = a[(col, col)].inv().expect("nonzero pivot");
            for j in 0..n {
                a[(col, j)] = p_inv * a[(col, j)];
                inv[(col, j)] = p_inv * inv[(col, j)];
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let m = a[(r, col)];
                if m == Quat::ZERO {
                    continue;
                }
                for j in 0..n {
                    let av = a[(col, j)];
                    let iv = inv[(col, j)];
                    a[(r, j)] -= m * av;
                    inv[(r, j)] -= m * iv;
                }
            }
        }
        Ok(inv)
    }

    /// `self · d⁻¹`.
    pub fn right_divide(&self, d: &Mat) -> Result<Mat> {
        Ok(self * &d.inverse()?)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Standard complex `2n×2m` image of a quaternionic matrix:
    /// `A + B·j ↦ [[A, B], [−B̄, Ā]]`.
    pub fn to_complex_rep(&self) -> Mat {
        let (r, c) = self.shape();
        let mut out = Mat::zeros(Field::C, 2 * r, 2 * c);
        for i in 0..r {
            for j in 0..c {
                let q = self[(i, j)];
                let a = Quat::complex(q.re, q.i);
                let b = Quat::complex(q.j, q.k);
                out[(i, j)] = a;
                out[(i, c + j)] = b;
                out[(r + i, j)] = -b.conj();
                out[(r + i, c + j)] = a.conj();
            }
        }
        out
    }

    /// Inverse of [`Mat::to_complex_rep`]; reads the top block row.
    pub fn from_complex_rep(m: &Mat) -> Result<Mat> {
        if !m.rows.is_multiple_of(2) || !m.cols.is_multiple_of(2) {
            return Err(Error::Dimension("complex representation needs even dimensions".into()));
        }
        let (r, c) = (m.rows / 2, m.cols / 2);
        Ok(Mat::from_fn(Field::H, r, c, |i, j| {
            let a = m[(i, j)];
            let b = m[(i, c + j)];
            Quat::new(a.re, a.i, b.re, b.i)
        }))
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Quat;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Quat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quat {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn add(self, o: &Mat) -> Mat {
        assert_eq!(self.shape(), o.shape(), "add: shape mismatch");
        Mat {
            field: self.field.join(o.field),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<'a> Sub<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn sub(self, o: &Mat) -> Mat {
        assert_eq!(self.shape(), o.shape(), "sub: shape mismatch");
        Mat {
            field: self.field.join(o.field),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<'a> Mul<&'a Mat> for &'a Mat {
    type Output = Mat;
    fn mul(self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "mul: inner dimension mismatch");
        let mut out = Mat::zeros(self.field.join(o.field), self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Quat::ZERO {
                    continue;
                }
                let orow = &o.data[k * o.cols..(k + 1) * o.cols];
                let dst = &mut out.data[i * o.cols..(i + 1) * o.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * *b;
                }
            }
        }
        out
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Mat> for Mat {
            type Output = Mat;
            fn $f(self, o: Mat) -> Mat {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a Mat> for Mat {
            type Output = Mat;
            fn $f(self, o: &Mat) -> Mat {
                (&self).$f(o)
            }
        }
        impl<'a> $tr<Mat> for &'a Mat {
            type Output = Mat;
            fn $f(self, o: Mat) -> Mat {
                self.$f(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(-1.0)
    }
}

impl AddAssign<&Mat> for Mat {
    fn add_assign(&mut self, o: &Mat) {
        *self = &*self + o;
    }
}

impl SubAssign<&Mat> for Mat {
    fn sub_assign(&mut self, o: &Mat) {
        *self = &*self - o;
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat<{}> {}x{} [", self.field, self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let q = self[(i, j)];
                match self.field {
                    Field::R => write!(f, "{:>12.6} ", q.re)?,
                    Field::C => write!(f, "{:>10.5}{:+.5}i ", q.re, q.i)?,
                    Field::H => write!(f, "({:.4},{:.4},{:.4},{:.4}) ", q.re, q.i, q.j, q.k)?,
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `Re Tr(X* Y)`, the ambient inner product, with shape and field checks.
pub fn inner(x: &Mat, y: &Mat) -> Result<f64> {
    if x.shape() != y.shape() {
        return Err(Error::Dimension(format!(
            "inner product of {}x{} and {}x{}",
            x.rows, x.cols, y.rows, y.cols
        )));
    }
    if x.field != y.field {
        return Err(Error::Dimension(format!("inner product across fields {} and {}", x.field, y.field)));
    }
    Ok(x.dot(y))
}
