//! Dense complex matrices in row-major layout.
//!
//! Basis-state convention used everywhere in the crate: qubit 0 is the most
//! significant bit of a basis index, so `|q0 q1>` sits at index `2*q0 + q1`,
//! and `a.kron(&b)` acts with `a` on qubit 0.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite matrix entry".into()));
        }
        Ok(CMat { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let m = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.as_ref().len(), m, "ragged matrix literal");
            data.extend_from_slice(r.as_ref());
        }
        CMat { rows: n, cols: m, data }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cr: Vec<Vec<C64>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&x| c(x, 0.0)).collect()).collect();
        CMat::from_rows(&cr)
    }

    pub fn column(v: &[C64]) -> Self {
        CMat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = CMat::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn real_diag(d: &[f64]) -> Self {
        CMat::diag(&d.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    /// `|v><v|` for a column vector given as a slice.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn from_cols(cols: &[Vec<C64>]) -> Self {
        let n = cols[0].len();
        let mut m = CMat::zeros(n, cols.len());
        for (j, v) in cols.iter().enumerate() {
            m.set_col(j, v);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * rho * self^dagger`.
    pub fn sandwich(&self, rho: &CMat) -> CMat {
        self.matmul(rho).matmul(&self.adjoint())
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let (r, cc) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = CMat::zeros(r, cc);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn hermitian_part(&self) -> CMat {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm())).unwrap();
            if a[piv * n + k].norm() == 0.0 {
                return ZERO;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pv = a[k * n + k];
            det *= pv;
            for i in k + 1..n {
                let f = a[i * n + k] / pv;
                for j in k..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        det
    }

    /// `||U^dagger U - I||_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&CMat::identity(self.rows))
    }

    /// Expectation `<v|self|v>` for a vector slice.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        inner(v, &mv)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `<a|b>` (conjugate-linear in the first argument).
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|z| z / n).collect()
}

/// Kronecker product of two state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Multiplies `b` by the phase that maximises `Re<a|b>`, so that the result
/// can be compared entrywise with `a`.
pub fn align_phase(a: &[C64], b: &[C64]) -> Vec<C64> {
    let ov = inner(b, a);
    if ov.norm() < 1e-300 {
        return b.to_vec();
    }
    let ph = ov / ov.norm();
    b.iter().map(|z| z * ph).collect()
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn mul(self, rhs: &'a CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn add(self, rhs: &'a CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn sub(self, rhs: &'a CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct CMatJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CMatJson {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CMatJson::deserialize(d)?;
        if j.re.len() != j.im.len() {
            return Err(serde::de::Error::custom("re and im lengths differ"));
        }
        let data = j.re.iter().zip(&j.im).map(|(&r, &i)| c(r, i)).collect();
        CMat::from_vec(j.rows, j.cols, data).map_err(serde::de::Error::custom)
    }
}
