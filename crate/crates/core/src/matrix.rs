//! Dense complex matrices stored row-major.
//!
//! [`ComplexMatrix`] is the single carrier type for every matrix in the
//! crate: path jets, block matrices, eigenvector bases and results. It is a
//! plain value type; all arithmetic returns new matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn scalar(z: C64) -> Self {
        Self { rows: 1, cols: 1, data: vec![z] }
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub(crate) fn ensure_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn real_part(&self) -> Self {
        self.map(|z| C64::new(z.re, 0.0))
    }

    pub fn imag_part(&self) -> Self {
        self.map(|z| C64::new(z.im, 0.0))
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other, "hadamard product")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * p..(k + 1) * p];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: n, cols: p, data: out })
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Spectral norm by power iteration on `XᴴX`.
    ///
    /// Stops when successive estimates of `σ²` agree to a relative `1e-12`
    /// or after 10 000 iterations.
    pub fn spectral_norm(&self) -> f64 {
        let fro = self.frobenius_norm();
        if fro == 0.0 {
            return 0.0;
        }
        let gram = self.adjoint().matmul(self).expect("conformable by construction");
        let n = gram.rows;
        // deterministic, generic start vector
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 0.1 * i as f64, 0.05 * (i as f64 + 1.0))).collect();
        let mut sigma2 = 0.0;
        for _ in 0..10_000 {
            let w = gram.matvec(&v).expect("square");
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let estimate = norm / vnorm;
            v = w.into_iter().map(|z| z / norm).collect();
            if (estimate - sigma2).abs() <= 1e-12 * estimate {
                sigma2 = estimate;
                break;
            }
            sigma2 = estimate;
        }
        sigma2.sqrt()
    }

    /// `‖self − selfᴴ‖_F / ‖self‖_F`, zero for the zero matrix.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)] == ZERO))
    }

    /// Copy of the `size × size` block at block coordinates `(bi, bj)`.
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Self {
        self.submatrix(bi * size, bj * size, size, size)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "submatrix out of range");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Writes `m` with its upper-left corner at `(r0, c0)`.
    pub fn set_submatrix(&mut self, r0: usize, c0: usize, m: &Self) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "submatrix out of range");
        for i in 0..m.rows {
            let dst = &mut self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + m.cols];
            dst.copy_from_slice(m.row(i));
        }
    }

    pub fn sub_frobenius(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − reference‖_F / ‖reference‖_F` (absolute when the reference is zero).
    pub fn rel_diff(&self, reference: &Self) -> f64 {
        let d = self.sub_frobenius(reference);
        let r = reference.frobenius_norm();
        if r == 0.0 {
            d
        } else {
            d / r
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Arithmetic operators panic on shape mismatch, like slice indexing. Use
// `matmul`/`hadamard` for the checked forms.

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self += &rhs;
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self -= &rhs;
        self
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::from_vec(2, 3, vec![ZERO; 6]).is_ok());
    }

    #[test]
    fn matmul_small() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1., 0.), c(0., 1.), c(2., 0.), c(0., 0.)]).unwrap();
        let b = ComplexMatrix::from_vec(2, 1, vec![c(1., 0.), c(1., 0.)]).unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.as_slice(), &[c(1., 1.), c(2., 0.)]);
        assert!(b.matmul(&a).is_err());
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_vec(1, 2, vec![c(1., 2.), c(3., -4.)]).unwrap();
        let ah = a.adjoint();
        assert_eq!((ah.rows(), ah.cols()), (2, 1));
        assert_eq!(ah[(0, 0)], c(1., -2.));
        assert_eq!(ah[(1, 0)], c(3., 4.));
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = ComplexMatrix::from_real_diagonal(&[1.0, -3.0, 2.0]);
        assert!((d.spectral_norm() - 3.0).abs() < 1e-10);
        assert_eq!(ComplexMatrix::zeros(3, 3).spectral_norm(), 0.0);
    }

    #[test]
    fn hermitian_defect_detects_asymmetry() {
        let h = ComplexMatrix::from_vec(2, 2, vec![c(1., 0.), c(0., 1.), c(0., -1.), c(2., 0.)]).unwrap();
        assert_eq!(h.hermitian_defect(), 0.0);
        let nh = ComplexMatrix::from_vec(2, 2, vec![c(1., 0.), c(0., 1.), c(0., 1.), c(2., 0.)]).unwrap();
        assert!(nh.hermitian_defect() > 0.1);
    }

    #[test]
    fn submatrix_roundtrip() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| c(i as f64, j as f64));
        let b = a.block(1, 0, 2);
        assert_eq!(b[(0, 0)], c(2., 0.));
        let mut z = ComplexMatrix::zeros(4, 4);
        z.set_submatrix(2, 0, &b);
        assert_eq!(z.block(1, 0, 2), b);
    }
}
