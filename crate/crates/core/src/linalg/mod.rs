//! Dense complex matrices and the factorizations used by the two gauges.
//!
//! Everything here is desk scale: the largest matrix is `(2n+1) x (2n+1)`
//! with `n <= 8`, so storage is a plain dense column-major `nalgebra`
//! matrix wrapped in [`ComplexMatrix`]. Indices in the public API are
//! zero-based.

mod gauge;
mod minors;

pub use gauge::{
    iwasawa, lower_triangularize, structured_diagonalize, Diagonalization, GaussFactors,
    IwasawaFactors,
};
pub use minors::{bottom_right_minor, determinant, general_minor, subsets, MinorSelector};

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense `rows x cols` complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self(DMatrix::from_fn(rows, cols, |i, j| c(f(i, j))))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    /// Builds a real matrix from a slice of rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let flat: Vec<C64> = rows.iter().flatten().map(|&x| c(x)).collect();
        Self::from_row_major(nrows, ncols, &flat)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_real_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn ensure_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::Dimension(format!(
                "{what} must be square, got {}x{}",
                self.rows(),
                self.cols()
            )))
        }
    }

    pub fn ensure_shape(&self, rows: usize, cols: usize, what: &str) -> Result<()> {
        if self.rows() == rows && self.cols() == cols {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what} must be {rows}x{cols}, got {}x{}",
                self.rows(),
                self.cols()
            )))
        }
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.0.diagonal().iter().copied().collect()
    }

    /// `[self, other] = self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn try_inverse(&self) -> Result<Self> {
        self.ensure_square("matrix to invert")?;
        self.0
            .clone()
            .try_inverse()
            .map(Self)
            .ok_or_else(|| Error::Structural("matrix is singular".into()))
    }

    /// Integer power for square matrices; `power(0)` is the identity.
    pub fn power(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.rows());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Matrix exponential (scaling and squaring with Pade approximation).
    pub fn exp(&self) -> Self {
        Self(self.0.exp())
    }

    /// Submatrix formed by the listed rows and columns, in the order given.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.0[(rows[i], cols[j])])
    }

    /// Real parts, row-major.
    pub fn re_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)].re);
            }
        }
        out
    }

    /// Imaginary parts, row-major.
    pub fn im_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)].im);
            }
        }
        out
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                if z.im == 0.0 {
                    write!(f, "{:>12.5e} ", z.re)?;
                } else {
                    write!(f, "{:>12.5e}{:+.5e}i ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let entries: Vec<C64> = (0..6).map(|k| C64::new(k as f64, -(k as f64))).collect();
        let m = ComplexMatrix::from_row_major(2, 3, &entries).unwrap();
        assert_eq!(m[(1, 0)], C64::new(3.0, -3.0));
        let back: Vec<C64> = m
            .re_row_major()
            .into_iter()
            .zip(m.im_row_major())
            .map(|(re, im)| C64::new(re, im))
            .collect();
        assert_eq!(back, entries);
    }

    #[test]
    fn rejects_wrong_entry_count_and_non_finite() {
        assert!(ComplexMatrix::from_row_major(2, 2, &[c(1.0); 3]).is_err());
        assert!(ComplexMatrix::from_row_major(1, 1, &[c(f64::NAN)]).is_err());
    }

    #[test]
    fn power_and_commutator() {
        let e12 = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let e21 = e12.transpose();
        assert_eq!(e12.power(2).frobenius_norm(), 0.0);
        let h = e12.commutator(&e21);
        assert_eq!(h, ComplexMatrix::from_real_diagonal(&[1.0, -1.0]));
        assert_eq!(e12.power(0), ComplexMatrix::identity(2));
    }

    #[test]
    fn relative_difference_handles_zero() {
        assert_eq!(relative_difference(0.0, 0.0), 0.0);
        assert!((relative_difference(1.0, 1.1) - 0.1 / 1.1).abs() < 1e-15);
    }
}
