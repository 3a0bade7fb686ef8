use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut, Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid("entry count does not match rows*cols"));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// `x · y^H`
    pub fn outer(x: &[Complex64], y: &[Complex64]) -> Self {
        Self::from_fn(x.len(), y.len(), |r, c| x[r] * y[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `A · x`
    pub fn mul_vec(&self, x: &[Complex64]) -> ComplexVector {
        assert_eq!(self.cols, x.len(), "mul_vec dimension mismatch");
        (0..self.rows).map(|r| dot_u(self.row(r), x)).collect()
    }

    /// `A^H · x`
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> ComplexVector {
        assert_eq!(self.rows, x.len(), "adjoint_mul_vec dimension mismatch");
        let mut out = vec![ZERO; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
        ComplexVector(out)
    }

    /// `x^H A x`, real part only (exact for Hermitian `A`).
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        dot(x, &self.mul_vec(x)).re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest elementwise deviation `|A_ij − conj(A_ji)|` relative to `max|A_ij|`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst / scale
    }

    /// `(A + A^H) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(pub Vec<Complex64>);

impl ComplexVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![ZERO; n])
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = ONE;
        v
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        self.0.iter().map(|&z| z * s).collect()
    }

    /// Returns `self / ‖self‖`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn conj(&self) -> Self {
        self.0.iter().map(|z| z.conj()).collect()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Rotates the vector so that its largest-magnitude entry is real and
    /// nonnegative. The first entry wins ties.
    pub fn canonicalize_phase(&mut self) {
        let mut best = 0usize;
        let mut best_mag = -1.0;
        for (i, z) in self.0.iter().enumerate() {
            let m = z.norm();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        if best_mag <= 0.0 {
            return;
        }
        let pivot = self.0[best];
        let rot = pivot.conj() / best_mag;
        for z in &mut self.0 {
            *z *= rot;
        }
        self.0[best] = Complex64::new(best_mag, 0.0);
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for ComplexVector {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

/// Hermitian inner product `x^H y`.
#[inline]
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Unconjugated product `Σ x_i y_i`.
#[inline]
pub fn dot_u(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_row_major_checks_shape_and_finiteness() {
        assert!(ComplexMatrix::from_row_major(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::from_row_major(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        let m = ComplexMatrix::from_row_major(1, 2, vec![c(1.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert_eq!(m[(0, 1)], c(0.0, 2.0));
    }

    #[test]
    fn adjoint_products_agree() {
        let a = ComplexMatrix::from_fn(3, 2, |r, k| c(r as f64 + 1.0, k as f64 - 0.5));
        let x = [c(0.3, -1.0), c(2.0, 0.5), c(-1.0, 0.25)];
        let direct = a.adjoint_mul_vec(&x);
        let via = a.adjoint().mul_vec(&x);
        for (p, q) in direct.iter().zip(via.iter()) {
            assert!((p - q).norm() < 1e-14);
        }
    }

    #[test]
    fn hermitian_part_is_hermitian() {
        let a = ComplexMatrix::from_fn(3, 3, |r, k| {
            c((r * 3 + k) as f64, (r as f64) - (k as f64) * 2.0)
        });
        assert!(a.hermitian_defect() > 0.1);
        assert!(a.hermitian_part().hermitian_defect() < 1e-15);
    }

    #[test]
    fn canonical_phase_makes_largest_entry_real() {
        let mut v = ComplexVector(vec![c(0.1, 0.2), c(0.0, -3.0), c(1.0, 1.0)]);
        let before = v.norm();
        v.canonicalize_phase();
        assert!((v[1] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((v.norm() - before).abs() < 1e-14);
    }
}
