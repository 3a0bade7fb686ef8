//! Hermitian eigensolvers.
//!
//! Everything here is built on a cyclic complex Jacobi sweep, which is
//! unconditionally convergent for Hermitian input and accurate to a few ulps
//! on the small matrices this crate works with (`M`, `N_t` up to a few
//! hundred). Generalized problems are reduced to ordinary ones through a
//! Cholesky factor of the right-hand matrix.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{dot, ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// Elementwise Hermitian tolerance, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Condition-number ceiling for the right-hand matrix of a generalized problem.
pub const MAX_CONDITION: f64 = 1e12;
/// Residual bound `‖A·x − λ·x‖ ≤ RESIDUAL_TOL · ‖A‖_F` accepted from the solver.
pub const RESIDUAL_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// An eigenvalue with a unit-norm eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: ComplexVector,
}

/// Full spectrum of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> ComplexVector {
        (0..self.vectors.rows())
            .map(|r| self.vectors[(r, k)])
            .collect()
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::invalid(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let defect = a.hermitian_defect();
    if !(defect <= HERMITIAN_TOL) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (relative defect {defect:e})"
        )));
    }
    Ok(a.hermitian_part())
}

/// Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let mut work = check_hermitian(a)?;
    let n = work.rows();
    let mut vecs = ComplexMatrix::identity(n);
    let scale = work.frobenius_norm();

    let off_diag = |m: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                s += m[(r, c)].norm_sqr();
            }
        }
        s
    };

    let target = (f64::EPSILON * scale).powi(2) * 1e-2;
    let mut sweeps = 0;
    while off_diag(&work) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::numerical(
                "Jacobi sweep limit reached",
                off_diag(&work).sqrt(),
            ));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut work, &mut vecs, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation annihilating `A[p][q]`. `A ← U^H A U`, `V ← V U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows();
    // a_pq = |a_pq| e^{iφ}; U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();

    // columns
    for r in 0..n {
        let xp = a[(r, p)];
        let xq = a[(r, q)] * ph_conj;
        a[(r, p)] = xp * c - xq * s;
        a[(r, q)] = xp * s + xq * c;
    }
    // rows
    for k in 0..n {
        let xp = a[(p, k)];
        let xq = a[(q, k)] * phase;
        a[(p, k)] = xp * c - xq * s;
        a[(q, k)] = xp * s + xq * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);

    for r in 0..n {
        let xp = v[(r, p)];
        let xq = v[(r, q)] * ph_conj;
        v[(r, p)] = xp * c - xq * s;
        v[(r, q)] = xp * s + xq * c;
    }
}

fn residual(a: &ComplexMatrix, value: f64, x: &[Complex64]) -> f64 {
    let ax = a.mul_vec(x);
    ax.iter()
        .zip(x)
        .map(|(y, xi)| (y - xi * value).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector whose
/// largest-magnitude entry is real and nonnegative.
pub fn dominant_eigpair(a: &ComplexMatrix) -> Result<EigenPair> {
    let eig = hermitian_eigen(a)?;
    let value = eig.values[0];
    let mut vector = eig.vector(0);
    vector.canonicalize_phase();
    let res = residual(&a.hermitian_part(), value, &vector);
    let bound = RESIDUAL_TOL * a.frobenius_norm().max(f64::MIN_POSITIVE);
    if !(res <= bound) || !value.is_finite() {
        return Err(Error::numerical(
            "dominant eigenpair residual too large",
            res,
        ));
    }
    Ok(EigenPair { value, vector })
}

/// Lower-triangular `L` with `L L^H = B`.
pub fn cholesky(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = b.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = b[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::numerical("matrix is not positive definite", d));
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L y = x` for lower-triangular `L`.
fn forward_solve(l: &ComplexMatrix, x: &[Complex64]) -> ComplexVector {
    let n = l.rows();
    let mut y = ComplexVector::zeros(n);
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Solves `L^H y = x` for lower-triangular `L`.
fn backward_solve_adjoint(l: &ComplexMatrix, x: &[Complex64]) -> ComplexVector {
    let n = l.rows();
    let mut y = ComplexVector::zeros(n);
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)].conj() * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Maximizer of the generalized Rayleigh quotient `x^H A x / x^H B x`.
///
/// `value` is the quotient at the returned unit vector. `B` must be Hermitian
/// positive definite with condition number at most [`MAX_CONDITION`].
pub fn generalized_dominant_eigpair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<EigenPair> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let a = check_hermitian(a)?;
    let b = check_hermitian(b)?;
    let n = a.rows();

    let b_spec = hermitian_eigen(&b)?;
    let hi = b_spec.values[0];
    let lo = b_spec.values[n - 1];
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(Error::numerical(
            "right-hand matrix is singular or ill-conditioned",
            if lo > 0.0 { hi / lo } else { f64::INFINITY },
        ));
    }
    let l = cholesky(&b)?;

    // C = L^{-1} A L^{-H}, built column by column.
    let mut tmp = ComplexMatrix::zeros(n, n);
    for c in 0..n {
        let col: Vec<Complex64> = (0..n).map(|r| a[(r, c)]).collect();
        let y = forward_solve(&l, &col);
        for r in 0..n {
            tmp[(r, c)] = y[r];
        }
    }
    // tmp = L^{-1} A; C = tmp L^{-H} = (L^{-1} tmp^H)^H
    let tmp_h = tmp.adjoint();
    let mut c_mat = ComplexMatrix::zeros(n, n);
    for c in 0..n {
        let col: Vec<Complex64> = (0..n).map(|r| tmp_h[(r, c)]).collect();
        let y = forward_solve(&l, &col);
        for r in 0..n {
            c_mat[(c, r)] = y[r].conj();
        }
    }
    let c_mat = c_mat.hermitian_part();
    let eig = hermitian_eigen(&c_mat)?;
    let y = eig.vector(0);
    let x = backward_solve_adjoint(&l, &y);
    let mut vector = x
        .normalized()
        .ok_or_else(|| Error::numerical("generalized eigenvector vanished", 0.0))?;
    vector.canonicalize_phase();
    let value = a.quadratic_form(&vector) / b.quadratic_form(&vector);
    if !value.is_finite() {
        return Err(Error::numerical("non-finite generalized eigenvalue", value));
    }
    Ok(EigenPair { value, vector })
}

/// Unit vector `u` maximizing `‖A^H u‖`, i.e. the dominant eigenvector of `A A^H`.
pub fn dominant_left_singular(a: &ComplexMatrix) -> Result<ComplexVector> {
    if a.rows() == 0 || a.max_abs() == 0.0 {
        return Err(Error::invalid("dominant singular vector of a zero matrix"));
    }
    let gram = a.matmul(&a.adjoint());
    Ok(dominant_eigpair(&gram)?.vector)
}

/// `x^H A x / x^H B x`
pub fn rayleigh_quotient(a: &ComplexMatrix, b: &ComplexMatrix, x: &[Complex64]) -> f64 {
    dot(x, &a.mul_vec(x)).re / dot(x, &b.mul_vec(x)).re
}
