#![allow(dead_code)]

use irs_secrecy_core::channel::{sample_rayleigh, trial_rng, ChannelRng, SystemInstance};
use irs_secrecy_core::model::PhaseVector;
use irs_secrecy_core::numerics::{ComplexMatrix, ComplexVector};
use irs_secrecy_core::Complex64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn rng(stream: u64) -> ChannelRng {
    trial_rng(0x5eed, stream)
}

pub fn dense(a: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn from_dense(a: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)])
}

pub fn gaussian_matrix(rng: &mut ChannelRng, rows: usize, cols: usize) -> ComplexMatrix {
    sample_rayleigh(rng, rows, cols, 1.0).unwrap()
}

pub fn gaussian_vector(rng: &mut ChannelRng, n: usize) -> ComplexVector {
    ComplexVector(gaussian_matrix(rng, n, 1).as_slice().to_vec())
}

pub fn hermitian(rng: &mut ChannelRng, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

pub fn positive_definite(rng: &mut ChannelRng, n: usize) -> ComplexMatrix {
    let x = dense(&gaussian_matrix(rng, n, n));
    from_dense(&(&x * x.adjoint() / Complex64::new(n as f64, 0.0) + DMatrix::identity(n, n)))
        .hermitian_part()
}

pub fn instance(rng: &mut ChannelRng, m: usize, n_t: usize) -> SystemInstance {
    let g = gaussian_matrix(rng, m, n_t);
    let h_l = gaussian_vector(rng, m);
    let h_e = gaussian_vector(rng, m);
    let p = 10f64.powf(rng.random_range(-1.0..=1.0));
    SystemInstance::new(g, h_l, h_e, 1.0, 1.0, p).unwrap()
}

pub fn phases(rng: &mut ChannelRng, m: usize) -> PhaseVector {
    PhaseVector::new(
        (0..m)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect(),
    )
}

pub fn full_power(rng: &mut ChannelRng, n: usize, p: f64) -> ComplexVector {
    gaussian_vector(rng, n)
        .normalized()
        .unwrap()
        .scaled(Complex64::new(p.sqrt(), 0.0))
}

/// `h^H diag(e^{jθ}) G f` from dense products.
pub fn amplitude(h: &[Complex64], g: &ComplexMatrix, theta: &[f64], f: &[Complex64]) -> Complex64 {
    let phi = DMatrix::from_diagonal(&DVector::from_iterator(
        theta.len(),
        theta.iter().map(|&t| Complex64::from_polar(1.0, t)),
    ));
    let h = DVector::from_column_slice(h);
    let f = DVector::from_column_slice(f);
    (h.adjoint() * phi * dense(g) * f)[(0, 0)]
}

pub fn dense_ratio(inst: &SystemInstance, f: &[Complex64], theta: &[f64]) -> f64 {
    let l = amplitude(inst.h_l(), inst.g(), theta, f);
    let e = amplitude(inst.h_e(), inst.g(), theta, f);
    (1.0 + l.norm_sqr() / inst.sigma2_l()) / (1.0 + e.norm_sqr() / inst.sigma2_e())
}

/// All eigenvalues of `B^{-1} A` (complex Schur), largest real part first.
pub fn dense_generalized_spectrum(a: &ComplexMatrix, b: &ComplexMatrix) -> Vec<f64> {
    let c = dense(b).try_inverse().unwrap() * dense(a);
    let mut ev: Vec<f64> = c
        .schur()
        .eigenvalues()
        .unwrap()
        .iter()
        .map(|z| z.re)
        .collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
