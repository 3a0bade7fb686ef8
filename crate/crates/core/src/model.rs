//! Secrecy-rate objective and the closed-form pieces both solvers share.
//!
//! Conventions: the IRS response is `Φ = diag(e^{jθ_1}, …, e^{jθ_M})` and the
//! reflection vector is `v = [e^{jθ_1}, …, e^{jθ_M}]^H`, so `v_k = e^{−jθ_k}`
//! and `h_i^H Φ G = v^H R_i` with `R_i = diag(h_i^H) G`. Rates are in
//! bits/s/Hz (base-2 logarithm).

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::SystemInstance;
use crate::numerics::{
    dominant_eigpair, dominant_left_singular, dot, ComplexMatrix, ComplexVector,
};
use crate::{Error, Result};

/// Relative slack allowed on `‖f‖² ≤ P`.
pub const POWER_TOL: f64 = 1e-9;

/// Which receiver a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    Legit,
    Eaves,
}

impl Link {
    fn channel(self, inst: &SystemInstance) -> &ComplexVector {
        match self {
            Link::Legit => inst.h_l(),
            Link::Eaves => inst.h_e(),
        }
    }

    fn noise(self, inst: &SystemInstance) -> f64 {
        match self {
            Link::Legit => inst.sigma2_l(),
            Link::Eaves => inst.sigma2_e(),
        }
    }
}

/// Maps an angle onto `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let mut y = x - TAU * (x / TAU).round();
    if y <= -PI {
        y += TAU;
    } else if y > PI {
        y -= TAU;
    }
    y
}

/// IRS phase shifts `θ_1 … θ_M`, each kept in `(−π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    theta: Vec<f64>,
}

impl PhaseVector {
    pub fn new(theta: Vec<f64>) -> Self {
        Self {
            theta: theta.into_iter().map(wrap_phase).collect(),
        }
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            theta: alloc::vec![0.0; m],
        }
    }

    /// Phases from a reflection vector `v` (`θ_k = −∠v_k`). Only the phases of
    /// `v` matter; zero entries map to `θ_k = 0`.
    pub fn from_reflection(v: &[Complex64]) -> Self {
        Self::new(
            v.iter()
                .map(|z| if z.norm() > 0.0 { -z.arg() } else { 0.0 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn set(&mut self, k: usize, theta: f64) {
        self.theta[k] = wrap_phase(theta);
    }

    /// `v_k = e^{−jθ_k}`
    pub fn reflection(&self) -> ComplexVector {
        self.theta
            .iter()
            .map(|&t| Complex64::from_polar(1.0, -t))
            .collect()
    }

    /// `e^{jθ_k}`, the diagonal of `Φ`.
    pub fn phasors(&self) -> ComplexVector {
        self.theta
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect()
    }

    /// `Φ` as a dense diagonal matrix.
    pub fn diagonal(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.phasors())
    }
}

/// Transmit weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    f: ComplexVector,
}

impl Beamformer {
    pub fn new(f: ComplexVector) -> Self {
        Self { f }
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.f
    }

    /// `‖f‖²`
    pub fn power(&self) -> f64 {
        self.f.norm_sqr()
    }

    pub fn into_vector(self) -> ComplexVector {
        self.f
    }
}

fn check_phases(inst: &SystemInstance, phases: &PhaseVector) -> Result<()> {
    if phases.len() != inst.m() {
        return Err(Error::invalid(format!(
            "expected {} phases, got {}",
            inst.m(),
            phases.len()
        )));
    }
    Ok(())
}

fn check_beamformer(inst: &SystemInstance, f: &Beamformer) -> Result<()> {
    if f.vector().len() != inst.n_t() {
        return Err(Error::invalid(format!(
            "beamformer length {} does not match N_t = {}",
            f.vector().len(),
            inst.n_t()
        )));
    }
    if f.power() > inst.p() * (1.0 + POWER_TOL) {
        return Err(Error::invalid(format!(
            "beamformer power {} exceeds budget {}",
            f.power(),
            inst.p()
        )));
    }
    Ok(())
}

/// `R_i = diag(h_i^H) G`, `M×N_t`.
pub fn reflection_matrix(inst: &SystemInstance, link: Link) -> ComplexMatrix {
    let h = link.channel(inst);
    let g = inst.g();
    ComplexMatrix::from_fn(g.rows(), g.cols(), |k, n| h[k].conj() * g[(k, n)])
}

/// `a_i = (h_i^H Φ G)^H = G^H Φ^H h_i`, so the received amplitude is `a_i^H f`.
pub fn effective_channel(
    inst: &SystemInstance,
    phases: &PhaseVector,
    link: Link,
) -> Result<ComplexVector> {
    check_phases(inst, phases)?;
    let h = link.channel(inst);
    let g = inst.g();
    let mut a = ComplexVector::zeros(inst.n_t());
    for (k, &t) in phases.theta().iter().enumerate() {
        let w = Complex64::from_polar(1.0, -t) * h[k];
        for (an, gk) in a.iter_mut().zip(g.row(k)) {
            *an += gk.conj() * w;
        }
    }
    Ok(a)
}

/// Same quantity as [`effective_channel`], computed as `R_i^H v`.
pub fn effective_channel_from_reflection(
    inst: &SystemInstance,
    phases: &PhaseVector,
    link: Link,
) -> Result<ComplexVector> {
    check_phases(inst, phases)?;
    Ok(reflection_matrix(inst, link).adjoint_mul_vec(&phases.reflection()))
}

fn link_snr_term(a: &[Complex64], f: &[Complex64], sigma2: f64) -> f64 {
    1.0 + dot(a, f).norm_sqr() / sigma2
}

/// `(1 + |h_l^H Φ G f|²/σ_l²) / (1 + |h_e^H Φ G f|²/σ_e²)` without clamping.
pub fn objective_ratio(inst: &SystemInstance, f: &Beamformer, phases: &PhaseVector) -> Result<f64> {
    check_beamformer(inst, f)?;
    let a_l = effective_channel(inst, phases, Link::Legit)?;
    let a_e = effective_channel(inst, phases, Link::Eaves)?;
    Ok(link_snr_term(&a_l, f.vector(), inst.sigma2_l())
        / link_snr_term(&a_e, f.vector(), inst.sigma2_e()))
}

/// `[log₂ ratio]^+`
pub fn rate_from_ratio(ratio: f64) -> f64 {
    ratio.log2().max(0.0)
}

/// Secrecy rate in bits/s/Hz, clamped at zero.
pub fn secrecy_rate(inst: &SystemInstance, f: &Beamformer, phases: &PhaseVector) -> Result<f64> {
    Ok(rate_from_ratio(objective_ratio(inst, f, phases)?))
}

/// `X_i = I + (P/σ_i²) a_i a_i^H` with `a_i = G^H Φ^H h_i`.
pub fn build_x(inst: &SystemInstance, phases: &PhaseVector, link: Link) -> Result<ComplexMatrix> {
    let a = effective_channel(inst, phases, link)?;
    let scale = inst.p() / link.noise(inst);
    Ok(ComplexMatrix::identity(inst.n_t())
        .add(&ComplexMatrix::outer(&a, &a).scale(Complex64::new(scale, 0.0))))
}

/// The phase-domain quadratic forms for a fixed full-power beamformer:
/// `Y_i = (1/M) I + (1/σ_i²) q_i q_i^H` with `q_i = R_i f`, so that for
/// unit-modulus `v` the objective ratio equals `v^H Y_l v / v^H Y_e v`.
///
/// Only `q_l` and `q_e` are stored; products with `Y_i` use the rank-one
/// structure and [`QuadraticForms::y`] materializes the dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForms {
    q_l: ComplexVector,
    q_e: ComplexVector,
    sigma2_l: f64,
    sigma2_e: f64,
}

impl QuadraticForms {
    /// Builds the forms for any `f`. [`build_quadratic_forms`] additionally
    /// checks that `f` uses the full power budget.
    pub fn new(inst: &SystemInstance, f: &Beamformer) -> Result<Self> {
        if f.vector().len() != inst.n_t() {
            return Err(Error::invalid("beamformer length does not match N_t"));
        }
        let z = inst.g().mul_vec(f.vector());
        let q = |h: &ComplexVector| -> ComplexVector {
            h.iter().zip(z.iter()).map(|(h, z)| h.conj() * z).collect()
        };
        Ok(Self {
            q_l: q(inst.h_l()),
            q_e: q(inst.h_e()),
            sigma2_l: inst.sigma2_l(),
            sigma2_e: inst.sigma2_e(),
        })
    }

    /// `q_i = R_i f`
    pub fn q(&self, link: Link) -> &ComplexVector {
        self.parts(link).0
    }

    /// Dense `Y_i`.
    pub fn y(&self, link: Link) -> ComplexMatrix {
        let (q, sigma2) = self.parts(link);
        let m = self.m();
        let inv_m = 1.0 / m as f64;
        ComplexMatrix::from_fn(m, m, |r, c| {
            let diag = if r == c { inv_m } else { 0.0 };
            q[r] * q[c].conj() / sigma2 + diag
        })
    }

    pub fn m(&self) -> usize {
        self.q_l.len()
    }

    /// `λ_max(Y_e) = 1/M + ‖R_e f‖²/σ_e²` (scaled identity plus rank one).
    pub fn lambda_max_ye(&self) -> f64 {
        1.0 / self.m() as f64 + self.q_e.norm_sqr() / self.sigma2_e
    }

    fn parts(&self, link: Link) -> (&ComplexVector, f64) {
        match link {
            Link::Legit => (&self.q_l, self.sigma2_l),
            Link::Eaves => (&self.q_e, self.sigma2_e),
        }
    }

    /// `Y_i v` in `O(M)`.
    pub fn apply(&self, link: Link, v: &[Complex64]) -> ComplexVector {
        let (q, sigma2) = self.parts(link);
        let s = dot(q, v) / sigma2;
        let inv_m = 1.0 / self.m() as f64;
        v.iter()
            .zip(q.iter())
            .map(|(x, qk)| x * inv_m + qk * s)
            .collect()
    }

    /// `v^H Y_i v` in `O(M)`.
    pub fn quadratic(&self, link: Link, v: &[Complex64]) -> f64 {
        let (q, sigma2) = self.parts(link);
        let v_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        v_sqr / self.m() as f64 + dot(q, v).norm_sqr() / sigma2
    }

    /// `g(v) = v^H Y_l v / v^H Y_e v`
    pub fn objective(&self, v: &[Complex64]) -> f64 {
        self.quadratic(Link::Legit, v) / self.quadratic(Link::Eaves, v)
    }
}

/// [`QuadraticForms::new`] with the precondition `‖f‖² = P` enforced.
pub fn build_quadratic_forms(inst: &SystemInstance, f: &Beamformer) -> Result<QuadraticForms> {
    let rel = (f.power() - inst.p()).abs() / inst.p();
    if rel > POWER_TOL {
        return Err(Error::invalid(format!(
            "quadratic forms need a full-power beamformer (‖f‖² = {}, P = {})",
            f.power(),
            inst.p()
        )));
    }
    QuadraticForms::new(inst, f)
}

/// Result of the beamformer subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSolution {
    pub beamformer: Beamformer,
    /// Objective ratio attained, i.e. the dominant generalized eigenvalue of
    /// `(X_l, X_e)`.
    pub ratio: f64,
}

/// Full-power beamformer maximizing
/// `(1 + |a_l^H f|²/σ_l²) / (1 + |a_e^H f|²/σ_e²)` over `‖f‖² ≤ P`.
///
/// The maximizer of the pencil `(I + α_l a_l a_l^H, I + α_e a_e a_e^H)` lies in
/// `span{a_l, a_e}` unless the optimum is the flat value 1 reached on the
/// orthogonal complement, so the problem is reduced to at most 2×2. The
/// reduced right-hand matrix is whitened with its closed-form inverse square
/// root.
pub fn optimal_beamformer_for_channels(
    a_l: &[Complex64],
    a_e: &[Complex64],
    sigma2_l: f64,
    sigma2_e: f64,
    p: f64,
) -> Result<BeamformerSolution> {
    let n = a_l.len();
    if a_e.len() != n || n == 0 {
        return Err(Error::invalid(
            "effective channels must have equal, nonzero length",
        ));
    }
    let alpha_l = p / sigma2_l;
    let alpha_e = p / sigma2_e;
    let sqrt_p = p.sqrt();

    let basis = orthonormal_span(a_l, a_e);
    let k = basis.len();

    let ratio_of = |x: &[Complex64]| {
        (1.0 + alpha_l * dot(a_l, x).norm_sqr()) / (1.0 + alpha_e * dot(a_e, x).norm_sqr())
    };

    let mut best: Option<(ComplexVector, f64)> = None;
    if k > 0 {
        // Coordinates of a_l and a_e in the basis.
        let b_l: Vec<Complex64> = basis.iter().map(|q| dot(q, a_l)).collect();
        let b_e: Vec<Complex64> = basis.iter().map(|q| dot(q, a_e)).collect();
        let be_sqr: f64 = b_e.iter().map(|z| z.norm_sqr()).sum();
        // B^{-1/2} = I + γ b_e b_e^H / ‖b_e‖², γ = 1/sqrt(1 + α_e‖b_e‖²) − 1
        let gamma = if be_sqr > 0.0 {
            (1.0 / (1.0 + alpha_e * be_sqr).sqrt() - 1.0) / be_sqr
        } else {
            0.0
        };
        let whiten = |x: &[Complex64]| -> Vec<Complex64> {
            let proj = dot(&b_e, x) * gamma;
            x.iter().zip(&b_e).map(|(xi, bi)| xi + bi * proj).collect()
        };
        // C = B^{-1/2} (I + α_l b_l b_l^H) B^{-1/2} = B^{-1} + α_l c c^H, c = B^{-1/2} b_l
        let c = whiten(&b_l);
        let mut c_mat = ComplexMatrix::from_fn(k, k, |r, s| {
            let mut e = [Complex64::new(0.0, 0.0); 2];
            e[s] = Complex64::new(1.0, 0.0);
            let col = whiten(&whiten(&e[..k]));
            col[r] + c[r] * c[s].conj() * alpha_l
        });
        c_mat = c_mat.hermitian_part();
        let y = dominant_eigpair(&c_mat)?.vector;
        let x = whiten(&y);
        let mut f = ComplexVector::zeros(n);
        for (q, xi) in basis.iter().zip(&x) {
            for (fi, qi) in f.iter_mut().zip(q.iter()) {
                *fi += qi * xi;
            }
        }
        let f = f
            .normalized()
            .ok_or_else(|| Error::numerical("reduced beamformer vanished", 0.0))?;
        let r = ratio_of(&f);
        best = Some((f, r));
    }

    let flat_better = match &best {
        None => true,
        Some((_, r)) => *r < 1.0 && k < n,
    };
    if flat_better {
        let f = orthogonal_unit(&basis, n);
        let r = ratio_of(&f);
        best = Some((f, r));
    }

    let (f, _) = best.expect("a candidate beamformer always exists");
    let mut f = f;
    f.canonicalize_phase();
    let f = f.scaled(Complex64::new(sqrt_p, 0.0));
    let ratio =
        (1.0 + dot(a_l, &f).norm_sqr() / sigma2_l) / (1.0 + dot(a_e, &f).norm_sqr() / sigma2_e);
    Ok(BeamformerSolution {
        beamformer: Beamformer::new(f),
        ratio,
    })
}

/// Orthonormal basis of `span{x, y}` (0, 1 or 2 vectors).
fn orthonormal_span(x: &[Complex64], y: &[Complex64]) -> Vec<ComplexVector> {
    const DEPENDENT: f64 = 1e-12;
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(2);
    for v in [x, y] {
        let norm0 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            continue;
        }
        let mut r = ComplexVector(v.to_vec());
        // Two passes of Gram-Schmidt.
        for _ in 0..2 {
            for q in &basis {
                let coef = dot(q, &r);
                for (ri, qi) in r.iter_mut().zip(q.iter()) {
                    *ri -= qi * coef;
                }
            }
        }
        if r.norm() > DEPENDENT * norm0 {
            basis.push(r.normalized().expect("nonzero residual"));
        }
    }
    basis
}

/// A unit vector orthogonal to every vector of an orthonormal `basis`
/// (`basis.len() < n`).
fn orthogonal_unit(basis: &[ComplexVector], n: usize) -> ComplexVector {
    let mut best = ComplexVector::basis(n, 0);
    let mut best_norm = -1.0;
    for j in 0..n {
        let mut r = ComplexVector::basis(n, j);
        for _ in 0..2 {
            for q in basis {
                let coef = dot(q, &r);
                for (ri, qi) in r.iter_mut().zip(q.iter()) {
                    *ri -= qi * coef;
                }
            }
        }
        let nr = r.norm();
        if nr > best_norm + 1e-12 {
            best_norm = nr;
            best = r;
        }
    }
    best.normalized()
        .unwrap_or_else(|| ComplexVector::basis(n, 0))
}

/// Optimal full-power beamformer for fixed phases.
pub fn optimal_beamformer(
    inst: &SystemInstance,
    phases: &PhaseVector,
) -> Result<BeamformerSolution> {
    let a_l = effective_channel(inst, phases, Link::Legit)?;
    let a_e = effective_channel(inst, phases, Link::Eaves)?;
    optimal_beamformer_for_channels(&a_l, &a_e, inst.sigma2_l(), inst.sigma2_e(), inst.p())
}

/// Phases aligned with the dominant left singular vector `u` of `R_l`:
/// `∠v = ∠u`. Falls back to all-zero phases when `R_l` vanishes.
pub fn initial_phases(inst: &SystemInstance) -> Result<PhaseVector> {
    let r_l = reflection_matrix(inst, Link::Legit);
    if r_l.max_abs() == 0.0 {
        log::warn!("R_l is identically zero; starting from zero phases");
        return Ok(PhaseVector::zeros(inst.m()));
    }
    let u = dominant_left_singular(&r_l)?;
    Ok(PhaseVector::from_reflection(&u))
}
