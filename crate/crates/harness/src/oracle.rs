//! Independent reference checks: dense `nalgebra` decompositions, grid
//! searches and random searches, each compared against the core routines on
//! random inputs.
//!
//! Every check reports a violation measure that passes when it is at most the
//! stated tolerance.

use std::f64::consts::PI;
use std::io::Write;

use irs_secrecy_core::aomm::{minorizer, mm_direction, mm_phase_update};
use irs_secrecy_core::bcd::{optimal_phase_k, phase_coefficients};
use irs_secrecy_core::channel::{
    sample_rayleigh, sample_uniform_phases, trial_rng, ChannelRng, SystemInstance,
};
use irs_secrecy_core::model::{
    build_quadratic_forms, build_x, objective_ratio, optimal_beamformer,
    optimal_beamformer_for_channels, Beamformer, Link, PhaseVector,
};
use irs_secrecy_core::numerics::{
    dot, generalized_dominant_eigpair, hermitian_eigen, ComplexMatrix, ComplexVector,
};
use irs_secrecy_core::Complex64;
use nalgebra::DMatrix;
use rand::Rng;

/// One row of the reference table.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: &'static str,
    pub cases: usize,
    /// Largest violation over all cases.
    pub worst: f64,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

pub fn to_dense(a: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    ComplexVector(
        sample_rayleigh(rng, n, 1, 1.0)
            .expect("unit gain")
            .as_slice()
            .to_vec(),
    )
}

/// Random Hermitian `n×n` with unit-variance entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    sample_rayleigh(rng, n, n, 2.0)
        .expect("unit gain")
        .hermitian_part()
}

/// `X X^H / n + I`, well conditioned and positive definite.
pub fn random_pd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let x = sample_rayleigh(rng, n, n, 1.0).expect("unit gain");
    x.matmul(&x.adjoint())
        .scale(Complex64::new(1.0 / n as f64, 0.0))
        .add(&ComplexMatrix::identity(n))
        .hermitian_part()
}

/// Unit-variance channels, unit noise and `P` log-uniform on `[0.1, 10]`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, m: usize, n_t: usize) -> SystemInstance {
    let g = sample_rayleigh(rng, m, n_t, 1.0).expect("unit gain");
    let h_l = gaussian_vector(rng, m);
    let h_e = gaussian_vector(rng, m);
    let p = 10f64.powf(rng.random_range(-1.0..=1.0));
    SystemInstance::new(g, h_l, h_e, 1.0, 1.0, p).expect("finite instance")
}

/// Uniformly distributed beamformer with `‖f‖² = p`.
pub fn random_full_power<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> ComplexVector {
    let x = gaussian_vector(rng, n);
    x.normalized()
        .expect("nonzero draw")
        .scaled(Complex64::new(p.sqrt(), 0.0))
}

pub fn random_phases<R: Rng + ?Sized>(rng: &mut R, m: usize) -> PhaseVector {
    PhaseVector::new(sample_uniform_phases(rng, m))
}

fn random_dims<R: Rng + ?Sized>(rng: &mut R) -> (usize, usize) {
    (rng.random_range(1..=8), rng.random_range(1..=4))
}

/// `h^H diag(e^{jθ}) G f`, assembled densely.
pub fn received_amplitude(
    h: &[Complex64],
    g: &ComplexMatrix,
    theta: &[f64],
    f: &[Complex64],
) -> Complex64 {
    let phi = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        theta.len(),
        theta.iter().map(|&t| Complex64::from_polar(1.0, t)),
    ));
    let h = nalgebra::DVector::from_column_slice(h);
    let f = nalgebra::DVector::from_column_slice(f);
    (h.adjoint() * phi * to_dense(g) * f)[(0, 0)]
}

/// The secrecy ratio assembled densely from the channel definition.
pub fn dense_ratio(inst: &SystemInstance, f: &[Complex64], theta: &[f64]) -> f64 {
    let l = received_amplitude(inst.h_l(), inst.g(), theta, f);
    let e = received_amplitude(inst.h_e(), inst.g(), theta, f);
    (1.0 + l.norm_sqr() / inst.sigma2_l()) / (1.0 + e.norm_sqr() / inst.sigma2_e())
}

/// Largest eigenvalue of `B^{-1} A` from a dense complex Schur decomposition.
pub fn dense_generalized_max(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let c = to_dense(b).try_inverse().expect("invertible") * to_dense(a);
    c.schur()
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Jacobi eigenvalues against `nalgebra`'s Hermitian eigensolver on random
/// 6×6 matrices; error relative to `‖A‖_F`.
pub fn hermitian_eigen_check(rng: &mut ChannelRng, cases: usize) -> OracleReport {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let a = random_hermitian(rng, 6);
        let ours = hermitian_eigen(&a).expect("Hermitian input");
        let mut theirs: Vec<f64> = to_dense(&a)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        let scale = a.frobenius_norm();
        for (x, y) in ours.values.iter().zip(&theirs) {
            worst = worst.max((x - y).abs() / scale);
        }
    }
    OracleReport {
        name: "hermitian eigenvalues vs dense",
        cases,
        worst,
        tolerance: 1e-9,
    }
}

/// Dominant generalized eigenvalue against dense `B^{-1} A` on random 5×5
/// positive definite pairs; relative error.
pub fn generalized_eigen_check(rng: &mut ChannelRng, cases: usize) -> OracleReport {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let a = random_pd(rng, 5);
        let b = random_pd(rng, 5);
        let ours = generalized_dominant_eigpair(&a, &b).expect("PD pair").value;
        let theirs = dense_generalized_max(&a, &b);
        worst = worst.max((ours - theirs).abs() / theirs.abs());
    }
    OracleReport {
        name: "generalized eigenvalue vs dense B^-1 A",
        cases,
        worst,
        tolerance: 1e-8,
    }
}

/// Single-element phase update against a uniform grid over the full circle,
/// with the objective assembled densely. Violation is the relative shortfall
/// `(grid max − achieved) / grid max`.
pub fn phase_grid_check(rng: &mut ChannelRng, cases: usize, grid: usize) -> OracleReport {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let (m, n_t) = random_dims(rng);
        let inst = random_instance(rng, m, n_t);
        let scale = rng.random_range(0.0..=1.0f64).sqrt();
        let f = random_full_power(rng, n_t, inst.p() * scale);
        let mut phases = random_phases(rng, m);
        let k = rng.random_range(0..m);

        let coeffs =
            phase_coefficients(&inst, &Beamformer::new(f.clone()), &phases, k).expect("valid dims");
        phases.set(k, optimal_phase_k(&coeffs));
        let achieved = dense_ratio(&inst, &f, phases.theta());

        // Split each amplitude into the k-th term a·e^{jθ_k} and the rest b.
        let z = inst.g().mul_vec(&f);
        let split = |h: &[Complex64]| {
            let a = h[k].conj() * z[k];
            let b: Complex64 = (0..m)
                .filter(|&j| j != k)
                .map(|j| Complex64::from_polar(1.0, phases.theta()[j]) * h[j].conj() * z[j])
                .sum();
            (a, b)
        };
        let (a_l, b_l) = split(inst.h_l());
        let (a_e, b_e) = split(inst.h_e());
        let best = (0..grid)
            .map(|i| {
                let u = Complex64::from_polar(1.0, -PI + 2.0 * PI * (i as f64 + 1.0) / grid as f64);
                (1.0 + (b_l + a_l * u).norm_sqr() / inst.sigma2_l())
                    / (1.0 + (b_e + a_e * u).norm_sqr() / inst.sigma2_e())
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((best - achieved) / best);
    }
    OracleReport {
        name: "single-phase update vs grid search",
        cases,
        worst,
        tolerance: 1e-9,
    }
}

/// Closed-form beamformer against random full-power beamformers
/// (relative shortfall), plus its ratio against the dense `B^{-1} A`
/// eigenvalue of `(X_l, X_e)` (relative error). Returns both reports.
pub fn beamformer_check(rng: &mut ChannelRng, cases: usize, samples: usize) -> [OracleReport; 2] {
    let mut worst_search = f64::NEG_INFINITY;
    let mut worst_eigen: f64 = 0.0;
    for _ in 0..cases {
        let (m, n_t) = random_dims(rng);
        let inst = random_instance(rng, m, n_t);
        let phases = random_phases(rng, m);
        let sol = optimal_beamformer(&inst, &phases).expect("well-posed instance");
        let achieved = dense_ratio(&inst, sol.beamformer.vector(), phases.theta());
        let best = (0..samples)
            .map(|_| {
                dense_ratio(
                    &inst,
                    &random_full_power(rng, n_t, inst.p()),
                    phases.theta(),
                )
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst_search = worst_search.max((best - achieved) / achieved);

        let x_l = build_x(&inst, &phases, Link::Legit).expect("valid dims");
        let x_e = build_x(&inst, &phases, Link::Eaves).expect("valid dims");
        let dense = dense_generalized_max(&x_l, &x_e);
        worst_eigen = worst_eigen.max((sol.ratio - dense).abs() / dense);
    }
    [
        OracleReport {
            name: "beamformer vs random search",
            cases,
            worst: worst_search,
            tolerance: 1e-9,
        },
        OracleReport {
            name: "beamformer ratio vs dense B^-1 A",
            cases,
            worst: worst_eigen,
            tolerance: 1e-8,
        },
    ]
}

/// No-IRS baseline beamformer on random direct channels against random
/// full-power beamformers; relative shortfall.
pub fn direct_beamformer_check(rng: &mut ChannelRng, cases: usize, samples: usize) -> OracleReport {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let n_t = rng.random_range(1..=6);
        let d_l = gaussian_vector(rng, n_t);
        let d_e = gaussian_vector(rng, n_t);
        let p = 10f64.powf(rng.random_range(-1.0..=1.0));
        let ratio =
            |f: &[Complex64]| (1.0 + dot(&d_l, f).norm_sqr()) / (1.0 + dot(&d_e, f).norm_sqr());
        let sol = optimal_beamformer_for_channels(&d_l, &d_e, 1.0, 1.0, p).expect("well-posed");
        let achieved = ratio(sol.beamformer.vector());
        let best = (0..samples)
            .map(|_| ratio(&random_full_power(rng, n_t, p)))
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((best - achieved) / achieved);
    }
    OracleReport {
        name: "direct-link beamformer vs random search",
        cases,
        worst,
        tolerance: 1e-9,
    }
}

/// Minorizer slack `f(v|v_z) + c − g(v)` (must be ≤ 0) at random points and
/// its touching gap at `v = v_z`. Returns both reports.
pub fn minorization_check(rng: &mut ChannelRng, cases: usize) -> [OracleReport; 2] {
    let mut worst_slack = f64::NEG_INFINITY;
    let mut worst_touch: f64 = 0.0;
    for _ in 0..cases {
        let (m, n_t) = random_dims(rng);
        let inst = random_instance(rng, m, n_t);
        let f = Beamformer::new(random_full_power(rng, n_t, inst.p()));
        let forms = build_quadratic_forms(&inst, &f).expect("full power");
        let v = random_phases(rng, m).reflection();
        let v_z = random_phases(rng, m).reflection();
        worst_slack = worst_slack.max(minorizer(&v, &v_z, &forms) - forms.objective(&v));
        worst_touch =
            worst_touch.max((minorizer(&v_z, &v_z, &forms) - forms.objective(&v_z)).abs());
    }
    [
        OracleReport {
            name: "minorizer below objective",
            cases,
            worst: worst_slack,
            tolerance: 1e-9,
        },
        OracleReport {
            name: "minorizer touches at v_z",
            cases,
            worst: worst_touch,
            tolerance: 1e-9,
        },
    ]
}

/// MM phase update maximizes `Re(w^H v)` over the torus; shortfall against
/// random unit-modulus points.
pub fn mm_step_check(rng: &mut ChannelRng, cases: usize, samples: usize) -> OracleReport {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let (m, n_t) = random_dims(rng);
        let inst = random_instance(rng, m, n_t);
        let f = Beamformer::new(random_full_power(rng, n_t, inst.p()));
        let forms = build_quadratic_forms(&inst, &f).expect("full power");
        let state = mm_direction(&forms, &random_phases(rng, m).reflection());
        let v = mm_phase_update(&state);
        let achieved = dot(&state.w, &v).re;
        let best = (0..samples)
            .map(|_| dot(&state.w, &random_phases(rng, m).reflection()).re)
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((best - achieved) / achieved.abs().max(f64::MIN_POSITIVE));
    }
    OracleReport {
        name: "MM phase step vs random search",
        cases,
        worst,
        tolerance: 1e-12,
    }
}

/// Dense channel-form ratio against `v^H Y_l v / v^H Y_e v`; relative error.
pub fn quadratic_form_check(rng: &mut ChannelRng, cases: usize) -> OracleReport {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let (m, n_t) = random_dims(rng);
        let inst = random_instance(rng, m, n_t);
        let f = Beamformer::new(random_full_power(rng, n_t, inst.p()));
        let phases = random_phases(rng, m);
        let direct = dense_ratio(&inst, f.vector(), phases.theta());
        let forms = build_quadratic_forms(&inst, &f).expect("full power");
        let quad = forms.objective(&phases.reflection());
        let model = objective_ratio(&inst, &f, &phases).expect("within budget");
        worst = worst
            .max((direct - quad).abs() / direct)
            .max((direct - model).abs() / direct);
    }
    OracleReport {
        name: "channel ratio vs quadratic-form ratio",
        cases,
        worst,
        tolerance: 1e-10,
    }
}

/// Case counts for [`run_all`].
#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    pub cases: usize,
    pub samples: usize,
    pub grid: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            cases: 100,
            samples: 10_000,
            grid: 100_000,
        }
    }
}

/// Runs every check with independent substreams of `seed`.
pub fn run_all(seed: u64, budget: OracleBudget) -> Vec<OracleReport> {
    let OracleBudget {
        cases,
        samples,
        grid,
    } = budget;
    let mut out = vec![
        hermitian_eigen_check(&mut trial_rng(seed, 0), cases),
        generalized_eigen_check(&mut trial_rng(seed, 1), cases),
        phase_grid_check(&mut trial_rng(seed, 2), cases, grid),
    ];
    out.extend(beamformer_check(&mut trial_rng(seed, 3), cases, samples));
    out.push(direct_beamformer_check(
        &mut trial_rng(seed, 4),
        cases,
        samples,
    ));
    out.extend(minorization_check(&mut trial_rng(seed, 5), cases * 10));
    out.push(mm_step_check(&mut trial_rng(seed, 6), cases, samples));
    out.push(quadratic_form_check(&mut trial_rng(seed, 7), cases * 10));
    out
}

pub fn write_table<W: Write>(reports: &[OracleReport], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<42} {:>6} {:>12} {:>10}  status",
        "check", "cases", "worst", "tolerance"
    )?;
    for r in reports {
        writeln!(
            out,
            "{:<42} {:>6} {:>12.3e} {:>10.1e}  {}",
            r.name,
            r.cases,
            r.worst,
            r.tolerance,
            if r.passed() { "PASS" } else { "FAIL" }
        )?;
    }
    Ok(())
}
