//! Alternating optimization with minorization-maximization.
//!
//! Two blocks per iteration: the closed-form beamformer, then one MM step on
//! the whole reflection vector. For `g(v) = v^H Y_l v / v^H Y_e v` the
//! surrogate
//!
//! ```text
//! f(v|v_z) = 2 Re(v_z^H Y_l v) / y_z
//!          − (x_z / y_z²) { λ v^H v + 2 Re(v_z^H (Y_e − λ I) v) },
//! ```
//!
//! with `x_z = v_z^H Y_l v_z`, `y_z = v_z^H Y_e v_z` and `λ = λ_max(Y_e)`,
//! satisfies `g(v) ≥ f(v|v_z) + g(v_z) − f(v_z|v_z)` everywhere. Over
//! unit-modulus `v` it reduces to maximizing `Re(w^H v)`, solved by taking the
//! phases of `w`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::SystemInstance;
use crate::model::{
    initial_phases, objective_ratio, optimal_beamformer, rate_from_ratio, Link, PhaseVector,
    QuadraticForms,
};
use crate::numerics::{dot, ComplexVector};
use crate::solver::{
    non_decreasing, relative_increment, Solution, SolveTrace, SolverOptions, Stopwatch,
    TraceGranularity,
};
use crate::{Error, Result};

const ASCENT_TOL: f64 = 1e-9;

/// One MM linearization point.
#[derive(Debug, Clone, PartialEq)]
pub struct MMState {
    pub v_z: ComplexVector,
    pub w: ComplexVector,
    pub lambda_max_ye: f64,
}

/// `f(v | v_z)` without the touching constant.
pub fn surrogate_value(v: &[Complex64], v_z: &[Complex64], forms: &QuadraticForms) -> f64 {
    let lambda = forms.lambda_max_ye();
    let yl_v = forms.apply(Link::Legit, v);
    let ye_v = forms.apply(Link::Eaves, v);
    let x_z = forms.quadratic(Link::Legit, v_z);
    let y_z = forms.quadratic(Link::Eaves, v_z);
    let v_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let cross_l = dot(v_z, &yl_v).re;
    // v_z^H (Y_e − λI) v
    let cross_e = (dot(v_z, &ye_v) - dot(v_z, v) * lambda).re;
    2.0 * cross_l / y_z - x_z / (y_z * y_z) * (lambda * v_sqr + 2.0 * cross_e)
}

/// `g(v_z) − f(v_z | v_z)`
pub fn surrogate_constant(v_z: &[Complex64], forms: &QuadraticForms) -> f64 {
    forms.objective(v_z) - surrogate_value(v_z, v_z, forms)
}

/// The minorizer `f(v|v_z) + g(v_z) − f(v_z|v_z)`.
pub fn minorizer(v: &[Complex64], v_z: &[Complex64], forms: &QuadraticForms) -> f64 {
    surrogate_value(v, v_z, forms) + surrogate_constant(v_z, forms)
}

/// `w = Y_l v_z / y_z − (x_z / y_z²) (Y_e − λ_max(Y_e) I) v_z`
pub fn mm_direction(forms: &QuadraticForms, v_z: &[Complex64]) -> MMState {
    let lambda = forms.lambda_max_ye();
    let yl_v = forms.apply(Link::Legit, v_z);
    let ye_v = forms.apply(Link::Eaves, v_z);
    let x_z = dot(v_z, &yl_v).re;
    let y_z = dot(v_z, &ye_v).re;
    let scale = x_z / (y_z * y_z);
    let w = yl_v
        .iter()
        .zip(ye_v.iter())
        .zip(v_z)
        .map(|((l, e), vz)| l / y_z - (e - vz * lambda) * scale)
        .collect();
    MMState {
        v_z: ComplexVector(v_z.to_vec()),
        w,
        lambda_max_ye: lambda,
    }
}

/// `v_k = e^{j∠w_k}`, the maximizer of `Re(w^H v)` under `|v_k| = 1`. Entries
/// with `w_k = 0` keep their current value.
pub fn mm_phase_update(state: &MMState) -> ComplexVector {
    state
        .w
        .iter()
        .zip(state.v_z.iter())
        .enumerate()
        .map(|(k, (w, vz))| {
            let mag = w.norm();
            if mag > 0.0 && mag.is_finite() {
                w / mag
            } else {
                log::debug!("MM direction vanished at element {k}; keeping its phase");
                *vz
            }
        })
        .collect()
}

/// AO-MM from the dominant-singular-vector initialization.
pub fn solve_aomm(inst: &SystemInstance, opts: &SolverOptions) -> Result<Solution> {
    solve_aomm_from(inst, initial_phases(inst)?, opts)
}

/// AO-MM from caller-supplied starting phases.
pub fn solve_aomm_from(
    inst: &SystemInstance,
    start: PhaseVector,
    opts: &SolverOptions,
) -> Result<Solution> {
    opts.validate()?;
    if start.len() != inst.m() {
        return Err(Error::invalid("starting phases do not match M"));
    }
    let clock = Stopwatch::start();
    let record_blocks = opts.trace_granularity == TraceGranularity::Block;
    let mut phases = start;
    let mut v = phases.reflection();
    let mut current = optimal_beamformer(inst, &phases)?;
    let mut ratio = current.ratio;

    let mut trace = SolveTrace {
        objective_history: alloc::vec![ratio],
        ..Default::default()
    };
    if record_blocks {
        trace.block_history.push(ratio);
    }

    for iter in 1..=opts.max_iterations {
        let prev_outer = ratio;

        current = optimal_beamformer(inst, &phases)?;
        trace.block_updates += 1;
        debug_assert!(non_decreasing(ratio, current.ratio, ASCENT_TOL));
        if record_blocks {
            trace.block_history.push(current.ratio);
        }

        let forms = QuadraticForms::new(inst, &current.beamformer)?;
        let state = mm_direction(&forms, &v);
        let v_next = mm_phase_update(&state);
        trace.block_updates += 1;

        if cfg!(debug_assertions) {
            let g_old = forms.objective(&v);
            let g_new = forms.objective(&v_next);
            let lower_new = minorizer(&v_next, &v, &forms);
            let lower_old = minorizer(&v, &v, &forms);
            let scale = g_old.abs();
            debug_assert!(
                g_new >= lower_new - ASCENT_TOL * scale,
                "minorizer exceeds objective"
            );
            debug_assert!(
                lower_new >= lower_old - ASCENT_TOL * scale,
                "MM step decreased the surrogate"
            );
            debug_assert!(
                (lower_old - g_old).abs() <= ASCENT_TOL * scale,
                "minorizer does not touch"
            );
        }

        v = v_next;
        phases = PhaseVector::from_reflection(&v);
        ratio = objective_ratio(inst, &current.beamformer, &phases)?;
        if record_blocks {
            trace.block_history.push(ratio);
        }
        trace.objective_history.push(ratio);
        trace.iterations = iter;
        if relative_increment(prev_outer, ratio) < opts.epsilon {
            trace.converged = true;
            break;
        }
    }

    trace.secrecy_rate_final = rate_from_ratio(ratio);
    trace.wall_time = clock.elapsed();
    Ok(Solution {
        beamformer: current.beamformer,
        phases,
        trace,
    })
}
