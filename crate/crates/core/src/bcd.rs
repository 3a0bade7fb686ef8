//! Element-wise block coordinate descent.
//!
//! Each outer iteration solves the beamformer block in closed form and then
//! sweeps `k = 1 … M`, replacing `θ_k` by the global maximizer of the
//! objective restricted to that single phase. With the other phases fixed the
//! objective is a ratio of shifted cosines,
//!
//! ```text
//!   (c_l + d_l cos(θ + p_l)) / (c_e + d_e cos(θ + p_e)),
//! ```
//!
//! whose stationary points solve `A sin θ + B cos θ = d_l d_e sin(p_e − p_l)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::SystemInstance;
use crate::model::{
    initial_phases, objective_ratio, optimal_beamformer, rate_from_ratio, wrap_phase, Beamformer,
    PhaseVector,
};
use crate::numerics::dot_u;
use crate::solver::{
    non_decreasing, relative_increment, Solution, SolveTrace, SolverOptions, Stopwatch,
    TraceGranularity,
};
use crate::{Error, Result};

const ASCENT_TOL: f64 = 1e-10;

/// Per-element constants of the single-phase objective slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCoefficients {
    pub c_l: f64,
    pub d_l: f64,
    pub p_l: f64,
    pub c_e: f64,
    pub d_e: f64,
    pub p_e: f64,
}

impl PhaseCoefficients {
    /// Coefficients from the split `h_i^H Φ G f = a_i e^{jθ_k} + b_i`.
    fn from_split(
        a_l: Complex64,
        b_l: Complex64,
        sigma2_l: f64,
        a_e: Complex64,
        b_e: Complex64,
        sigma2_e: f64,
    ) -> Self {
        let (c_l, d_l, p_l) = split_terms(a_l, b_l, sigma2_l);
        let (c_e, d_e, p_e) = split_terms(a_e, b_e, sigma2_e);
        // c_e − d_e = (1 + (|a_e| − |b_e|)²/σ_e²) / 2 ≥ 1/2
        assert!(
            c_e > d_e,
            "denominator of the phase slice must stay positive"
        );
        Self {
            c_l,
            d_l,
            p_l,
            c_e,
            d_e,
            p_e,
        }
    }

    /// The objective as a function of the single phase `θ`.
    pub fn value(&self, theta: f64) -> f64 {
        (self.c_l + self.d_l * (theta + self.p_l).cos())
            / (self.c_e + self.d_e * (theta + self.p_e).cos())
    }

    /// Neither link depends on this phase.
    pub fn is_constant(&self) -> bool {
        self.d_l == 0.0 && self.d_e == 0.0
    }

    /// `(A, B, C)` of the stationary equation `A sin θ + B cos θ = C`.
    pub fn stationary_terms(&self) -> (f64, f64, f64) {
        let a = self.c_e * self.d_l * self.p_l.cos() - self.c_l * self.d_e * self.p_e.cos();
        let b = self.c_e * self.d_l * self.p_l.sin() - self.c_l * self.d_e * self.p_e.sin();
        let c = self.d_l * self.d_e * (self.p_e - self.p_l).sin();
        (a, b, c)
    }
}

/// `(c, d, p)` with `1 + |a e^{jθ} + b|²/σ² = 2(c + d cos(θ + p))`.
fn split_terms(a: Complex64, b: Complex64, sigma2: f64) -> (f64, f64, f64) {
    let c = 0.5 * (1.0 + (a.norm_sqr() + b.norm_sqr()) / sigma2);
    let cross = a * b.conj();
    let d = cross.norm() / sigma2;
    let p = if d > 0.0 { cross.arg() } else { 0.0 };
    (c, d, p)
}

/// Running sums `S_i = Σ_m conj(h_{i,m}) e^{jθ_m} g_m^H f` for a fixed `f`.
struct ElementTerms<'a> {
    inst: &'a SystemInstance,
    /// `g_m^H f` for every element.
    z: Vec<Complex64>,
    t_l: Vec<Complex64>,
    t_e: Vec<Complex64>,
}

impl<'a> ElementTerms<'a> {
    fn new(inst: &'a SystemInstance, f: &Beamformer, phases: &PhaseVector) -> Self {
        let z: Vec<Complex64> = (0..inst.m())
            .map(|m| dot_u(inst.g().row(m), f.vector()))
            .collect();
        let mut terms = Self {
            inst,
            t_l: alloc::vec![Complex64::new(0.0, 0.0); z.len()],
            t_e: alloc::vec![Complex64::new(0.0, 0.0); z.len()],
            z,
        };
        for (k, &th) in phases.theta().iter().enumerate() {
            terms.set_phase(k, th);
        }
        terms
    }

    fn set_phase(&mut self, k: usize, theta: f64) {
        let rot = Complex64::from_polar(1.0, theta) * self.z[k];
        self.t_l[k] = self.inst.h_l()[k].conj() * rot;
        self.t_e[k] = self.inst.h_e()[k].conj() * rot;
    }

    fn coefficients(&self, k: usize) -> PhaseCoefficients {
        let a_l = self.inst.h_l()[k].conj() * self.z[k];
        let a_e = self.inst.h_e()[k].conj() * self.z[k];
        let others = |t: &[Complex64]| -> Complex64 {
            t.iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, v)| *v)
                .sum()
        };
        PhaseCoefficients::from_split(
            a_l,
            others(&self.t_l),
            self.inst.sigma2_l(),
            a_e,
            others(&self.t_e),
            self.inst.sigma2_e(),
        )
    }

    fn ratio(&self) -> f64 {
        let s_l: Complex64 = self.t_l.iter().sum();
        let s_e: Complex64 = self.t_e.iter().sum();
        (1.0 + s_l.norm_sqr() / self.inst.sigma2_l())
            / (1.0 + s_e.norm_sqr() / self.inst.sigma2_e())
    }
}

/// Coefficients of the objective as a function of `θ_k` alone (0-based `k`).
pub fn phase_coefficients(
    inst: &SystemInstance,
    f: &Beamformer,
    phases: &PhaseVector,
    k: usize,
) -> Result<PhaseCoefficients> {
    if k >= inst.m() {
        return Err(Error::invalid(alloc::format!(
            "element index {k} out of range for M = {}",
            inst.m()
        )));
    }
    if phases.len() != inst.m() || f.vector().len() != inst.n_t() {
        return Err(Error::invalid("dimension mismatch"));
    }
    Ok(ElementTerms::new(inst, f, phases).coefficients(k))
}

/// Closed-form branch selection: `θ̃ = arctan(A/B) − arccos(C/√(A²+B²))`,
/// shifted by `π` when `B < 0`. Equivalent to
/// `atan2(A, B) − arccos(C/√(A²+B²))`. Returns `None` when the slice has no
/// isolated stationary points.
pub fn branch_rule_phase(coeffs: &PhaseCoefficients) -> Option<f64> {
    let (a, b, c) = coeffs.stationary_terms();
    let r = a.hypot(b);
    if !(r > 0.0) {
        return None;
    }
    let base = (a / b).atan() - (c / r).clamp(-1.0, 1.0).acos();
    Some(wrap_phase(if b < 0.0 { base + PI } else { base }))
}

/// Global maximizer of [`PhaseCoefficients::value`] in `(−π, π]`.
///
/// Both stationary roots `atan2(A, B) ± arccos(C/R)` are evaluated together
/// with the single-argument-arctangent branch and its `π` shift, and the best
/// one is returned. Degenerate slices: constant → `0`; constant denominator
/// → `−p_l`; constant numerator → `π − p_e`.
pub fn optimal_phase_k(coeffs: &PhaseCoefficients) -> f64 {
    if coeffs.is_constant() {
        return 0.0;
    }
    if coeffs.d_e == 0.0 {
        return wrap_phase(-coeffs.p_l);
    }
    if coeffs.d_l == 0.0 {
        return wrap_phase(PI - coeffs.p_e);
    }
    let (a, b, c) = coeffs.stationary_terms();
    let r = a.hypot(b);
    let mut candidates: [f64; 4] = [0.0; 4];
    let count = if r > 0.0 {
        let ac = (c / r).clamp(-1.0, 1.0).acos();
        let phi = a.atan2(b);
        let tilde = (a / b).atan() - ac;
        candidates = [phi - ac, phi + ac, tilde, tilde + PI];
        4
    } else {
        // A = B = 0 forces C = 0 and a flat slice; keep the cheap endpoints.
        candidates[0] = -coeffs.p_l;
        candidates[1] = PI - coeffs.p_e;
        2
    };
    let mut best = wrap_phase(candidates[0]);
    let mut best_val = coeffs.value(best);
    for &cand in &candidates[1..count] {
        let th = wrap_phase(cand);
        let v = coeffs.value(th);
        if v > best_val {
            best = th;
            best_val = v;
        }
    }
    best
}

/// Element-wise BCD from the dominant-singular-vector initialization.
pub fn solve_bcd(inst: &SystemInstance, opts: &SolverOptions) -> Result<Solution> {
    solve_bcd_from(inst, initial_phases(inst)?, opts)
}

/// Element-wise BCD from caller-supplied starting phases.
pub fn solve_bcd_from(
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
        debug_assert!(
            non_decreasing(ratio, current.ratio, ASCENT_TOL),
            "beamformer block decreased the objective: {ratio} -> {}",
            current.ratio
        );
        ratio = current.ratio.max(ratio);
        if record_blocks {
            trace.block_history.push(current.ratio);
        }

        let mut terms = ElementTerms::new(inst, &current.beamformer, &phases);
        for k in 0..inst.m() {
            let coeffs = terms.coefficients(k);
            trace.block_updates += 1;
            if !coeffs.is_constant() {
                let old = phases.theta()[k];
                let new = optimal_phase_k(&coeffs);
                if coeffs.value(new) > coeffs.value(old) {
                    phases.set(k, new);
                    terms.set_phase(k, phases.theta()[k]);
                }
            }
            if record_blocks || cfg!(debug_assertions) {
                let r = terms.ratio();
                debug_assert!(
                    non_decreasing(ratio, r, ASCENT_TOL),
                    "phase block {k} decreased the objective: {ratio} -> {r}"
                );
                if record_blocks {
                    trace.block_history.push(r);
                }
            }
        }

        ratio = terms.ratio();
        trace.objective_history.push(ratio);
        trace.iterations = iter;
        if relative_increment(prev_outer, ratio) < opts.epsilon {
            trace.converged = true;
            break;
        }
    }

    let ratio = objective_ratio(inst, &current.beamformer, &phases)?;
    trace.secrecy_rate_final = rate_from_ratio(ratio);
    trace.wall_time = clock.elapsed();
    Ok(Solution {
        beamformer: current.beamformer,
        phases,
        trace,
    })
}
