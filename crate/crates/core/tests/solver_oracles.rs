mod common;

use std::f64::consts::PI;

use common::*;
use irs_secrecy_core::aomm::{
    minorizer, mm_direction, mm_phase_update, solve_aomm, solve_aomm_from, surrogate_value,
};
use irs_secrecy_core::bcd::{
    branch_rule_phase, optimal_phase_k, phase_coefficients, solve_bcd, PhaseCoefficients,
};
use irs_secrecy_core::channel::{ChannelRng, SystemInstance};
use irs_secrecy_core::model::{
    build_quadratic_forms, initial_phases, objective_ratio, optimal_beamformer, wrap_phase,
    Beamformer, PhaseVector,
};
use irs_secrecy_core::numerics::{dot, ComplexVector};
use irs_secrecy_core::solver::{SolveTrace, SolverOptions, TraceGranularity};
use irs_secrecy_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_coefficients(rng: &mut ChannelRng) -> PhaseCoefficients {
    let d_l = rng.random_range(0.0..5.0);
    let d_e = rng.random_range(0.0..5.0);
    PhaseCoefficients {
        c_l: 0.5 + d_l + rng.random_range(0.0..3.0),
        d_l,
        p_l: rng.random_range(-PI..PI),
        c_e: 0.5 + d_e + rng.random_range(0.0..3.0),
        d_e,
        p_e: rng.random_range(-PI..PI),
    }
}

fn grid_max(c: &PhaseCoefficients, points: usize) -> f64 {
    (0..points)
        .map(|i| c.value(-PI + 2.0 * PI * (i as f64 + 1.0) / points as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn block_options() -> SolverOptions {
    SolverOptions {
        trace_granularity: TraceGranularity::Block,
        ..SolverOptions::default()
    }
}

fn assert_monotone(history: &[f64]) {
    for w in history.windows(2) {
        assert!(w[1] >= w[0] - 1e-10 * w[0].abs(), "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn coefficients_reproduce_single_phase_slice() {
    let mut rng = rng(20);
    for _ in 0..20 {
        let m = rng.random_range(2..=8);
        let n_t = rng.random_range(1..=4);
        let inst = instance(&mut rng, m, n_t);
        let f = full_power(&mut rng, n_t, inst.p());
        let ph = phases(&mut rng, m);
        let k = rng.random_range(0..m);
        let c = phase_coefficients(&inst, &Beamformer::new(f.clone()), &ph, k).unwrap();
        assert!(c.c_l >= 0.5 && c.c_e >= 0.5 && c.c_e > c.d_e);
        for i in 0..100 {
            let theta = -PI + 2.0 * PI * i as f64 / 100.0;
            let mut probe = ph.theta().to_vec();
            probe[k] = theta;
            assert!(rel(c.value(theta), dense_ratio(&inst, &f, &probe)) < 1e-10);
        }
    }
}

#[test]
fn coefficients_reject_bad_index() {
    let mut rng = rng(21);
    let inst = instance(&mut rng, 3, 2);
    let f = Beamformer::new(full_power(&mut rng, 2, inst.p()));
    assert!(phase_coefficients(&inst, &f, &PhaseVector::zeros(3), 3).is_err());
}

#[test]
fn single_element_slice_is_flat() {
    let mut rng = rng(22);
    let inst = instance(&mut rng, 1, 3);
    let f = Beamformer::new(full_power(&mut rng, 3, inst.p()));
    let c = phase_coefficients(&inst, &f, &PhaseVector::zeros(1), 0).unwrap();
    assert!(c.is_constant());
    assert_eq!(optimal_phase_k(&c), 0.0);
}

#[test]
fn silent_element_has_no_phase_dependence() {
    let mut rng = rng(23);
    let base = instance(&mut rng, 4, 2);
    let mut h_l = base.h_l().clone();
    let mut h_e = base.h_e().clone();
    h_l[2] = Complex64::new(0.0, 0.0);
    h_e[2] = Complex64::new(0.0, 0.0);
    let inst = SystemInstance::new(base.g().clone(), h_l, h_e, 1.0, 1.0, base.p()).unwrap();
    let f = Beamformer::new(full_power(&mut rng, 2, inst.p()));
    let c = phase_coefficients(&inst, &f, &phases(&mut rng, 4), 2).unwrap();
    assert_eq!((c.d_l, c.d_e), (0.0, 0.0));
}

#[test]
fn optimal_phase_matches_fine_grid() {
    let mut rng = rng(24);
    for _ in 0..500 {
        let c = random_coefficients(&mut rng);
        let best = grid_max(&c, 100_000);
        let theta = optimal_phase_k(&c);
        assert!(theta > -PI && theta <= PI);
        assert!(c.value(theta) >= best - 1e-9 * best, "{c:?}");
    }
}

#[test]
fn sign_of_b_selects_the_maximizing_branch() {
    let mut rng = rng(25);
    for _ in 0..10_000 {
        let c = random_coefficients(&mut rng);
        if c.d_l == 0.0 || c.d_e == 0.0 {
            continue;
        }
        let rule = branch_rule_phase(&c).unwrap();
        let argmax = optimal_phase_k(&c);
        assert!(
            (c.value(rule) - c.value(argmax)).abs() <= 1e-12 * c.value(argmax),
            "{c:?}"
        );
    }
}

#[test]
fn sign_of_a_does_not_select_the_branch() {
    let mut rng = rng(26);
    let mut disagreements = 0;
    let trials = 10_000;
    for _ in 0..trials {
        let c = random_coefficients(&mut rng);
        let (a, b, cc) = c.stationary_terms();
        let r = a.hypot(b);
        let base = (a / b).atan() - (cc / r).clamp(-1.0, 1.0).acos();
        let by_a = wrap_phase(if a < 0.0 { base + PI } else { base });
        let best = c.value(optimal_phase_k(&c));
        if c.value(by_a) < best - 1e-12 * best {
            disagreements += 1;
        }
    }
    assert!(disagreements > trials / 4, "{disagreements}");
}

#[test]
fn degenerate_slices_use_closed_forms() {
    let c = PhaseCoefficients {
        c_l: 2.0,
        d_l: 1.0,
        p_l: 0.4,
        c_e: 1.0,
        d_e: 0.0,
        p_e: 0.0,
    };
    assert!((optimal_phase_k(&c) - (-0.4)).abs() < 1e-15);
    let c = PhaseCoefficients {
        c_l: 1.0,
        d_l: 0.0,
        p_l: 0.0,
        c_e: 2.0,
        d_e: 1.0,
        p_e: 0.4,
    };
    assert!((optimal_phase_k(&c) - (PI - 0.4)).abs() < 1e-15);
}

fn capacity_bound(inst: &SystemInstance) -> f64 {
    let g = dense(inst.g());
    let lambda = (g.adjoint() * &g).symmetric_eigen().eigenvalues.max();
    1.0 + inst.p() * lambda * inst.h_l().norm_sqr() / inst.sigma2_l()
}

fn check_solution_trace(inst: &SystemInstance, trace: &SolveTrace) {
    assert_monotone(&trace.objective_history);
    assert_monotone(&trace.block_history);
    let bound = capacity_bound(inst);
    assert!(trace
        .objective_history
        .iter()
        .all(|&g| g <= bound * (1.0 + 1e-12)));
    assert!(trace.secrecy_rate_final >= 0.0);
}

#[test]
fn bcd_ascends_every_block() {
    let mut rng = rng(27);
    for _ in 0..20 {
        let m = rng.random_range(1..=10);
        let n_t = rng.random_range(1..=4);
        let inst = instance(&mut rng, m, n_t);
        let sol = solve_bcd(&inst, &block_options()).unwrap();
        check_solution_trace(&inst, &sol.trace);
        assert_eq!(sol.trace.block_history.len(), 1 + sol.trace.block_updates);
        assert_eq!(sol.trace.block_updates, sol.trace.iterations * (m + 1));
        let final_ratio = objective_ratio(&inst, &sol.beamformer, &sol.phases).unwrap();
        assert!(rel(final_ratio, *sol.trace.objective_history.last().unwrap()) < 1e-10);
    }
}

#[test]
fn aomm_ascends_and_stays_on_torus() {
    let mut rng = rng(28);
    for _ in 0..20 {
        let m = rng.random_range(1..=10);
        let n_t = rng.random_range(1..=4);
        let inst = instance(&mut rng, m, n_t);
        let sol = solve_aomm(&inst, &block_options()).unwrap();
        check_solution_trace(&inst, &sol.trace);
        assert_eq!(sol.trace.block_updates, 2 * sol.trace.iterations);
        for v in sol.phases.reflection().iter() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn solvers_start_from_singular_vector_initialization() {
    let mut rng = rng(29);
    let inst = instance(&mut rng, 6, 3);
    let start = optimal_beamformer(&inst, &initial_phases(&inst).unwrap())
        .unwrap()
        .ratio;
    for trace in [
        solve_bcd(&inst, &SolverOptions::default()).unwrap().trace,
        solve_aomm(&inst, &SolverOptions::default()).unwrap().trace,
    ] {
        assert!(rel(trace.objective_history[0], start) < 1e-12);
        assert!(trace.converged);
    }
}

#[test]
fn single_element_surface_converges_immediately() {
    let mut rng = rng(30);
    let inst = instance(&mut rng, 1, 4);
    let reference = optimal_beamformer(&inst, &PhaseVector::zeros(1))
        .unwrap()
        .ratio;
    let bcd = solve_bcd(&inst, &SolverOptions::default()).unwrap();
    let aomm = solve_aomm(&inst, &SolverOptions::default()).unwrap();
    for sol in [&bcd, &aomm] {
        assert_eq!(sol.trace.iterations, 1);
        assert!(sol.trace.converged);
        assert!(rel(sol.trace.final_ratio(), reference) < 1e-12);
    }
}

#[test]
fn without_eavesdropper_bcd_reaches_high_gain() {
    let mut rng = rng(31);
    let base = instance(&mut rng, 6, 3);
    let inst = SystemInstance::new(
        base.g().clone(),
        base.h_l().clone(),
        ComplexVector::zeros(6),
        1.0,
        1.0,
        2.0,
    )
    .unwrap();
    let sol = solve_bcd(&inst, &SolverOptions::default()).unwrap();
    let init = optimal_beamformer(&inst, &initial_phases(&inst).unwrap())
        .unwrap()
        .ratio;
    assert!(sol.trace.final_ratio() >= init);
    assert!(sol.trace.final_ratio() <= capacity_bound(&inst));
    // With no eavesdropper the ratio is 1 + P‖a_l‖²/σ², so no random phase does better.
    for _ in 0..2_000 {
        let ph = phases(&mut rng, 6);
        assert!(
            optimal_beamformer(&inst, &ph).unwrap().ratio <= sol.trace.final_ratio() * (1.0 + 1e-6)
        );
    }
}

#[test]
fn iteration_cap_reports_unconverged() {
    let mut rng = rng(32);
    let inst = instance(&mut rng, 12, 3);
    let opts = SolverOptions {
        epsilon: 1e-15,
        max_iterations: 2,
        ..SolverOptions::default()
    };
    let sol = solve_aomm(&inst, &opts).unwrap();
    assert_eq!(sol.trace.iterations, 2);
    assert!(!sol.trace.converged);
    assert!(solve_aomm_from(&inst, PhaseVector::zeros(3), &opts).is_err());
    let bad = SolverOptions {
        epsilon: 0.0,
        ..SolverOptions::default()
    };
    assert!(solve_bcd(&inst, &bad).is_err());
}

#[test]
fn minorizer_lower_bounds_objective() {
    let mut rng = rng(33);
    for _ in 0..1000 {
        let m = rng.random_range(1..=8);
        let n_t = rng.random_range(1..=4);
        let inst = instance(&mut rng, m, n_t);
        let forms =
            build_quadratic_forms(&inst, &Beamformer::new(full_power(&mut rng, n_t, inst.p())))
                .unwrap();
        let v = phases(&mut rng, m).reflection();
        let v_z = phases(&mut rng, m).reflection();
        assert!(forms.objective(&v) - minorizer(&v, &v_z, &forms) >= -1e-9);
        assert!((minorizer(&v_z, &v_z, &forms) - forms.objective(&v_z)).abs() <= 1e-9);
    }
}

#[test]
fn mm_direction_is_surrogate_gradient() {
    let mut rng = rng(34);
    for _ in 0..50 {
        let m = rng.random_range(2..=8);
        let n_t = rng.random_range(1..=4);
        let inst = instance(&mut rng, m, n_t);
        let forms =
            build_quadratic_forms(&inst, &Beamformer::new(full_power(&mut rng, n_t, inst.p())))
                .unwrap();
        let v_z = phases(&mut rng, m).reflection();
        let state = mm_direction(&forms, &v_z);
        assert!(state.lambda_max_ye >= 1.0 / m as f64);
        let scale = state.w.norm();
        let h = 1e-6;
        for k in 0..m {
            let nudge = |d: f64| {
                let mut v = v_z.clone();
                v[k] *= Complex64::from_polar(1.0, d);
                surrogate_value(&v, &v_z, &forms)
            };
            let numeric = (nudge(h) - nudge(-h)) / (2.0 * h);
            // d/dφ 2 Re(conj(w_k) e^{jφ} v_k) = −2 Im(conj(w_k) v_k)
            let analytic = -2.0 * (state.w[k].conj() * v_z[k]).im;
            assert!(
                (numeric - analytic).abs() <= 1e-6 * scale.max(1.0),
                "k={k}: {numeric} vs {analytic}"
            );
        }
    }
}

#[test]
fn phase_update_maximizes_linear_form() {
    let mut rng = rng(35);
    for _ in 0..10 {
        let m = rng.random_range(1..=8);
        let n_t = rng.random_range(1..=4);
        let inst = instance(&mut rng, m, n_t);
        let forms =
            build_quadratic_forms(&inst, &Beamformer::new(full_power(&mut rng, n_t, inst.p())))
                .unwrap();
        let state = mm_direction(&forms, &phases(&mut rng, m).reflection());
        let v = mm_phase_update(&state);
        let achieved = dot(&state.w, &v).re;
        let l1: f64 = state.w.iter().map(|z| z.norm()).sum();
        assert!((achieved - l1).abs() <= 1e-12 * l1.max(1.0));
        for _ in 0..10_000 {
            let u = phases(&mut rng, m).reflection();
            assert!(achieved >= dot(&state.w, &u).re - 1e-12 * l1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimal_phase_dominates_probes(
        d_l in 0.0f64..5.0, d_e in 0.0f64..5.0, extra_l in 0.0f64..3.0, extra_e in 0.0f64..3.0,
        p_l in -PI..PI, p_e in -PI..PI, probe in -PI..PI,
    ) {
        let c = PhaseCoefficients { c_l: 0.5 + d_l + extra_l, d_l, p_l, c_e: 0.5 + d_e + extra_e, d_e, p_e };
        let best = c.value(optimal_phase_k(&c));
        prop_assert!(best >= c.value(probe) - 1e-12 * best);
    }

    #[test]
    fn solvers_agree_on_tiny_instances(seed in any::<u64>()) {
        let mut rng = irs_secrecy_core::channel::trial_rng(seed, 9);
        let inst = instance(&mut rng, 3, 2);
        let bcd = solve_bcd(&inst, &SolverOptions::default()).unwrap();
        let aomm = solve_aomm(&inst, &SolverOptions::default()).unwrap();
        let lo = bcd.trace.objective_history[0];
        prop_assert!(bcd.trace.final_ratio() >= lo && aomm.trace.final_ratio() >= lo * (1.0 - 1e-12));
    }
}
