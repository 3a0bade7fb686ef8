use irs_secrecy::experiment::{no_irs_baseline, random_phase_baseline};
use irs_secrecy::output::{parse_results, write_results};
use irs_secrecy::presets::preset;
use irs_secrecy::{run_trials, ExperimentSpec, OutputFormat, ResultRow, RunSettings, SolverKind};
use irs_secrecy_core::channel::{build_instance, trial_rng};
use irs_secrecy_core::model::optimal_beamformer_for_channels;
use irs_secrecy_core::numerics::ComplexVector;
use irs_secrecy_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn small(name: &str, trials: usize) -> ExperimentSpec {
    let mut spec = preset(name).unwrap();
    spec.scenario.trials = trials;
    spec
}

fn rate(rows: &[ResultRow], trial: u64, solver: SolverKind, p_dbm: f64) -> f64 {
    rows.iter()
        .find(|r| r.trial == trial && r.solver == solver.name() && r.p_dbm == p_dbm)
        .and_then(|r| r.rate_bps_hz)
        .unwrap()
}

#[test]
fn rows_are_complete_and_ordered() {
    let spec = small("fig4_near", 3);
    let out = run_trials(&spec, RunSettings::default()).unwrap();
    assert_eq!(
        out.rows.len(),
        3 * spec.power_grid_dbm.len() * spec.solvers.len()
    );
    assert_eq!(out.failures(), 0);
    let keys: Vec<(u64, usize)> = out
        .rows
        .iter()
        .map(|r| {
            (
                r.trial,
                spec.power_grid_dbm
                    .iter()
                    .position(|&p| p == r.p_dbm)
                    .unwrap(),
            )
        })
        .collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    assert!(out.rows.iter().all(|r| r.wall_ms == 0.0));
    assert!(out.traces.is_empty());
    assert_eq!(
        out.summary.len(),
        spec.power_grid_dbm.len() * spec.solvers.len()
    );
}

#[test]
fn solvers_share_each_channel_realization() {
    // With one element the IRS phase only rotates the cascaded channel, so any
    // phase gives the optimal rate.
    let mut spec = small("fig4_far", 5);
    spec.scenario.m = 1;
    let out = run_trials(&spec, RunSettings::default()).unwrap();
    for trial in 0..5 {
        for &p in &spec.power_grid_dbm {
            let bcd = rate(&out.rows, trial, SolverKind::Bcd, p);
            let random = rate(&out.rows, trial, SolverKind::RandomPhaseBaseline, p);
            let aomm = rate(&out.rows, trial, SolverKind::Aomm, p);
            assert!(
                (bcd - random).abs() <= 1e-9 * (1.0 + bcd),
                "trial {trial} P {p}"
            );
            assert!(
                (bcd - aomm).abs() <= 1e-9 * (1.0 + bcd),
                "trial {trial} P {p}"
            );
        }
    }
}

#[test]
fn optimized_phases_beat_random_phases_on_average() {
    let out = run_trials(&small("fig4_far", 20), RunSettings::default()).unwrap();
    for s in out.summary.chunks(4) {
        let by = |k: SolverKind| s.iter().find(|r| r.solver == k.name()).unwrap().mean_rate;
        assert!(by(SolverKind::Bcd) >= by(SolverKind::RandomPhaseBaseline));
        assert!(by(SolverKind::RandomPhaseBaseline) >= 0.0);
        assert!((by(SolverKind::Bcd) - by(SolverKind::Aomm)).abs() <= 0.05 * by(SolverKind::Bcd));
    }
}

#[test]
fn rates_grow_with_power() {
    let out = run_trials(&small("fig4_near", 10), RunSettings::default()).unwrap();
    let means: Vec<f64> = out
        .summary
        .iter()
        .filter(|r| r.solver == SolverKind::Bcd.name())
        .map(|r| r.mean_rate)
        .collect();
    assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
}

#[test]
fn convergence_traces_are_monotone_and_match_rows() {
    let spec = small("fig3", 2);
    let out = run_trials(&spec, RunSettings::default()).unwrap();
    assert!(!out.traces.is_empty());
    for row in &out.rows {
        let trace: Vec<_> = out
            .traces
            .iter()
            .filter(|t| t.trial == row.trial && t.solver == row.solver && t.m == row.m)
            .collect();
        assert_eq!(trace.len(), row.iterations + 1);
        assert_eq!(trace.last().unwrap().block_updates, row.block_updates);
        for w in trace.windows(2) {
            assert!(w[1].objective >= w[0].objective * (1.0 - 1e-12));
            assert_eq!(w[1].iteration, w[0].iteration + 1);
        }
        let final_rate = trace.last().unwrap().objective.log2().max(0.0);
        assert!((final_rate - row.rate_bps_hz.unwrap()).abs() < 1e-9);
    }
}

#[test]
fn timing_is_recorded_only_on_request() {
    let spec = small("fig3", 1);
    let timed = run_trials(
        &spec,
        RunSettings {
            threads: Some(1),
            record_timing: true,
        },
    )
    .unwrap();
    assert!(timed.rows.iter().all(|r| r.wall_ms > 0.0));
}

#[test]
fn direct_baseline_beats_random_beamformers() {
    let spec = preset("fig5").unwrap();
    for trial in 0..10 {
        let inst = build_instance(&spec.scenario, &mut trial_rng(7, trial)).unwrap();
        let best = no_irs_baseline(&inst).unwrap();
        let (h_l, h_e) = (inst.direct_h_l().unwrap(), inst.direct_h_e().unwrap());
        let mut rng = trial_rng(8, trial);
        for _ in 0..1000 {
            let f: Vec<Complex64> = (0..inst.n_t())
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let norm: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let f: Vec<Complex64> = f.iter().map(|z| z * (inst.p().sqrt() / norm)).collect();
            let gain = |h: &ComplexVector, s2: f64| {
                let a: Complex64 = h.iter().zip(&f).map(|(h, f)| h.conj() * f).sum();
                1.0 + a.norm_sqr() / s2
            };
            let r = (gain(h_l, inst.sigma2_l()) / gain(h_e, inst.sigma2_e()))
                .log2()
                .max(0.0);
            assert!(best >= r - 1e-9);
        }
        let sol =
            optimal_beamformer_for_channels(h_l, h_e, inst.sigma2_l(), inst.sigma2_e(), inst.p())
                .unwrap();
        assert!((sol.beamformer.power() - inst.p()).abs() <= 1e-9 * inst.p());
    }
}

#[test]
fn random_phase_baseline_is_nonnegative() {
    let spec = preset("fig4_near").unwrap();
    let inst = build_instance(&spec.scenario, &mut trial_rng(1, 0)).unwrap();
    let mut rng = trial_rng(1, 1);
    for _ in 0..50 {
        assert!(random_phase_baseline(&inst, &mut rng).unwrap() >= 0.0);
    }
}

#[test]
fn identical_seeds_give_identical_rows() {
    let spec = small("fig4_near", 3);
    let a = run_trials(&spec, RunSettings::default()).unwrap();
    let b = run_trials(
        &spec,
        RunSettings {
            threads: Some(2),
            record_timing: false,
        },
    )
    .unwrap();
    assert_eq!(a.rows, b.rows);
    let mut other = spec.clone();
    other.scenario.seed += 1;
    let c = run_trials(&other, RunSettings::default()).unwrap();
    assert_ne!(a.rows, c.rows);
}

fn row_strategy() -> impl Strategy<Value = ResultRow> {
    (
        0u64..1000,
        prop::sample::select(vec![
            "bcd",
            "aomm",
            "no_irs_baseline",
            "random_phase_baseline",
        ]),
        1usize..64,
        1usize..64,
        -30.0f64..30.0,
        prop::option::of(0.0f64..40.0),
        0usize..10_000,
        0usize..100_000,
    )
        .prop_map(
            |(trial, solver, m, n_t, p_dbm, rate, iterations, block_updates)| ResultRow {
                experiment: "prop".into(),
                trial,
                solver: solver.into(),
                m,
                n_t,
                p_dbm,
                rate_bps_hz: rate,
                iterations,
                block_updates,
                wall_ms: 0.0,
            },
        )
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-11 * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn results_round_trip(rows in prop::collection::vec(row_strategy(), 0..20), jsonl in any::<bool>()) {
        let format = if jsonl { OutputFormat::Jsonl } else { OutputFormat::Csv };
        let mut buf = Vec::new();
        write_results(&rows, format, &mut buf).unwrap();
        let back = parse_results(buf.as_slice(), format).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!((a.trial, &a.solver, a.m, a.n_t), (b.trial, &b.solver, b.m, b.n_t));
            prop_assert_eq!((a.iterations, a.block_updates), (b.iterations, b.block_updates));
            prop_assert!(close(a.p_dbm, b.p_dbm));
            match (a.rate_bps_hz, b.rate_bps_hz) {
                (Some(x), Some(y)) => prop_assert!(close(x, y)),
                (None, None) => {}
                other => prop_assert!(false, "rate mismatch {:?}", other),
            }
        }
        let mut again = Vec::new();
        write_results(&back, format, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }
}
