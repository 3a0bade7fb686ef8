//! Monte Carlo driver: paired trials over shared channel draws.

use std::time::Instant;

use irs_secrecy_core::aomm::solve_aomm;
use irs_secrecy_core::bcd::solve_bcd;
use irs_secrecy_core::channel::{
    build_instance, dbm_to_linear, sample_uniform_phases, trial_rng, SystemInstance,
};
use irs_secrecy_core::model::{
    optimal_beamformer, optimal_beamformer_for_channels, rate_from_ratio, PhaseVector,
};
use irs_secrecy_core::solver::{Solution, SolverOptions};
use irs_secrecy_core::{Error, Result as CoreResult};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spec::{ExperimentKind, ExperimentSpec, SolverKind};
use crate::HarnessError;

/// One solver's result on one channel realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub trial: u64,
    pub solver: String,
    pub m: usize,
    pub n_t: usize,
    pub p_dbm: f64,
    /// `None` when the solver hit a numerical failure.
    pub rate_bps_hz: Option<f64>,
    pub iterations: usize,
    pub block_updates: usize,
    pub wall_ms: f64,
}

/// One point of a solver's objective trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub experiment: String,
    pub trial: u64,
    pub solver: String,
    pub m: usize,
    pub n_t: usize,
    pub iteration: usize,
    /// Cumulative block updates at this point.
    pub block_updates: usize,
    pub objective: f64,
}

/// Aggregate over trials for one (solver, M, N_t, P) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub solver: String,
    pub m: usize,
    pub n_t: usize,
    pub p_dbm: f64,
    pub count: usize,
    pub failures: usize,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub mean_iterations: f64,
    pub mean_block_updates: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    /// Filled for convergence experiments only.
    pub traces: Vec<TraceRow>,
    pub summary: Vec<SummaryRow>,
}

impl RunOutput {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.rate_bps_hz.is_none()).count()
    }
}

/// Knobs that do not belong to the experiment itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunSettings {
    /// Worker threads; `None` uses rayon's global pool.
    pub threads: Option<usize>,
    /// Fill `wall_ms`. Off by default so that outputs are byte-reproducible.
    pub record_timing: bool,
}

/// Secrecy rate of the direct-link system without an IRS, with the optimal
/// transmit beamformer on the direct channels.
pub fn no_irs_baseline(inst: &SystemInstance) -> CoreResult<f64> {
    let (Some(h_l), Some(h_e)) = (inst.direct_h_l(), inst.direct_h_e()) else {
        return Err(Error::InvalidArgument(
            "instance has no direct channels".into(),
        ));
    };
    let sol =
        optimal_beamformer_for_channels(h_l, h_e, inst.sigma2_l(), inst.sigma2_e(), inst.p())?;
    Ok(rate_from_ratio(sol.ratio))
}

/// Secrecy rate with uniformly random IRS phases and the optimal beamformer
/// for them.
pub fn random_phase_baseline<R: Rng + ?Sized>(
    inst: &SystemInstance,
    rng: &mut R,
) -> CoreResult<f64> {
    let phases = PhaseVector::new(sample_uniform_phases(rng, inst.m()));
    Ok(rate_from_ratio(optimal_beamformer(inst, &phases)?.ratio))
}

struct Job {
    point: (usize, usize),
    trial: u64,
}

fn trace_rows(
    spec: &ExperimentSpec,
    job: &Job,
    solver: SolverKind,
    sol: &Solution,
) -> Vec<TraceRow> {
    let per_iter = match solver {
        SolverKind::Bcd => job.point.0 + 1,
        _ => 2,
    };
    sol.trace
        .objective_history
        .iter()
        .enumerate()
        .map(|(i, &objective)| TraceRow {
            experiment: spec.id.clone(),
            trial: job.trial,
            solver: solver.name().to_string(),
            m: job.point.0,
            n_t: job.point.1,
            iteration: i,
            block_updates: i * per_iter,
            objective,
        })
        .collect()
}

fn run_job(
    spec: &ExperimentSpec,
    job: &Job,
    opts: &SolverOptions,
    settings: RunSettings,
) -> (Vec<ResultRow>, Vec<TraceRow>) {
    let mut cfg = spec.scenario.clone();
    cfg.m = job.point.0;
    cfg.n_t = job.point.1;
    let mut rng = trial_rng(spec.scenario.seed, job.trial);
    let base = build_instance(&cfg, &mut rng).expect("validated scenario builds");

    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for p_dbm in spec.power_points() {
        let inst = base
            .clone()
            .with_power(dbm_to_linear(p_dbm))
            .expect("finite power");
        // Baseline randomness is drawn from the trial stream after the channels,
        // identically for every power level.
        let mut phase_rng = rng.clone();
        for &solver in &spec.solvers {
            let start = Instant::now();
            let outcome: CoreResult<(f64, usize, usize, Option<Solution>)> = match solver {
                SolverKind::Bcd | SolverKind::Aomm => {
                    let solved = if solver == SolverKind::Bcd {
                        solve_bcd(&inst, opts)
                    } else {
                        solve_aomm(&inst, opts)
                    };
                    solved.map(|s| {
                        (
                            s.trace.secrecy_rate_final,
                            s.trace.iterations,
                            s.trace.block_updates,
                            Some(s),
                        )
                    })
                }
                SolverKind::NoIrsBaseline => no_irs_baseline(&inst).map(|r| (r, 0, 0, None)),
                SolverKind::RandomPhaseBaseline => {
                    random_phase_baseline(&inst, &mut phase_rng).map(|r| (r, 0, 0, None))
                }
            };
            let wall_ms = if settings.record_timing {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            let (rate, iterations, block_updates) = match outcome {
                Ok((rate, it, blocks, sol)) => {
                    if spec.kind == ExperimentKind::Convergence {
                        if let Some(sol) = &sol {
                            traces.extend(trace_rows(spec, job, solver, sol));
                        }
                    }
                    (Some(rate), it, blocks)
                }
                Err(e) => {
                    log::warn!(
                        "{} failed on trial {} (M={}, N_t={}, P={p_dbm} dBm): {e}",
                        solver.name(),
                        job.trial,
                        job.point.0,
                        job.point.1
                    );
                    (None, 0, 0)
                }
            };
            rows.push(ResultRow {
                experiment: spec.id.clone(),
                trial: job.trial,
                solver: solver.name().to_string(),
                m: job.point.0,
                n_t: job.point.1,
                p_dbm,
                rate_bps_hz: rate,
                iterations,
                block_updates,
                wall_ms,
            });
        }
    }
    (rows, traces)
}

/// Runs every trial of `spec`. Each trial builds one channel realization per
/// `(M, N_t)` point and evaluates every selected solver on it. Rows come out
/// ordered by point, trial, power and solver regardless of thread count.
pub fn run_trials(spec: &ExperimentSpec, settings: RunSettings) -> Result<RunOutput, HarnessError> {
    spec.validate()?;
    let opts = spec.solver_options;
    let jobs: Vec<Job> = spec
        .dimension_points()
        .into_iter()
        .flat_map(|point| (0..spec.scenario.trials as u64).map(move |trial| Job { point, trial }))
        .collect();

    let work = || -> Vec<(Vec<ResultRow>, Vec<TraceRow>)> {
        jobs.par_iter()
            .map(|job| run_job(spec, job, &opts, settings))
            .collect()
    };
    let results = match settings.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(format!("cannot build thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut out = RunOutput::default();
    for (rows, traces) in results {
        out.rows.extend(rows);
        out.traces.extend(traces);
    }
    out.summary = summarize(&out.rows, spec);
    Ok(out)
}

/// Mean and sample standard deviation per (point, power, solver).
pub fn summarize(rows: &[ResultRow], spec: &ExperimentSpec) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for (m, n_t) in spec.dimension_points() {
        for p_dbm in spec.power_points() {
            for solver in &spec.solvers {
                let cell: Vec<&ResultRow> = rows
                    .iter()
                    .filter(|r| {
                        r.m == m && r.n_t == n_t && r.p_dbm == p_dbm && r.solver == solver.name()
                    })
                    .collect();
                let rates: Vec<f64> = cell.iter().filter_map(|r| r.rate_bps_hz).collect();
                let n = rates.len();
                let mean = if n > 0 {
                    rates.iter().sum::<f64>() / n as f64
                } else {
                    f64::NAN
                };
                let std = if n > 1 {
                    (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
                } else {
                    0.0
                };
                let ok: Vec<&&ResultRow> =
                    cell.iter().filter(|r| r.rate_bps_hz.is_some()).collect();
                let avg = |f: fn(&ResultRow) -> usize| {
                    if ok.is_empty() {
                        f64::NAN
                    } else {
                        ok.iter().map(|r| f(r) as f64).sum::<f64>() / ok.len() as f64
                    }
                };
                out.push(SummaryRow {
                    solver: solver.name().to_string(),
                    m,
                    n_t,
                    p_dbm,
                    count: cell.len(),
                    failures: cell.len() - n,
                    mean_rate: mean,
                    std_rate: std,
                    mean_iterations: avg(|r| r.iterations),
                    mean_block_updates: avg(|r| r.block_updates),
                });
            }
        }
    }
    out
}
