//! Named experiment presets.
//!
//! All presets use `σ_l² = σ_e² = −80 dBm`, path-loss exponent 4 and a 10 m
//! reference distance.
//!
//! * `fig3`: convergence traces, `N_t = 5`, `P = 5 dBm`, `r_TR = 250 m`,
//!   `r_Rl = r_Re = 160 m`, `M ∈ {5, 40}`.
//! * `fig4_near` / `fig4_far`: secrecy rate versus transmit power at `M = 10`,
//!   `N_t = 8`, against the no-IRS and random-phase baselines. The IRS
//!   geometry reuses `r_TR = 200 m`, `r_Rl = 150 m`, `r_Re = 100 m`. Direct
//!   links are an assumption: `fig4_near` puts both receivers closer to the
//!   transmitter than to the IRS (`r_Tl = 120 m`, `r_Te = 80 m`), `fig4_far`
//!   puts them farther (`r_Tl = 300 m`, `r_Te = 110 m`).
//! * `fig5`: `P = 5 dBm`, `r_TR = 200 m`, `r_Rl = 150 m`, `r_Re = 100 m`,
//!   `r_Tl = 300 m`, `r_Te = 110 m`; sweeps `M` at `N_t = 10` and `N_t` at
//!   `M = 10`.

use irs_secrecy_core::channel::ScenarioConfig;
use irs_secrecy_core::solver::SolverOptions;

use crate::spec::{ExperimentKind, ExperimentSpec, OutputFormat, SolverKind};

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_SEED: u64 = 2019;

pub const PRESET_NAMES: [&str; 4] = ["fig3", "fig4_near", "fig4_far", "fig5"];

fn base_scenario() -> ScenarioConfig {
    ScenarioConfig {
        n_t: 8,
        m: 10,
        p_dbm: 5.0,
        noise_l_dbm: -80.0,
        noise_e_dbm: -80.0,
        alpha: 4.0,
        r_tr: 200.0,
        r_rl: 150.0,
        r_re: 100.0,
        r_tl: None,
        r_te: None,
        seed: DEFAULT_SEED,
        trials: DEFAULT_TRIALS,
    }
}

fn fig4(id: &str, r_tl: f64, r_te: f64) -> ExperimentSpec {
    ExperimentSpec {
        id: id.to_string(),
        kind: ExperimentKind::RateVsPower,
        scenario: ScenarioConfig {
            r_tl: Some(r_tl),
            r_te: Some(r_te),
            ..base_scenario()
        },
        solvers: vec![
            SolverKind::Bcd,
            SolverKind::Aomm,
            SolverKind::NoIrsBaseline,
            SolverKind::RandomPhaseBaseline,
        ],
        power_grid_dbm: vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
        m_grid: vec![],
        nt_grid: vec![],
        output_path: format!("{id}.csv"),
        format: OutputFormat::Csv,
        solver_options: SolverOptions::default(),
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Option<ExperimentSpec> {
    let spec = match name {
        "fig3" => ExperimentSpec {
            id: "fig3".into(),
            kind: ExperimentKind::Convergence,
            scenario: ScenarioConfig {
                n_t: 5,
                m: 5,
                r_tr: 250.0,
                r_rl: 160.0,
                r_re: 160.0,
                ..base_scenario()
            },
            solvers: vec![SolverKind::Bcd, SolverKind::Aomm],
            power_grid_dbm: vec![],
            m_grid: vec![5, 40],
            nt_grid: vec![],
            output_path: "fig3.csv".into(),
            format: OutputFormat::Csv,
            solver_options: SolverOptions::default(),
        },
        "fig4_near" => fig4("fig4_near", 120.0, 80.0),
        "fig4_far" => fig4("fig4_far", 300.0, 110.0),
        "fig5" => ExperimentSpec {
            id: "fig5".into(),
            kind: ExperimentKind::SweepMNt,
            scenario: ScenarioConfig {
                n_t: 10,
                m: 10,
                r_tl: Some(300.0),
                r_te: Some(110.0),
                ..base_scenario()
            },
            solvers: vec![SolverKind::Aomm, SolverKind::NoIrsBaseline],
            power_grid_dbm: vec![],
            m_grid: vec![10, 20, 30, 40],
            nt_grid: vec![10, 20, 30, 40],
            output_path: "fig5.csv".into(),
            format: OutputFormat::Csv,
            solver_options: SolverOptions::default(),
        },
        _ => return None,
    };
    debug_assert!(spec.validate().is_ok());
    Some(spec)
}
