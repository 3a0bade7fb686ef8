//! Experiment descriptions (`ExperimentSpec`) and their strict JSON form.

use std::path::Path;

use irs_secrecy_core::channel::ScenarioConfig;
use irs_secrecy_core::solver::SolverOptions;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Solver traces at each `M` of `m_grid` (or the scenario's `M`).
    Convergence,
    /// Rates over `power_grid_dbm` on shared channel draws.
    RateVsPower,
    /// Rates over `m_grid` at the scenario's `N_t`, then over `nt_grid` at the
    /// scenario's `M`.
    SweepMNt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Bcd,
    Aomm,
    NoIrsBaseline,
    RandomPhaseBaseline,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Bcd => "bcd",
            SolverKind::Aomm => "aomm",
            SolverKind::NoIrsBaseline => "no_irs_baseline",
            SolverKind::RandomPhaseBaseline => "random_phase_baseline",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            SolverKind::Bcd,
            SolverKind::Aomm,
            SolverKind::NoIrsBaseline,
            SolverKind::RandomPhaseBaseline,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    #[serde(alias = "json-lines")]
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Written to the `experiment` column.
    pub id: String,
    pub kind: ExperimentKind,
    pub scenario: ScenarioConfig,
    pub solvers: Vec<SolverKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub power_grid_dbm: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nt_grid: Vec<usize>,
    pub output_path: String,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub solver_options: SolverOptions,
}

fn strictly_increasing<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let spec: ExperimentSpec = serde_json::from_str(text)
            .map_err(|e| HarnessError::Config(format!("invalid experiment spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let cfg_err = |m: String| Err(HarnessError::Config(m));
        self.scenario
            .validate()
            .map_err(|e| HarnessError::Config(format!("scenario: {e}")))?;
        self.solver_options
            .validate()
            .map_err(|e| HarnessError::Config(format!("solver_options: {e}")))?;
        if self.solvers.is_empty() {
            return cfg_err("at least one solver must be selected".into());
        }
        let mut seen = self.solvers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.solvers.len() {
            return cfg_err("solvers must not repeat".into());
        }
        if self.solvers.contains(&SolverKind::NoIrsBaseline) && !self.scenario.has_direct_links() {
            return cfg_err("no_irs_baseline needs scenario.r_tl and scenario.r_te".into());
        }
        if !strictly_increasing(&self.power_grid_dbm)
            || self.power_grid_dbm.iter().any(|p| !p.is_finite())
        {
            return cfg_err("power_grid_dbm must be finite and strictly increasing".into());
        }
        if !strictly_increasing(&self.m_grid) || self.m_grid.contains(&0) {
            return cfg_err("m_grid must be positive and strictly increasing".into());
        }
        if !strictly_increasing(&self.nt_grid) || self.nt_grid.contains(&0) {
            return cfg_err("nt_grid must be positive and strictly increasing".into());
        }
        match self.kind {
            ExperimentKind::RateVsPower if self.power_grid_dbm.is_empty() => {
                cfg_err("rate_vs_power needs a non-empty power_grid_dbm".into())
            }
            ExperimentKind::SweepMNt if self.m_grid.is_empty() && self.nt_grid.is_empty() => {
                cfg_err("sweep_m_nt needs m_grid and/or nt_grid".into())
            }
            _ => Ok(()),
        }
    }

    /// `(M, N_t)` pairs evaluated by this experiment, in output order.
    pub fn dimension_points(&self) -> Vec<(usize, usize)> {
        let s = &self.scenario;
        let mut pts: Vec<(usize, usize)> = match self.kind {
            ExperimentKind::Convergence if !self.m_grid.is_empty() => {
                self.m_grid.iter().map(|&m| (m, s.n_t)).collect()
            }
            ExperimentKind::SweepMNt => self
                .m_grid
                .iter()
                .map(|&m| (m, s.n_t))
                .chain(self.nt_grid.iter().map(|&n| (s.m, n)))
                .collect(),
            _ => vec![(s.m, s.n_t)],
        };
        let mut seen = std::collections::HashSet::new();
        pts.retain(|p| seen.insert(*p));
        pts
    }

    /// Transmit powers in dBm evaluated at every dimension point.
    pub fn power_points(&self) -> Vec<f64> {
        match self.kind {
            ExperimentKind::RateVsPower => self.power_grid_dbm.clone(),
            _ => vec![self.scenario.p_dbm],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"{
        "id": "t",
        "kind": "rate_vs_power",
        "scenario": {
            "n_t": 4, "m": 6, "p_dbm": 5.0, "noise_l_dbm": -80.0, "noise_e_dbm": -80.0,
            "alpha": 4.0, "r_tr": 200.0, "r_rl": 150.0, "r_re": 100.0,
            "r_tl": 300.0, "r_te": 110.0, "seed": 3, "trials": 2
        },
        "solvers": ["bcd", "no_irs_baseline"],
        "power_grid_dbm": [0.0, 5.0],
        "output_path": "out.csv"
    }"#;

    #[test]
    fn parses_valid_spec() {
        let spec = ExperimentSpec::from_json(SPEC).unwrap();
        assert_eq!(spec.kind, ExperimentKind::RateVsPower);
        assert_eq!(spec.power_points(), vec![0.0, 5.0]);
        assert_eq!(spec.format, OutputFormat::Csv);
        let again = ExperimentSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = SPEC.replace("\"id\": \"t\",", "\"id\": \"t\", \"colour\": 1,");
        assert!(matches!(
            ExperimentSpec::from_json(&bad),
            Err(HarnessError::Config(_))
        ));
        let bad = SPEC.replace("\"seed\": 3", "\"seed\": 3, \"sed\": 4");
        assert!(matches!(
            ExperimentSpec::from_json(&bad),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn rejects_bad_grids_and_solver_sets() {
        let bad = SPEC.replace("[0.0, 5.0]", "[5.0, 0.0]");
        assert!(ExperimentSpec::from_json(&bad).is_err());
        let bad = SPEC.replace("[0.0, 5.0]", "[]");
        assert!(ExperimentSpec::from_json(&bad).is_err());
        let bad = SPEC.replace("[\"bcd\", \"no_irs_baseline\"]", "[]");
        assert!(ExperimentSpec::from_json(&bad).is_err());
        let bad = SPEC.replace("\"r_tl\": 300.0, \"r_te\": 110.0,", "");
        assert!(ExperimentSpec::from_json(&bad).is_err());
    }

    #[test]
    fn sweep_points_are_deduplicated() {
        let mut spec = ExperimentSpec::from_json(SPEC).unwrap();
        spec.kind = ExperimentKind::SweepMNt;
        spec.scenario.m = 10;
        spec.scenario.n_t = 10;
        spec.m_grid = vec![10, 20];
        spec.nt_grid = vec![10, 40];
        assert_eq!(spec.dimension_points(), vec![(10, 10), (20, 10), (10, 40)]);
    }
}
