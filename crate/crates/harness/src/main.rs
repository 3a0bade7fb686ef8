use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irs_secrecy::oracle::{self, OracleBudget};
use irs_secrecy::output::{emit_results, emit_traces, traces_path, write_summary};
use irs_secrecy::presets::{preset, PRESET_NAMES};
use irs_secrecy::{run_trials, ExperimentSpec, HarnessError, OutputFormat, RunSettings};

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Secrecy-rate maximization for IRS-assisted MISO wiretap channels.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON spec file.
    Run {
        spec: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a named preset.
    Preset {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        /// Print the preset names and exit.
        #[arg(long)]
        list: bool,
        /// Print the preset as a JSON spec instead of running it.
        #[arg(long)]
        show: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Cross-check the solvers against dense and brute-force references.
    Oracle {
        #[arg(long, default_value_t = 2019)]
        seed: u64,
        /// Random cases per check.
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Random-search samples per case.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Grid points for the single-phase search.
        #[arg(long, default_value_t = 100_000)]
        grid: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    #[value(alias = "jsonl")]
    JsonLines,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Results file; defaults to the spec's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Fill the wall_ms column. Output is then no longer byte-reproducible.
    #[arg(long)]
    record_timing: bool,
}

impl Overrides {
    fn apply(
        &self,
        mut spec: ExperimentSpec,
    ) -> Result<(ExperimentSpec, PathBuf, RunSettings), HarnessError> {
        if let Some(seed) = self.seed {
            spec.scenario.seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.scenario.trials = trials;
        }
        if let Some(eps) = self.epsilon {
            spec.solver_options.epsilon = eps;
        }
        if let Some(n) = self.max_iterations {
            spec.solver_options.max_iterations = n;
        }
        if let Some(f) = self.format {
            spec.format = match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::JsonLines => OutputFormat::Jsonl,
            };
        }
        if self.threads == Some(0) {
            return Err(HarnessError::Config("--threads must be at least 1".into()));
        }
        spec.validate()?;
        let out = self
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&spec.output_path));
        let settings = RunSettings {
            threads: self.threads,
            record_timing: self.record_timing,
        };
        Ok((spec, out, settings))
    }
}

fn execute(
    spec: ExperimentSpec,
    out: &Path,
    settings: RunSettings,
) -> Result<ExitCode, HarnessError> {
    log::info!(
        "running {} with {} trials (seed {})",
        spec.id,
        spec.scenario.trials,
        spec.scenario.seed
    );
    let result = run_trials(&spec, settings)?;
    emit_results(&result.rows, spec.format, out)?;
    if !result.traces.is_empty() {
        let path = traces_path(out);
        emit_traces(&result.traces, &path)?;
        println!("traces written to {}", path.display());
    }
    println!("results written to {}", out.display());
    write_summary(&result.summary, std::io::stdout().lock()).map_err(|source| {
        HarnessError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }
    })?;
    let failures = result.failures();
    if failures > 0 {
        eprintln!("{failures} solver run(s) hit a numerical failure");
        return Ok(ExitCode::from(EXIT_NUMERICAL));
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Run { spec, overrides } => {
            let (spec, out, settings) = overrides.apply(ExperimentSpec::from_path(&spec)?)?;
            execute(spec, &out, settings)
        }
        Command::Preset {
            name,
            list,
            show,
            overrides,
        } => {
            if list {
                let mut out = std::io::stdout().lock();
                for n in PRESET_NAMES {
                    if writeln!(out, "{n}").is_err() {
                        break;
                    }
                }
                return Ok(ExitCode::SUCCESS);
            }
            let name = name.expect("clap enforces a name without --list");
            let spec = preset(&name).ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown preset {name:?}; expected one of {}",
                    PRESET_NAMES.join(", ")
                ))
            })?;
            let (spec, out, settings) = overrides.apply(spec)?;
            if show {
                let _ = writeln!(std::io::stdout().lock(), "{}", spec.to_json());
                return Ok(ExitCode::SUCCESS);
            }
            execute(spec, &out, settings)
        }
        Command::Oracle {
            seed,
            cases,
            samples,
            grid,
        } => {
            if cases == 0 || samples == 0 || grid == 0 {
                return Err(HarnessError::Config(
                    "--cases, --samples and --grid must be positive".into(),
                ));
            }
            let reports = oracle::run_all(
                seed,
                OracleBudget {
                    cases,
                    samples,
                    grid,
                },
            );
            oracle::write_table(&reports, std::io::stdout().lock()).map_err(|source| {
                HarnessError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                }
            })?;
            Ok(if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NUMERICAL)
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                HarnessError::Config(_) => EXIT_CONFIG,
                HarnessError::Io { .. } => EXIT_IO,
                HarnessError::Core(_) => EXIT_NUMERICAL,
            })
        }
    }
}
