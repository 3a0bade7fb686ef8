//! Result files.
//!
//! CSV header (fixed):
//!
//! ```text
//! experiment,trial,solver,m,n_t,p_dbm,rate_bps_hz,iterations,block_updates,wall_ms
//! ```
//!
//! Floating-point fields are rounded to 12 significant digits and printed in
//! their shortest form; a failed solve leaves `rate_bps_hz` empty. JSON-lines
//! files carry the same fields, one object per line, with `null` for a failed
//! rate. Convergence traces use
//! `experiment,trial,solver,m,n_t,iteration,block_updates,objective`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::experiment::{ResultRow, SummaryRow, TraceRow};
use crate::spec::OutputFormat;
use crate::HarnessError;

pub const CSV_HEADER: [&str; 10] = [
    "experiment",
    "trial",
    "solver",
    "m",
    "n_t",
    "p_dbm",
    "rate_bps_hz",
    "iterations",
    "block_updates",
    "wall_ms",
];

pub const TRACE_HEADER: [&str; 8] = [
    "experiment",
    "trial",
    "solver",
    "m",
    "n_t",
    "iteration",
    "block_updates",
    "objective",
];

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn fmt_float(x: f64) -> String {
    format!("{}", round_sig12(x))
}

fn rounded(row: &ResultRow) -> ResultRow {
    ResultRow {
        p_dbm: round_sig12(row.p_dbm),
        rate_bps_hz: row.rate_bps_hz.map(round_sig12),
        wall_ms: round_sig12(row.wall_ms),
        ..row.clone()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Serializes rows to any writer.
pub fn write_results<W: Write>(
    rows: &[ResultRow],
    format: OutputFormat,
    mut out: W,
) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.write_record([
                    r.experiment.clone(),
                    r.trial.to_string(),
                    r.solver.clone(),
                    r.m.to_string(),
                    r.n_t.to_string(),
                    fmt_float(r.p_dbm),
                    r.rate_bps_hz.map(fmt_float).unwrap_or_default(),
                    r.iterations.to_string(),
                    r.block_updates.to_string(),
                    fmt_float(r.wall_ms),
                ])?;
            }
            w.flush()
        }
        OutputFormat::Jsonl => {
            for r in rows {
                serde_json::to_writer(&mut out, &rounded(r))?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

/// Writes rows to `path`.
pub fn emit_results(
    rows: &[ResultRow],
    format: OutputFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_results(rows, format, BufWriter::new(file)).map_err(io_err(path))
}

fn parse_field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    line: usize,
) -> Result<T, HarnessError> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
        HarnessError::Config(format!(
            "line {line}: bad value in column {}",
            CSV_HEADER[i]
        ))
    })
}

/// Parses rows written by [`write_results`].
pub fn parse_results<R: Read>(
    input: R,
    format: OutputFormat,
) -> Result<Vec<ResultRow>, HarnessError> {
    match format {
        OutputFormat::Csv => {
            let mut rdr = csv::Reader::from_reader(input);
            let header = rdr
                .headers()
                .map_err(|e| HarnessError::Config(format!("unreadable CSV header: {e}")))?;
            if header.iter().ne(CSV_HEADER) {
                return Err(HarnessError::Config("unexpected CSV header".into()));
            }
            let mut rows = Vec::new();
            for (i, rec) in rdr.records().enumerate() {
                let line = i + 2;
                let rec = rec.map_err(|e| HarnessError::Config(format!("line {line}: {e}")))?;
                let rate = match rec.get(6) {
                    Some("") => None,
                    _ => Some(parse_field(&rec, 6, line)?),
                };
                rows.push(ResultRow {
                    experiment: parse_field(&rec, 0, line)?,
                    trial: parse_field(&rec, 1, line)?,
                    solver: parse_field(&rec, 2, line)?,
                    m: parse_field(&rec, 3, line)?,
                    n_t: parse_field(&rec, 4, line)?,
                    p_dbm: parse_field(&rec, 5, line)?,
                    rate_bps_hz: rate,
                    iterations: parse_field(&rec, 7, line)?,
                    block_updates: parse_field(&rec, 8, line)?,
                    wall_ms: parse_field(&rec, 9, line)?,
                });
            }
            Ok(rows)
        }
        OutputFormat::Jsonl => {
            let mut text = String::new();
            BufReader::new(input)
                .read_to_string(&mut text)
                .map_err(|e| HarnessError::Config(format!("unreadable JSON lines: {e}")))?;
            text.lines()
                .filter(|l| !l.trim().is_empty())
                .enumerate()
                .map(|(i, l)| {
                    serde_json::from_str(l)
                        .map_err(|e| HarnessError::Config(format!("line {}: {e}", i + 1)))
                })
                .collect()
        }
    }
}

/// Writes convergence traces as CSV.
pub fn write_traces<W: Write>(traces: &[TraceRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for t in traces {
        w.write_record([
            t.experiment.clone(),
            t.trial.to_string(),
            t.solver.clone(),
            t.m.to_string(),
            t.n_t.to_string(),
            t.iteration.to_string(),
            t.block_updates.to_string(),
            fmt_float(t.objective),
        ])?;
    }
    w.flush()
}

pub fn emit_traces(traces: &[TraceRow], path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_traces(traces, BufWriter::new(file)).map_err(io_err(path))
}

/// `results.csv` → `results.traces.csv`
pub fn traces_path(results: &Path) -> PathBuf {
    let stem = results
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("results");
    results.with_file_name(format!("{stem}.traces.csv"))
}

/// Human-readable summary table.
pub fn write_summary<W: Write>(summary: &[SummaryRow], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<22} {:>4} {:>4} {:>7} {:>6} {:>5} {:>12} {:>10} {:>10} {:>12}",
        "solver",
        "M",
        "N_t",
        "P_dBm",
        "trials",
        "fail",
        "mean_rate",
        "std_rate",
        "mean_iter",
        "mean_blocks"
    )?;
    for s in summary {
        writeln!(
            out,
            "{:<22} {:>4} {:>4} {:>7.2} {:>6} {:>5} {:>12.6} {:>10.6} {:>10.2} {:>12.2}",
            s.solver,
            s.m,
            s.n_t,
            s.p_dbm,
            s.count,
            s.failures,
            s.mean_rate,
            s.std_rate,
            s.mean_iterations,
            s.mean_block_updates
        )?;
    }
    Ok(())
}
