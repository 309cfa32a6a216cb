//! Executes a resolved [`RunConfig`]: sweeps, CSV emission and the `.meta`
//! sidecar.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{RunConfig, SweepKind};
use crate::experiments::{
    fit_convergence_slope, fit_convergence_slope_skipping, fit_power_law, sweep_grid, sweep_receiver,
    sweep_transceiver, SlopeFit, SweepRow, SweepSettings,
};
use crate::models::{dof_estimate, noise_rx, Channel, ModelTag};
use crate::physics::default_inner_points;
use crate::spectra::midpoint_grid;

/// Exact CSV header of sweep outputs.
pub const CSV_COLUMNS: [&str; 12] = [
    "scenario",
    "d_m",
    "m1",
    "m2",
    "ref_m",
    "mi_nats",
    "mi_bits",
    "mi_ref_nats",
    "abs_gap",
    "n_used",
    "model_tag",
    "wall_time_s",
];

const ERROR_TAG_PREFIX: &str = "error:";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl CliError {
    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CsvRecord {
    scenario: String,
    d_m: f64,
    m1: Option<usize>,
    m2: Option<usize>,
    ref_m: usize,
    mi_nats: f64,
    mi_bits: f64,
    mi_ref_nats: f64,
    abs_gap: f64,
    n_used: f64,
    model_tag: String,
    wall_time_s: f64,
}

impl From<&SweepRow> for CsvRecord {
    fn from(row: &SweepRow) -> Self {
        let model_tag = match &row.error {
            None => row.model_tag.as_str().to_string(),
            Some(msg) => format!("{ERROR_TAG_PREFIX}{}:{msg}", row.model_tag.as_str()),
        };
        CsvRecord {
            scenario: row.scenario_id.clone(),
            d_m: row.d,
            m1: row.m1,
            m2: row.m2,
            ref_m: row.ref_m,
            mi_nats: row.mi_nats,
            mi_bits: row.mi_nats / std::f64::consts::LN_2,
            mi_ref_nats: row.mi_ref_nats,
            abs_gap: row.abs_gap,
            n_used: row.n_used,
            model_tag,
            wall_time_s: row.wall_time_s,
        }
    }
}

impl TryFrom<CsvRecord> for SweepRow {
    type Error = crate::Error;

    fn try_from(rec: CsvRecord) -> crate::Result<Self> {
        let (model_tag, error) = match rec.model_tag.strip_prefix(ERROR_TAG_PREFIX) {
            Some(rest) => {
                let (tag, msg) = rest
                    .split_once(':')
                    .ok_or_else(|| crate::Error::InvalidArgument(format!("malformed error tag {:?}", rec.model_tag)))?;
                (tag.parse::<ModelTag>()?, Some(msg.to_string()))
            }
            None => (rec.model_tag.parse::<ModelTag>()?, None),
        };
        Ok(SweepRow {
            scenario_id: rec.scenario,
            d: rec.d_m,
            m1: rec.m1,
            m2: rec.m2,
            ref_m: rec.ref_m,
            mi_nats: rec.mi_nats,
            mi_ref_nats: rec.mi_ref_nats,
            abs_gap: rec.abs_gap,
            n_used: rec.n_used,
            model_tag,
            wall_time_s: rec.wall_time_s,
            error,
        })
    }
}

/// Writes sweep rows as CSV with the [`CSV_COLUMNS`] header.
pub fn write_rows<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.serialize(CsvRecord::from(row))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_rows<R: io::Read>(input: R) -> Result<Vec<SweepRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(CliError::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize::<CsvRecord>() {
        rows.push(SweepRow::try_from(rec?)?);
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct FitRecord {
    d_m: f64,
    skip_head: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<SlopeFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SymmetryRecord {
    d_m: f64,
    max_abs_asymmetry_nats: Option<f64>,
}

#[derive(Debug, Serialize)]
struct FailedCell {
    d_m: f64,
    m1: Option<usize>,
    m2: Option<usize>,
    message: String,
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    output: String,
    rows: usize,
    total_wall_time_s: f64,
    reactive_near_field_distances: Vec<f64>,
    config: &'a RunConfig,
    slope_fits: Vec<FitRecord>,
    grid_symmetry: Vec<SymmetryRecord>,
    failed_cells: Vec<FailedCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub failed_cells: usize,
    pub output: Option<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self, keep_going: bool) -> i32 {
        if self.failed_cells > 0 && !keep_going {
            super::EXIT_FAILED_CELLS
        } else {
            0
        }
    }
}

fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

fn settings(config: &RunConfig) -> Result<SweepSettings, CliError> {
    Ok(SweepSettings {
        scenario: config.scenario.clone(),
        base: config.system(config.distances[0])?,
        ref_m: config.ref_m,
        inner_points: config.inner_override(),
    })
}

fn channel(config: &RunConfig, d: f64) -> Result<Channel, CliError> {
    let cfg = config.system(d)?;
    let inner = config.inner_override().unwrap_or_else(|| default_inner_points(&cfg));
    Ok(Channel::new(cfg, inner)?)
}

fn near_field(config: &RunConfig) -> Vec<f64> {
    config
        .distances
        .iter()
        .copied()
        .filter(|&d| config.system(d).map(|c| c.is_reactive_near_field()).unwrap_or(false))
        .collect()
}

/// Runs the configured command, writing tables to `stdout` and files to
/// the configured output path.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    match config.sweep {
        SweepKind::Receiver | SweepKind::Transceiver | SweepKind::Grid => run_sweep(config, stdout, start),
        SweepKind::Dof => run_dof(config, stdout),
        SweepKind::Bounds => run_bounds(config, stdout),
    }
}

fn run_sweep(config: &RunConfig, stdout: &mut dyn Write, start: Instant) -> Result<RunOutcome, CliError> {
    let s = settings(config)?;
    let mut fits = Vec::new();
    let mut symmetry = Vec::new();
    let mut rows = match config.sweep {
        SweepKind::Receiver => sweep_receiver(&s, &config.distances, &config.m_list)?,
        SweepKind::Transceiver => sweep_transceiver(&s, &config.distances, &config.m_list)?,
        _ => {
            let mut all = Vec::new();
            for &d in &config.distances {
                let grid = sweep_grid(&s, d, &config.m1_list, &config.m2_list)?;
                symmetry.push(SymmetryRecord {
                    d_m: d,
                    max_abs_asymmetry_nats: grid.symmetry_gap,
                });
                all.extend(grid.rows);
            }
            all
        }
    };
    if config.sweep != SweepKind::Grid {
        for &d in &config.distances {
            let at_d: Vec<SweepRow> = rows.iter().filter(|r| r.d == d).cloned().collect();
            for skip_head in [0, 1] {
                let fit = if skip_head == 0 {
                    fit_convergence_slope(&at_d)
                } else {
                    fit_convergence_slope_skipping(&at_d, skip_head)
                };
                fits.push(FitRecord {
                    d_m: d,
                    skip_head,
                    fit: fit.as_ref().ok().copied(),
                    error: fit.err().map(|e| e.to_string()),
                });
            }
        }
    }
    if !config.record_timing {
        for r in rows.iter_mut() {
            r.wall_time_s = 0.0;
        }
    }

    let base = config.log_base;
    writeln!(
        stdout,
        "{:>10} {:>6} {:>6} {:>16} {:>16} {:>12}",
        "d_m",
        "m1",
        "m2",
        format!("mi_{}", base.unit()),
        format!("ref_{}", base.unit()),
        "abs_gap"
    )
    .ok();
    for r in &rows {
        let fmt_m = |m: Option<usize>| m.map_or("-".to_string(), |v| v.to_string());
        match &r.error {
            None => writeln!(
                stdout,
                "{:>10} {:>6} {:>6} {:>16.8} {:>16.8} {:>12.4e}",
                r.d,
                fmt_m(r.m1),
                fmt_m(r.m2),
                base.convert(r.mi_nats),
                base.convert(r.mi_ref_nats),
                base.convert(r.abs_gap)
            ),
            Some(msg) => writeln!(
                stdout,
                "{:>10} {:>6} {:>6} failed: {msg}",
                r.d,
                fmt_m(r.m1),
                fmt_m(r.m2)
            ),
        }
        .ok();
    }
    for f in &fits {
        if let Some(fit) = &f.fit {
            writeln!(
                stdout,
                "slope d={} (skip {}): {:.4} r2={:.4} over m {}..{}",
                f.d_m, f.skip_head, fit.slope, fit.r_squared, fit.m_range.0, fit.m_range.1
            )
            .ok();
        }
    }

    let failed: Vec<FailedCell> = rows
        .iter()
        .filter_map(|r| {
            r.error.as_ref().map(|msg| FailedCell {
                d_m: r.d,
                m1: r.m1,
                m2: r.m2,
                message: msg.clone(),
            })
        })
        .collect();
    for f in &failed {
        eprintln!("cell d={} m1={:?} m2={:?} failed: {}", f.d_m, f.m1, f.m2, f.message);
    }

    let out = config.output_path().expect("sweeps always have an output path");
    let mut buf = Vec::new();
    write_rows(&rows, &mut buf)?;
    write_file(&out, &buf)?;

    let failed_count = failed.len();
    let meta = Metadata {
        tool: "capmimo",
        version: env!("CARGO_PKG_VERSION"),
        command: config.sweep.command_name(),
        output: out.display().to_string(),
        rows: rows.len(),
        total_wall_time_s: if config.record_timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        },
        reactive_near_field_distances: near_field(config),
        config,
        slope_fits: fits,
        grid_symmetry: symmetry,
        failed_cells: failed,
    };
    write_meta(&out, &meta)?;
    Ok(RunOutcome {
        failed_cells: failed_count,
        output: Some(out),
    })
}

fn write_meta(csv: &Path, meta: &impl Serialize) -> Result<(), CliError> {
    let text = toml::to_string(meta).map_err(|e| CliError::Config(format!("metadata: {e}")))?;
    write_file(&meta_path(csv), text.as_bytes())
}

#[derive(Debug, Serialize)]
struct DofRecord {
    scenario: String,
    d_m: f64,
    ref_m: usize,
    threshold: f64,
    eigen_count: usize,
    analytic_dof: f64,
}

fn run_dof(config: &RunConfig, stdout: &mut dyn Write) -> Result<RunOutcome, CliError> {
    let mut records = Vec::new();
    writeln!(stdout, "{:>10} {:>12} {:>14}", "d_m", "eigen_count", "analytic_dof").ok();
    for &d in &config.distances {
        let est = dof_estimate(&channel(config, d)?, config.ref_m, config.threshold)?;
        writeln!(stdout, "{:>10} {:>12} {:>14.6}", d, est.count, est.analytic).ok();
        records.push(DofRecord {
            scenario: config.scenario.clone(),
            d_m: d,
            ref_m: config.ref_m,
            threshold: config.threshold,
            eigen_count: est.count,
            analytic_dof: est.analytic,
        });
    }
    let output = match config.output_path() {
        Some(out) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
            write_file(&out, &bytes)?;
            write_meta(
                &out,
                &SimpleMeta {
                    tool: "capmimo",
                    version: env!("CARGO_PKG_VERSION"),
                    command: config.sweep.command_name(),
                    reactive_near_field_distances: near_field(config),
                    config,
                    gap_slopes: Vec::new(),
                },
            )?;
            Some(out)
        }
        None => None,
    };
    Ok(RunOutcome {
        failed_cells: 0,
        output,
    })
}

#[derive(Debug, Serialize)]
struct BoundRecord {
    scenario: String,
    d_m: f64,
    m: usize,
    n1: f64,
    limit: f64,
    gap: f64,
    midpoint_bound: f64,
    holds: bool,
}

#[derive(Debug, Serialize)]
struct SimpleMeta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    reactive_near_field_distances: Vec<f64>,
    config: &'a RunConfig,
    gap_slopes: Vec<FitRecord>,
}

fn run_bounds(config: &RunConfig, stdout: &mut dyn Write) -> Result<RunOutcome, CliError> {
    let mut records = Vec::new();
    let mut fits = Vec::new();
    let mut violations = 0;
    writeln!(
        stdout,
        "{:>10} {:>6} {:>18} {:>12} {:>12} {:>6}",
        "d_m", "m", "n1", "gap", "bound", "holds"
    )
    .ok();
    for &d in &config.distances {
        let ch = channel(config, d)?;
        let mut ladder = Vec::new();
        for &m in &config.m_list {
            let nc = noise_rx(&midpoint_grid(config.length, m)?, &ch)?;
            let holds = nc.within_bound();
            if !holds {
                violations += 1;
            }
            writeln!(
                stdout,
                "{:>10} {:>6} {:>18.10} {:>12.4e} {:>12.4e} {:>6}",
                d, m, nc.n_value, nc.gap, nc.midpoint_bound, holds
            )
            .ok();
            ladder.push((m, nc.gap));
            records.push(BoundRecord {
                scenario: config.scenario.clone(),
                d_m: d,
                m,
                n1: nc.n_value,
                limit: nc.limit_value,
                gap: nc.gap,
                midpoint_bound: nc.midpoint_bound,
                holds,
            });
        }
        let fit = fit_power_law(&ladder);
        if let Ok(f) = &fit {
            writeln!(stdout, "gap slope d={d}: {:.4} r2={:.4}", f.slope, f.r_squared).ok();
        }
        fits.push(FitRecord {
            d_m: d,
            skip_head: 0,
            fit: fit.as_ref().ok().copied(),
            error: fit.err().map(|e| e.to_string()),
        });
    }
    let output = match config.output_path() {
        Some(out) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
            write_file(&out, &bytes)?;
            write_meta(
                &out,
                &SimpleMeta {
                    tool: "capmimo",
                    version: env!("CARGO_PKG_VERSION"),
                    command: config.sweep.command_name(),
                    reactive_near_field_distances: near_field(config),
                    config,
                    gap_slopes: fits,
                },
            )?;
            Some(out)
        }
        None => None,
    };
    Ok(RunOutcome {
        failed_cells: violations,
        output,
    })
}
