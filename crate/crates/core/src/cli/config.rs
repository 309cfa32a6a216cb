//! Run configuration: TOML file, command-line flags and defaults.
//!
//! Precedence is flags > file > defaults. Every value is validated before
//! any computation starts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::models::{default_reference_m, DEFAULT_DOF_THRESHOLD};
use crate::physics::SystemConfig;

pub const DEFAULT_DISTANCES: [f64; 3] = [10.0, 1.0, 0.1];
pub const DEFAULT_M_LADDER: [usize; 7] = [5, 10, 20, 40, 80, 100, 160];
pub const DEFAULT_BOUNDS_LADDER: [usize; 3] = [10, 100, 1000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Receiver,
    Transceiver,
    Grid,
    Dof,
    Bounds,
}

impl SweepKind {
    pub fn command_name(&self) -> &'static str {
        match self {
            SweepKind::Receiver => "sweep-receiver",
            SweepKind::Transceiver => "sweep-transceiver",
            SweepKind::Grid => "sweep-grid",
            SweepKind::Dof => "dof",
            SweepKind::Bounds => "bounds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Binary,
}

impl LogBase {
    pub fn convert(&self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Binary => nats / std::f64::consts::LN_2,
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            LogBase::Natural => "nats",
            LogBase::Binary => "bits",
        }
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "e" => Ok(LogBase::Natural),
            "2" => Ok(LogBase::Binary),
            other => Err(format!("log base must be 'e' or '2', got {other:?}")),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "e",
            LogBase::Binary => "2",
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "capmimo",
    version,
    about = "Continuous-aperture vs discrete MIMO mutual information"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Continuous transmitter, discretized receiver.
    SweepReceiver(Flags),
    /// Both sides discretized with m1 = m2 = m.
    SweepTransceiver(Flags),
    /// Full m1 x m2 product at each distance.
    SweepGrid(Flags),
    /// Eigenvalue count against the l²/(dλ) rule of thumb.
    Dof(Flags),
    /// Receiver noise-control gap against its midpoint-rule bound.
    Bounds(Flags),
}

impl Command {
    pub fn split(self) -> (SweepKind, Flags) {
        match self {
            Command::SweepReceiver(f) => (SweepKind::Receiver, f),
            Command::SweepTransceiver(f) => (SweepKind::Transceiver, f),
            Command::SweepGrid(f) => (SweepKind::Grid, f),
            Command::Dof(f) => (SweepKind::Dof, f),
            Command::Bounds(f) => (SweepKind::Bounds, f),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML file with any of the keys below (snake_case).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV; a `.meta` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<String>,
    /// Wavelength in metres.
    #[arg(long)]
    pub wavelength: Option<f64>,
    /// Aperture length in metres.
    #[arg(long)]
    pub length: Option<f64>,
    /// Transceiver separation(s) in metres, comma separated.
    #[arg(long, alias = "distances", value_delimiter = ',', num_args = 1..)]
    pub distance: Option<Vec<f64>>,
    /// Source power density P.
    #[arg(long)]
    pub power: Option<f64>,
    /// Noise density n0.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub ref_m: Option<usize>,
    #[arg(long)]
    pub inner_points: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub m_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub m1_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub m2_list: Option<Vec<usize>>,
    /// Exit 0 even when some cells failed.
    #[arg(long)]
    pub keep_going: bool,
    #[arg(long, value_parser = ["e", "2"])]
    pub log_base: Option<String>,
    /// Relative eigenvalue threshold for `dof`.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Write measured per-cell wall times instead of zeros (breaks
    /// byte-identical reruns).
    #[arg(long)]
    pub record_timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in a configuration file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    scenario: Option<String>,
    wavelength: Option<f64>,
    length: Option<f64>,
    #[serde(alias = "distance")]
    distances: Option<OneOrMany>,
    power: Option<f64>,
    noise: Option<f64>,
    ref_m: Option<usize>,
    inner_points: Option<usize>,
    m_list: Option<Vec<usize>>,
    m1_list: Option<Vec<usize>>,
    m2_list: Option<Vec<usize>>,
    out: Option<PathBuf>,
    keep_going: Option<bool>,
    log_base: Option<String>,
    threshold: Option<f64>,
    record_timing: Option<bool>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.message().trim().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: String,
    pub sweep: SweepKind,
    pub wavelength: f64,
    pub length: f64,
    pub power: f64,
    pub noise: f64,
    pub distances: Vec<f64>,
    pub m_list: Vec<usize>,
    pub m1_list: Vec<usize>,
    pub m2_list: Vec<usize>,
    pub ref_m: usize,
    /// 0 selects the per-distance default.
    pub inner_points: usize,
    pub out: Option<PathBuf>,
    pub log_base: LogBase,
    pub keep_going: bool,
    pub threshold: f64,
    pub record_timing: bool,
}

impl RunConfig {
    /// System configuration at distance `d`.
    pub fn system(&self, d: f64) -> crate::Result<SystemConfig> {
        SystemConfig::new(self.wavelength, self.length, d, self.power, self.noise)
    }

    pub fn inner_override(&self) -> Option<usize> {
        (self.inner_points != 0).then_some(self.inner_points)
    }

    /// Output path, defaulting to `<scenario>.csv` for the sweep commands.
    pub fn output_path(&self) -> Option<PathBuf> {
        match (&self.out, self.sweep) {
            (Some(p), _) => Some(p.clone()),
            (None, SweepKind::Dof | SweepKind::Bounds) => None,
            (None, _) => Some(PathBuf::from(format!("{}.csv", self.scenario))),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }
}

/// Merges flags over an optional file over defaults, then validates.
pub fn parse_config(sweep: SweepKind, flags: &Flags) -> Result<RunConfig, ConfigError> {
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    resolve(sweep, &file, flags)
}

pub fn resolve(sweep: SweepKind, file: &FileConfig, flags: &Flags) -> Result<RunConfig, ConfigError> {
    let defaults = SystemConfig::default();
    let wavelength = flags.wavelength.or(file.wavelength).unwrap_or(defaults.wavelength());
    let length = flags.length.or(file.length).unwrap_or(defaults.aperture());
    let power = flags.power.or(file.power).unwrap_or(defaults.power());
    let noise = flags.noise.or(file.noise).unwrap_or(defaults.noise());
    let distances = flags
        .distance
        .clone()
        .or_else(|| file.distances.clone().map(OneOrMany::into_vec))
        .unwrap_or_else(|| DEFAULT_DISTANCES.to_vec());

    let default_ladder = match sweep {
        SweepKind::Bounds => DEFAULT_BOUNDS_LADDER.to_vec(),
        _ => DEFAULT_M_LADDER.to_vec(),
    };
    let m_list = flags
        .m_list
        .clone()
        .or_else(|| file.m_list.clone())
        .unwrap_or(default_ladder);
    let m1_list = flags
        .m1_list
        .clone()
        .or_else(|| file.m1_list.clone())
        .unwrap_or_else(|| m_list.clone());
    let m2_list = flags
        .m2_list
        .clone()
        .or_else(|| file.m2_list.clone())
        .unwrap_or_else(|| m_list.clone());

    let log_base = match flags.log_base.as_deref().or(file.log_base.as_deref()) {
        Some(s) => s.parse::<LogBase>().map_err(ConfigError)?,
        None => LogBase::Natural,
    };

    if distances.is_empty() {
        return Err(ConfigError("distance: at least one distance is required".into()));
    }
    for &d in &distances {
        SystemConfig::new(wavelength, length, d, power, noise).map_err(|e| ConfigError(e.to_string()))?;
    }
    let probe =
        SystemConfig::new(wavelength, length, distances[0], power, noise).map_err(|e| ConfigError(e.to_string()))?;

    let ref_m = flags
        .ref_m
        .or(file.ref_m)
        .unwrap_or_else(|| default_reference_m(&probe));
    let inner_points = flags.inner_points.or(file.inner_points).unwrap_or(0);
    if inner_points == 1 {
        return Err(ConfigError(
            "inner_points: must be at least 2 (or 0 for the default)".into(),
        ));
    }
    let threshold = flags.threshold.or(file.threshold).unwrap_or(DEFAULT_DOF_THRESHOLD);
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(ConfigError(format!("threshold: must lie in (0, 1), got {threshold}")));
    }

    let lists: &[(&str, &Vec<usize>)] = match sweep {
        SweepKind::Grid => &[("m1_list", &m1_list), ("m2_list", &m2_list)],
        SweepKind::Dof => &[],
        _ => &[("m_list", &m_list)],
    };
    for (name, list) in lists {
        if list.is_empty() {
            return Err(ConfigError(format!("{name}: at least one sampling number is required")));
        }
        if list.contains(&0) {
            return Err(ConfigError(format!("{name}: sampling numbers must be positive")));
        }
        let max = list.iter().copied().max().unwrap_or(0);
        if sweep != SweepKind::Bounds && ref_m <= max {
            return Err(ConfigError(format!(
                "ref_m: reference grid {ref_m} must exceed the largest sampling number {max} in {name}"
            )));
        }
    }
    if sweep != SweepKind::Bounds && ref_m < crate::models::MIN_REFERENCE_M {
        return Err(ConfigError(format!(
            "ref_m: must be at least {}",
            crate::models::MIN_REFERENCE_M
        )));
    }

    Ok(RunConfig {
        scenario: flags
            .scenario
            .clone()
            .or_else(|| file.scenario.clone())
            .unwrap_or_else(|| sweep.command_name().to_string()),
        sweep,
        wavelength,
        length,
        power,
        noise,
        distances,
        m_list,
        m1_list,
        m2_list,
        ref_m,
        inner_points,
        out: flags.out.clone().or_else(|| file.out.clone()),
        log_base,
        keep_going: flags.keep_going || file.keep_going.unwrap_or(false),
        threshold,
        record_timing: flags.record_timing || file.record_timing.unwrap_or(false),
    })
}
