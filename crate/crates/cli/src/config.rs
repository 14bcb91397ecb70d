//! Run configuration: defaults, an optional TOML file, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use metaspin::instanton::TraceOptions;
use metaspin::liouvillian::QmeOptions;
use metaspin::numerics::Precision;
use serde::Deserialize;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "METASPIN_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file and then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with any of the keys below (dashes become underscores)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub gamma_step: Option<f64>,
    /// Single Γ for `portrait` and `instanton`
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Spin length; repeat for several values
    #[arg(long = "spin-j")]
    pub spin_j: Vec<f64>,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Weight of the trace row added to the generator
    #[arg(long)]
    pub g: Option<f64>,
    /// Diagonal index of the trace-row pivot
    #[arg(long)]
    pub e_index: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub ds: Option<f64>,
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    /// Portrait grid points per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// Portrait half-width in both v and w
    #[arg(long)]
    pub extent: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    omega: Option<f64>,
    gamma_min: Option<f64>,
    gamma_max: Option<f64>,
    gamma_step: Option<f64>,
    gamma: Option<f64>,
    spin_j: Option<Vec<f64>>,
    precision: Option<PrecisionArg>,
    g: Option<f64>,
    e_index: Option<usize>,
    tau: Option<f64>,
    ds: Option<f64>,
    s_max: Option<f64>,
    rtol: Option<f64>,
    atol: Option<f64>,
    grid: Option<usize>,
    extent: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    cache_dir: Option<PathBuf>,
    jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_step: f64,
    pub gamma: f64,
    pub spin_j: Vec<f64>,
    pub precision: Precision,
    pub g: f64,
    pub e_index: Option<usize>,
    pub tau: f64,
    pub ds: f64,
    pub s_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub grid: usize,
    pub extent: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TraceOptions::default();
        Self {
            omega: 0.25,
            gamma_min: 1.0,
            gamma_max: 10.0,
            gamma_step: 0.5,
            gamma: 9.0,
            spin_j: vec![32.0],
            precision: Precision::Double,
            g: 1.0,
            e_index: None,
            tau: t.tau,
            ds: t.ds,
            s_max: t.s_max,
            rtol: t.rtol,
            atol: t.atol,
            grid: 41,
            extent: 2.5,
            out: None,
            format: Format::Csv,
            cache_dir: None,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl RunConfig {
    /// Resolves defaults, then the config file, then flags, and validates.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let mut c = RunConfig::default();
        macro_rules! layer {
            ($($f:ident),*) => {$(
                if let Some(v) = file.$f.clone() { c.$f = v; }
                if let Some(v) = args.$f.clone() { c.$f = v; }
            )*};
        }
        layer!(omega, gamma_min, gamma_max, gamma_step, gamma, g, tau, ds, s_max, rtol, atol, grid, extent, format, jobs);
        if let Some(v) = file.spin_j {
            c.spin_j = v;
        }
        if !args.spin_j.is_empty() {
            c.spin_j = args.spin_j.clone();
        }
        if let Some(v) = args.precision.or(file.precision) {
            c.precision = v.into();
        }
        c.e_index = args.e_index.or(file.e_index);
        c.out = args.out.clone().or(file.out);
        c.cache_dir = args.cache_dir.clone().or(file.cache_dir);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            bail!("omega must be positive, got {}", self.omega);
        }
        if !(self.gamma_step > 0.0) {
            bail!("gamma-step must be positive, got {}", self.gamma_step);
        }
        if !(self.gamma_min.is_finite() && self.gamma_max.is_finite()) || self.gamma_max < self.gamma_min {
            bail!("empty Γ grid: gamma-min {} > gamma-max {}", self.gamma_min, self.gamma_max);
        }
        if self.gamma_min < 0.0 || self.gamma < 0.0 {
            bail!("Γ must be non-negative");
        }
        if self.spin_j.is_empty() {
            bail!("at least one --spin-j is required");
        }
        for &j in &self.spin_j {
            if !(j > 0.0 && (2.0 * j).fract() == 0.0) {
                bail!("spin-j must be a positive multiple of 1/2, got {j}");
            }
        }
        for (name, v) in [("g", self.g), ("ds", self.ds), ("s-max", self.s_max), ("rtol", self.rtol), ("atol", self.atol)] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if !(self.tau >= 0.0) {
            bail!("tau must be non-negative, got {}", self.tau);
        }
        if self.grid < 2 || !(self.extent > 0.0) {
            bail!("portrait needs grid >= 2 and a positive extent");
        }
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        Ok(())
    }

    /// Γ values `gamma_min + k * gamma_step` up to `gamma_max` (inclusive,
    /// with a small tolerance for the last point).
    pub fn gamma_grid(&self) -> Vec<f64> {
        let n = ((self.gamma_max - self.gamma_min) / self.gamma_step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.gamma_min + k as f64 * self.gamma_step).collect()
    }

    pub fn qme_options(&self, compute_gap: bool) -> QmeOptions {
        QmeOptions { precision: self.precision, g: self.g, e_index: self.e_index, compute_gap, ..Default::default() }
    }

    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions { tau: self.tau, ds: self.ds, s_max: self.s_max, rtol: self.rtol, atol: self.atol, ..Default::default() }
    }
}
