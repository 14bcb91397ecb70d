//! On-disk cache of QME solves, one JSON record per parameter hash.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use metaspin::liouvillian::{solve_qme, QmeOptions};
use metaspin::numerics::Precision;
use metaspin::ModelParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Parameters that identify a solve, in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveKey {
    pub omega: f64,
    pub big_gamma: f64,
    pub two_j: usize,
    pub precision: Precision,
    pub g: f64,
    pub e_index: Option<usize>,
    pub compute_gap: bool,
}

/// Shortest round-trip decimal, with `-0` folded into `0`.
fn canon(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

impl SolveKey {
    pub fn new(p: &ModelParams, opts: &QmeOptions) -> Self {
        Self {
            omega: p.omega,
            big_gamma: p.big_gamma,
            two_j: p.two_j(),
            precision: opts.precision,
            g: opts.g,
            e_index: opts.e_index,
            compute_gap: opts.compute_gap,
        }
    }

    pub fn canonical(&self) -> String {
        format!(
            "omega={};Gamma={};twoJ={};precision={};g={};e={};gap={}",
            canon(self.omega),
            canon(self.big_gamma),
            self.two_j,
            self.precision.as_str(),
            canon(self.g),
            self.e_index.map_or("default".to_string(), |e| e.to_string()),
            self.compute_gap
        )
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutputs {
    pub m_z: f64,
    pub lambda: Option<f64>,
    pub precision_used: Precision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub created_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub hash: String,
    pub key: SolveKey,
    pub outputs: SolveOutputs,
    pub provenance: Provenance,
}

/// Solve cache. Without a directory every request is a fresh solve.
#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    hits: AtomicUsize,
    solves: AtomicUsize,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).with_context(|| format!("creating cache directory {}", d.display()))?;
        }
        Ok(Self { dir, ..Default::default() })
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn solves(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    fn path(&self, hash: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{hash}.json")))
    }

    pub fn lookup(&self, key: &SolveKey) -> Result<Option<SweepRecord>> {
        let Some(path) = self.path(&key.hash()) else { return Ok(None) };
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let rec: SweepRecord = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if rec.key != *key {
            anyhow::bail!("cache record {} does not match its key", path.display());
        }
        Ok(Some(rec))
    }

    /// Returns the cached outputs or solves and stores a new record.
    pub fn solve(&self, p: &ModelParams, opts: &QmeOptions) -> Result<SolveOutputs> {
        let key = SolveKey::new(p, opts);
        if let Some(rec) = self.lookup(&key)? {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(rec.outputs);
        }
        let r = solve_qme(p, opts)
            .with_context(|| format!("QME solve at Γ = {}, J = {}", p.big_gamma, p.spin_j))?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        let outputs = SolveOutputs { m_z: r.m_z, lambda: r.gap.map(|g| g.lambda), precision_used: r.precision_used };
        if let Some(path) = self.path(&key.hash()) {
            let rec = SweepRecord {
                hash: key.hash(),
                key,
                outputs: outputs.clone(),
                provenance: Provenance {
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
                },
            };
            write_new(&path, &serde_json::to_string_pretty(&rec)?)?;
        }
        Ok(outputs)
    }
}

/// Publishes `text` at `path` unless a record is already there. The record
/// is written to a private file first and hard-linked into place, so readers
/// never see a partial file.
fn write_new(path: &Path, text: &str) -> Result<()> {
    static SEQ: AtomicUsize = AtomicUsize::new(0);
    let tmp = path.with_extension(format!("tmp.{}.{}", std::process::id(), SEQ.fetch_add(1, Ordering::Relaxed)));
    let mut f = OpenOptions::new().write(true).create_new(true).open(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    drop(f);
    let linked = fs::hard_link(&tmp, path);
    let _ = fs::remove_file(&tmp);
    match linked {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Ok(()),
        Err(e) => Err(e).with_context(|| format!("publishing {}", path.display())),
    }
}
