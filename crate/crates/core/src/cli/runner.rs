//! Executes a parsed config and persists reports plus a manifest.

use super::config::{Experiment, ExperimentConfig};
use super::registry::{build_sequence, build_system, parse_start, Start, System};
use crate::analysis::{default_checkpoints, weighted_birkhoff, DisjointnessReport};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentStatus {
    pub name: String,
    pub error: Option<String>,
    pub verdict: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_sha256: String,
    pub version: String,
    pub wall_time_s: f64,
    pub experiments: Vec<ExperimentStatus>,
}

impl RunManifest {
    pub fn ok(&self) -> bool {
        self.experiments.iter().all(|e| e.error.is_none())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "config_sha256": self.config_sha256,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "experiments": self.experiments.iter().map(|e| json!({
                "name": e.name,
                "status": if e.error.is_some() { "error" } else { "ok" },
                "verdict": e.verdict,
                "error": e.error,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_file_name(format!(".{}.tmp", path.file_name().and_then(|s| s.to_str()).unwrap_or("out")));
    fs::write(&tmp, contents).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs one experiment; `seed` is the innermost seed that applies.
pub fn run_experiment(ex: &Experiment, seed: Option<u64>) -> Result<DisjointnessReport> {
    let w = build_sequence(&ex.sequence, ex.seed.or(seed))?;
    let checkpoints = ex.checkpoints.clone().unwrap_or_else(|| default_checkpoints(w.len()));
    let sys = build_system(&ex.flow, &ex.observable)?;
    let start = parse_start(&sys, &ex.start)?;
    match (&sys, start) {
        (System::Circle(f, o) | System::Interval(f, o), Start::Real(x)) => weighted_birkhoff(&w, &f.as_ref(), o.as_ref(), x, &checkpoints),
        (System::Torus(f, o), Start::Pair(x)) => weighted_birkhoff(&w, &f.as_ref(), o.as_ref(), x, &checkpoints),
        (System::Padic(f, o, ..), Start::Padic(x)) => weighted_birkhoff(&w, &f.as_ref(), o.as_ref(), x, &checkpoints),
        (System::Projective(f, o, ..), Start::Proj(x)) => weighted_birkhoff(&w, &f.as_ref(), o.as_ref(), x, &checkpoints),
        _ => Err(Error::InvalidArgument("start point does not match the flow".into())),
    }
}

fn report_json(ex: &Experiment, r: &DisjointnessReport) -> String {
    let mut v = r.to_json();
    v["name"] = json!(ex.name);
    serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
}

/// Executes every experiment (in parallel up to `jobs`) and writes
/// `<name>.json`, `<name>.csv` and `manifest.json` under `out`.
pub fn run_config(text: &str, cfg: &ExperimentConfig, out: &Path, jobs: usize, seed: Option<u64>) -> Result<RunManifest> {
    let started = Instant::now();
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let statuses: Vec<ExperimentStatus> = pool.install(|| {
        cfg.experiments
            .par_iter()
            .map(|ex| {
                let result = run_experiment(ex, cfg.seed.or(seed)).and_then(|r| {
                    write_atomic(&out.join(format!("{}.json", ex.name)), &report_json(ex, &r))?;
                    write_atomic(&out.join(format!("{}.csv", ex.name)), &r.to_csv())?;
                    Ok(r.verdict.to_string())
                });
                match result {
                    Ok(v) => ExperimentStatus { name: ex.name.clone(), error: None, verdict: Some(v) },
                    Err(e) => ExperimentStatus { name: ex.name.clone(), error: Some(e.to_string()), verdict: None },
                }
            })
            .collect()
    });
    let manifest = RunManifest {
        config_sha256: sha256_hex(text.as_bytes()),
        version: TOOL_VERSION.to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
        experiments: statuses,
    };
    let body = serde_json::to_string_pretty(&manifest.to_json()).expect("manifest serializes") + "\n";
    write_atomic(&out.join("manifest.json"), &body)?;
    Ok(manifest)
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os("OSCILLATE_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("oscillate-out"))
}
