//! Pipelines behind the `combhardy` binary.
//!
//! Every command computes all of its artifacts in memory first and only then
//! touches the output directory, so a failed run leaves nothing behind.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod svg;

use comb_hardy::bounds::{criterion_series, BoundSeries};
use comb_hardy::brownian::{moment_estimate, sample_exit_times, MomentConfig, SamplerConfig};
use comb_hardy::classify::classify;
use comb_hardy::qh::{hardy_estimate, Connectivity, GridConfig, HardyEstimate};
use comb_hardy::spec_file::{parse_spec, spec_to_json, SpecFile};
use comb_hardy::{CombSpec, Point};
use config::{Command, RunConfig, DEFAULT_RADII_COUNT};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use svg::{line_plot, Series};

pub const EXIT_SPEC: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("computation failed: {0}")]
    Compute(comb_hardy::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => EXIT_SPEC,
            CliError::Compute(_) => EXIT_COMPUTE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<comb_hardy::Error> for CliError {
    fn from(e: comb_hardy::Error) -> Self {
        match e {
            comb_hardy::Error::SpecParse(m) => CliError::Spec(m),
            comb_hardy::Error::InvalidFamilyParam(m) => CliError::Spec(m),
            other => CliError::Compute(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// A named output file held in memory.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: &str, bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            name: name.to_string(),
            bytes: bytes.into(),
        }
    }
}

pub fn load_spec(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_spec(&text)?)
}

fn json_bytes(v: &impl Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub fn bounds_artifacts(spec: &CombSpec) -> Result<Vec<Artifact>> {
    let series: Vec<BoundSeries> = criterion_series(spec)?;
    let pick = |f: fn(&BoundSeries) -> f64| {
        series
            .iter()
            .map(|s| (s.n as f64, f(s)))
            .collect::<Vec<_>>()
    };
    let plot = line_plot(
        &format!("criterion ratios and bounds, {} comb", spec.family().name()),
        "n",
        &[
            Series {
                label: "R_n",
                points: pick(|s| s.ratio_r),
            },
            Series {
                label: "U_n",
                points: pick(|s| s.upper_u),
            },
            Series {
                label: "L_n",
                points: pick(|s| s.lower_l),
            },
        ],
    );
    Ok(vec![
        Artifact::new("bounds.csv", csv_bytes(&series)),
        Artifact::new("bounds.svg", plot),
    ])
}

pub fn classify_artifacts(spec: &CombSpec) -> Vec<Artifact> {
    vec![Artifact::new(
        "verdict.json",
        json_bytes(&classify(spec).to_json()),
    )]
}

/// Geometric radii ending at `0.9 min(clip, x_N)`.
pub fn default_radii(spec: &CombSpec, clip: f64) -> Result<Vec<f64>> {
    let x_last = *spec.coords().last().unwrap();
    let hi = 0.9 * clip.min(x_last);
    if !(hi > 1.5) {
        return Err(CliError::Compute(comb_hardy::Error::Config(format!(
            "no admissible radii below min(clip, x_N) = {}",
            clip.min(x_last)
        ))));
    }
    let lo = (hi / 4.0).max(1.5);
    let k = DEFAULT_RADII_COUNT;
    Ok((0..k)
        .map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64))
        .collect())
}

#[derive(Serialize)]
struct QhRow {
    r: f64,
    delta: f64,
    delta_over_logr: f64,
    cell: f64,
    clip_radius: f64,
}

pub fn qh_estimate(spec: &CombSpec, cfg: &RunConfig) -> Result<HardyEstimate> {
    let grid = GridConfig::new(
        cfg.cell,
        cfg.clip,
        Connectivity::try_from(cfg.connectivity)?,
    )?;
    let radii = match &cfg.radii {
        Some(r) => r.clone(),
        None => default_radii(spec, cfg.clip)?,
    };
    Ok(hardy_estimate(spec, &grid, &radii)?)
}

pub fn qh_artifacts(spec: &CombSpec, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let est = qh_estimate(spec, cfg)?;
    let rows: Vec<QhRow> = (0..est.radii.len())
        .map(|i| QhRow {
            r: est.radii[i],
            delta: est.delta[i],
            delta_over_logr: est.delta_over_logr[i],
            cell: est.config.cell,
            clip_radius: est.config.clip_radius,
        })
        .collect();
    let pts = |v: &[f64]| {
        est.radii
            .iter()
            .map(|r| r.ln())
            .zip(v.iter().copied())
            .collect::<Vec<_>>()
    };
    let plot = line_plot(
        &format!(
            "quasi-hyperbolic growth, sandwich [{:.3}, {:.3}]",
            est.sandwich_low, est.sandwich_high
        ),
        "ln r",
        &[
            Series {
                label: "delta/ln r",
                points: pts(&est.delta_over_logr),
            },
            Series {
                label: "delta",
                points: pts(&est.delta),
            },
        ],
    );
    Ok(vec![
        Artifact::new("qh.csv", csv_bytes(&rows)),
        Artifact::new("qh.svg", plot),
    ])
}

#[derive(Serialize)]
struct MomentRow {
    p: f64,
    mean_p: f64,
    std_err: f64,
    stable: bool,
    truncation_hits: usize,
}

#[derive(Serialize)]
struct TimeRow {
    path: usize,
    tau: f64,
}

pub fn bm_artifacts(spec: &CombSpec, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let sampler = SamplerConfig {
        seed: cfg.seed,
        ..cfg.sampler
    };
    let batch = sample_exit_times(spec, Point::ORIGIN, cfg.samples, &sampler)?;
    let mc = MomentConfig {
        strict: cfg.strict,
        ..MomentConfig::default()
    };
    let rows = cfg
        .ps
        .iter()
        .map(|&p| {
            let m = moment_estimate(&batch, p, &mc)?;
            Ok(MomentRow {
                p,
                mean_p: m.mean_p,
                std_err: m.std_err,
                stable: m.stable,
                truncation_hits: m.truncation_hits,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Artifact::new("moments.json", json_bytes(&rows))];
    if cfg.raw_times {
        let times: Vec<TimeRow> = batch
            .times
            .iter()
            .enumerate()
            .map(|(path, &tau)| TimeRow { path, tau })
            .collect();
        out.push(Artifact::new("exit_times.csv", csv_bytes(&times)));
    }
    Ok(out)
}

fn manifest(spec: &SpecFile, cfg: &RunConfig, n: usize, artifacts: &[Artifact]) -> Artifact {
    let files: Vec<_> = artifacts
        .iter()
        .map(|a| {
            serde_json::json!({
                "name": a.name,
                "bytes": a.bytes.len(),
                "sha256": hex::encode(Sha256::digest(&a.bytes)),
            })
        })
        .collect();
    let m = serde_json::json!({
        "spec": spec_to_json(&spec.family, Some(n)),
        "seed": cfg.seed,
        "files": files,
    });
    Artifact::new("manifest.json", json_bytes(&m))
}

/// Everything a command would write, including the manifest.
pub fn compute(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let spec_file = load_spec(&cfg.spec_path)?;
    let n = spec_file.resolved_n(cfg.n);
    let spec = spec_file.materialize(cfg.n)?;
    let mut artifacts = Vec::new();
    let all = cfg.command == Command::Report;
    if all || cfg.command == Command::Bounds {
        artifacts.extend(bounds_artifacts(&spec)?);
    }
    if all || cfg.command == Command::Classify {
        artifacts.extend(classify_artifacts(&spec));
    }
    if all || cfg.command == Command::Qh {
        artifacts.extend(qh_artifacts(&spec, cfg)?);
    }
    if all || cfg.command == Command::Bm {
        artifacts.extend(bm_artifacts(&spec, cfg)?);
    }
    let m = manifest(&spec_file, cfg, n, &artifacts);
    artifacts.push(m);
    Ok(artifacts)
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.bytes).map_err(io(&path))?;
            Ok(path)
        })
        .collect()
}

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let artifacts = compute(cfg)?;
    write_artifacts(&cfg.output_dir, &artifacts)
}
