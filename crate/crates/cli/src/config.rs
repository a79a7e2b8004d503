//! Every default in one place. Each can be overridden with a flag or with the
//! matching `COMBHARDY_*` environment variable; flags win over the environment.
//!
//! | setting       | flag            | environment             | default |
//! |---------------|-----------------|-------------------------|---------|
//! | truncation N  | `--n`           | `COMBHARDY_N`           | spec file, else 40 |
//! | grid cell     | `--cell`        | `COMBHARDY_CELL`        | 0.02 |
//! | clip radius   | `--clip`        | `COMBHARDY_CLIP`        | 20 |
//! | connectivity  | `--connectivity`| `COMBHARDY_CONNECTIVITY`| 8 |
//! | radii         | `--radii`       | `COMBHARDY_RADII`       | 3 radii up to 0.9 min(clip, x_N) |
//! | samples       | `--samples`     | `COMBHARDY_SAMPLES`     | 100000 |
//! | moment orders | `--p`           | `COMBHARDY_P`           | 0.2, 0.5, 1 |
//! | seed          | `--seed`        | `COMBHARDY_SEED`        | 0 |

use comb_hardy::brownian::SamplerConfig;
use std::path::PathBuf;

pub use comb_hardy::spec_file::DEFAULT_TRUNCATE_N as DEFAULT_N;
pub const DEFAULT_CELL: f64 = 0.02;
pub const DEFAULT_CLIP: f64 = 20.0;
pub const DEFAULT_CONNECTIVITY: u32 = 8;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_P: [f64; 3] = [0.2, 0.5, 1.0];
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_RADII_COUNT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Bounds,
    Classify,
    Qh,
    Bm,
    Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spec_path: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub n: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub cell: f64,
    pub clip: f64,
    pub connectivity: u32,
    pub samples: usize,
    pub ps: Vec<f64>,
    pub strict: bool,
    pub raw_times: bool,
    pub sampler: SamplerConfig,
}

impl RunConfig {
    pub fn new(
        command: Command,
        spec_path: impl Into<PathBuf>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            command,
            spec_path: spec_path.into(),
            output_dir: output_dir.into(),
            seed: DEFAULT_SEED,
            n: None,
            radii: None,
            cell: DEFAULT_CELL,
            clip: DEFAULT_CLIP,
            connectivity: DEFAULT_CONNECTIVITY,
            samples: DEFAULT_SAMPLES,
            ps: DEFAULT_P.to_vec(),
            strict: false,
            raw_times: false,
            sampler: SamplerConfig::default(),
        }
    }
}
