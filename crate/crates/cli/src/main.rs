use clap::Parser;
use comb_hardy_cli::config::{self, Command, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Hardy-number diagnostics for comb domains.
#[derive(Debug, Parser)]
#[command(name = "combhardy", version)]
struct Cli {
    command: Command,
    /// Comb spec file (JSON).
    #[arg(long, env = "COMBHARDY_SPEC")]
    spec: PathBuf,
    /// Output directory.
    #[arg(long, env = "COMBHARDY_OUT", default_value = "out")]
    out: PathBuf,
    /// Truncation depth; overrides the spec file.
    #[arg(long, env = "COMBHARDY_N")]
    n: Option<usize>,
    /// Comma-separated circle radii for `qh`.
    #[arg(long, env = "COMBHARDY_RADII", value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, env = "COMBHARDY_CELL", default_value_t = config::DEFAULT_CELL)]
    cell: f64,
    #[arg(long, env = "COMBHARDY_CLIP", default_value_t = config::DEFAULT_CLIP)]
    clip: f64,
    /// Lattice connectivity, 4 or 8.
    #[arg(long, env = "COMBHARDY_CONNECTIVITY", default_value_t = config::DEFAULT_CONNECTIVITY)]
    connectivity: u32,
    #[arg(long, env = "COMBHARDY_SAMPLES", default_value_t = config::DEFAULT_SAMPLES)]
    samples: usize,
    /// Comma-separated moment orders for `bm`.
    #[arg(long, env = "COMBHARDY_P", value_delimiter = ',', default_values_t = config::DEFAULT_P)]
    p: Vec<f64>,
    #[arg(long, env = "COMBHARDY_SEED", default_value_t = config::DEFAULT_SEED)]
    seed: u64,
    /// Fail instead of flagging moments when too many paths are censored.
    #[arg(long, env = "COMBHARDY_STRICT")]
    strict: bool,
    /// Also write the raw exit times as CSV.
    #[arg(long, env = "COMBHARDY_RAW_TIMES")]
    raw_times: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        seed: cli.seed,
        n: cli.n,
        radii: cli.radii,
        cell: cli.cell,
        clip: cli.clip,
        connectivity: cli.connectivity,
        samples: cli.samples,
        ps: cli.p,
        strict: cli.strict,
        raw_times: cli.raw_times,
        ..RunConfig::new(cli.command, cli.spec, cli.out)
    };
    match comb_hardy_cli::run(&cfg) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("combhardy: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
