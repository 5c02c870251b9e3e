//! Command-line front end: argument parsing only, all execution lives in
//! the library's runner.  Artifacts go to `--out` or standard output;
//! everything human-readable goes to standard error.

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use gabor_bounds::runner::{self, CommandKind, RunConfig, RunStatus};

#[derive(Parser)]
#[command(
    name = "gabor-bounds",
    version,
    about = "Sharp Gabor frame bounds over phase-space lattices",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute sharp frame bounds for a window over a lattice.
    Bounds(CommonArgs),
    /// Certify that an odd window admits no frame on a symplectic lattice.
    Verify(CommonArgs),
    /// Sweep lattice shapes at a fixed density and tabulate the bounds.
    Scan(CommonArgs),
    /// Run the transform-identity self checks.
    #[command(name = "check-identities")]
    CheckIdentities {
        #[command(flatten)]
        common: CommonArgs,
        /// Smaller fixtures with relaxed tolerances.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Analysis window: hermite:N, gaussian or sampled:PATH.
    #[arg(long)]
    window: Option<String>,
    /// Lattice preset or generator file: square, hexagonal or matrix:PATH.
    #[arg(long)]
    lattice: Option<String>,
    /// Covolume for the lattice presets [default: 0.5].
    #[arg(long)]
    volume: Option<f64>,
    /// Torus grid resolution per axis [default: 64].
    #[arg(long)]
    grid_res: Option<usize>,
    /// Absolute tail target for lattice sums [default: 1e-10].
    #[arg(long)]
    tail: Option<f64>,
    /// Truncation radius of the finite sections [default: 6].
    #[arg(long)]
    section_radius: Option<f64>,
    /// Bound route: janssen, gram or both [default: janssen].
    #[arg(long)]
    method: Option<String>,
    /// Artifact path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// key = value file supplying any option not set by a flag.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(cli: Cli) -> Result<RunConfig, gabor_bounds::Error> {
    let (kind, common, quick) = match cli.command {
        Command::Bounds(c) => (CommandKind::Bounds, c, None),
        Command::Verify(c) => (CommandKind::Verify, c, None),
        Command::Scan(c) => (CommandKind::Scan, c, None),
        Command::CheckIdentities { common, quick } => {
            (CommandKind::CheckIdentities, common, Some(quick))
        }
    };
    let mut config = RunConfig::new(kind);
    config.window = common.window.as_deref().map(str::parse).transpose()?;
    config.lattice = common.lattice.as_deref().map(str::parse).transpose()?;
    config.volume = common.volume;
    config.grid_res = common.grid_res;
    config.tail = common.tail;
    config.section_radius = common.section_radius;
    config.method = common.method.as_deref().map(str::parse).transpose()?;
    config.out = common.out;
    config.format = common.format.as_deref().map(str::parse).transpose()?;
    config.quick = quick;
    config.config_file = common.config;
    Ok(config)
}

fn main() {
    let config = match build_config(Cli::parse()) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(RunStatus::InvalidConfig.code());
        }
    };
    let outcome = runner::run(&config);
    eprintln!("{}", outcome.message);
    process::exit(outcome.status.code());
}
