mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, CliResult};
use config::{resolve, Overrides, TOL_ENV};

/// Wrap and quantize probability densities along lattices and tabulate the
/// information carried by each part.
#[derive(Parser, Debug)]
#[command(name = "lattice-decomp", version, about)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// Density family: gaussian or exponential.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Comma-separated parameter values (variances or rates).
    #[arg(long, global = true, allow_hyphen_values = true)]
    params: Option<String>,
    /// Lattice step α of αZ.
    #[arg(long, global = true)]
    lattice_scale: Option<String>,
    /// Fundamental domain: centered, left, or a left endpoint.
    #[arg(long, global = true, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Parameter grid as start:stop:step (stop included).
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Absolute tolerance, in (0, 1e-2].
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<String>,
    /// Units for entropies and mutual information: nats or bits.
    #[arg(long, global = true)]
    units: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<String>,
    /// INI file with [common] and per-command sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct GroupArgs {
    /// lattice (Z^n over a sublattice) or code (Z_q^n over a linear code).
    #[arg(long)]
    ambient: Option<String>,
    /// Sublattice columns, e.g. "2,0;0,2".
    #[arg(long, allow_hyphen_values = true)]
    sublattice: Option<String>,
    /// Code alphabet size q.
    #[arg(long)]
    modulus: Option<String>,
    /// Code generator rows, e.g. "1,1,1".
    #[arg(long)]
    generator: Option<String>,
    /// Code length n.
    #[arg(long)]
    length: Option<String>,
    /// Uniform pmf support {0, …, window-1}^n on lattices.
    #[arg(long)]
    window: Option<String>,
    /// uniform or geometric:R.
    #[arg(long)]
    pmf: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct VerifyArgs {
    /// Override a suite tolerance, SUITE=TOL (repeatable); flagged in the report.
    #[arg(long)]
    widen: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Original, wrapped, quantized and product tables per parameter value.
    Decompose,
    /// Entropies, mutual information and its upper bound along a grid.
    MiSweep,
    /// Fisher information at all three levels with Loewner checks.
    FisherSweep,
    /// Checks bound > I at every grid point.
    BoundsCheck,
    /// Coset tables and wrapped/quantized pmfs of a finite quotient.
    GroupDemo(GroupArgs),
    /// Runs the invariant suites; JSON lines on stdout.
    Verify(VerifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::MiSweep => "mi-sweep",
            Command::FisherSweep => "fisher-sweep",
            Command::BoundsCheck => "bounds-check",
            Command::GroupDemo(_) => "group-demo",
            Command::Verify(_) => "verify",
        }
    }
}

fn overrides(cli: &Cli) -> Overrides {
    let c = cli.common.clone();
    let mut o = Overrides {
        config: c.config,
        ..Overrides::default()
    };
    o.set("model", c.model);
    o.set("params", c.params);
    o.set("lattice-scale", c.lattice_scale);
    o.set("domain", c.domain);
    o.set("grid", c.grid);
    o.set("tol", c.tol);
    o.set("units", c.units);
    o.set("out", c.out);
    o.set("seed", c.seed);
    o.set("jobs", c.jobs);
    match &cli.command {
        Command::GroupDemo(g) => {
            let g = g.clone();
            o.set("ambient", g.ambient);
            o.set("sublattice", g.sublattice);
            o.set("modulus", g.modulus);
            o.set("generator", g.generator);
            o.set("length", g.length);
            o.set("window", g.window);
            o.set("pmf", g.pmf);
        }
        Command::Verify(v) => o.widen = v.widen.clone(),
        _ => {}
    }
    o
}

fn run(cli: &Cli) -> CliResult<()> {
    let settings = resolve(
        cli.command.name(),
        &overrides(cli),
        std::env::var(TOL_ENV).ok(),
    )?;
    let outputs = match &cli.command {
        Command::Decompose => commands::decompose(&settings)?,
        Command::MiSweep => commands::mi_sweep(&settings)?,
        Command::FisherSweep => commands::fisher_sweep(&settings)?,
        Command::BoundsCheck => commands::bounds_check(&settings)?,
        Command::GroupDemo(_) => commands::group_demo(&settings)?,
        Command::Verify(_) => return verify::verify(&settings),
    };
    outputs.write_all(&settings.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            let code: CliError = e;
            ExitCode::from(code.exit_code() as u8)
        }
    }
}
