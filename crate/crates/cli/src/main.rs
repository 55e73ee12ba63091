use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fermi_euler::harness::{describe, execute, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "fermi-euler", version, about = "Hydrodynamic-limit laboratory for free lattice fermions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare coarse-grained microscopic densities with the Euler solution.
    HydroCompare(Common),
    /// Relative entropy of the evolved state against the Euler local Gibbs state.
    EntropyTrack(Common),
    /// Run every module's invariant suite; nonzero exit on any failure.
    Checks(Common),
    /// Tabulate the rest-frame pressure closure.
    EosTable(Common),
    /// Run the finite-volume Euler solver.
    EulerRun(Common),
    /// Evolve a local Gibbs state and write densities and currents.
    MicroRun(Common),
    /// Scan the large-deviation rate function over a density/energy grid.
    RateScan(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluate the EOS directly instead of through a table.
    #[arg(long)]
    direct_eos: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::HydroCompare(c) => (ExperimentKind::HydroCompare, c),
        Command::EntropyTrack(c) => (ExperimentKind::EntropyTrack, c),
        Command::Checks(c) => (ExperimentKind::Checks, c),
        Command::EosTable(c) => (ExperimentKind::EosTable, c),
        Command::EulerRun(c) => (ExperimentKind::EulerRun, c),
        Command::MicroRun(c) => (ExperimentKind::MicroRun, c),
        Command::RateScan(c) => (ExperimentKind::RateScan, c),
    };
    match run(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(kind: ExperimentKind, args: Common) -> fermi_euler::Result<bool> {
    let (mut cfg, text) = ExperimentConfig::load(&args.config)?;
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(fermi_euler::Error::Config(format!(
                "config is for '{}' but '{}' was requested",
                k.name(),
                kind.name()
            )));
        }
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.euler.direct_eos |= args.direct_eos;
    let outcome = execute(kind, &cfg, &text, &cfg.out_dir)?;
    describe(&outcome, std::io::stdout())?;
    if let Some(report) = &outcome.checks {
        for item in &report.items {
            println!(
                "{} {:<28} {:>12.3e} {} {:.1e}  {}",
                if item.pass { "PASS" } else { "FAIL" },
                item.name,
                item.measured,
                item.comparison,
                item.tolerance,
                item.detail
            );
        }
    }
    Ok(outcome.passed)
}
