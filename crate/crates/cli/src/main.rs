use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlbm_cli::config::{ExperimentConfig, ExperimentKind, OperatorKind};
use nlbm_cli::{run, CliError, Suite};

#[derive(Parser)]
#[command(name = "nlbm", version, about = "Simulation and verification of non-local skew and sticky Brownian motions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample paths of a process.
    Simulate(Flags),
    /// Analytic and Monte Carlo resolvents.
    Resolvent(Flags),
    /// Non-local spatial and temporal operators.
    Operator(Flags),
    /// Heat-equation solution from the representation formula.
    Pde(Flags),
    /// Run a named verification suite.
    Verify(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// TOML file with the run configuration; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Option<Vec<f64>>,
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Jump size below which the subordinator is replaced by its drift.
    #[arg(long)]
    eps: Option<f64>,
    /// Standard errors above this make a Monte Carlo check inconclusive (exit 4).
    #[arg(long)]
    max_se: Option<f64>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// CSV grid (nu, alpha, lambda, f, optional eta) for the interface suite.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, value_enum)]
    operator: Option<OperatorKind>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long)]
    side: Option<String>,
    /// Gaver-Stehfest order.
    #[arg(long)]
    order: Option<usize>,
}

fn assemble(kind: ExperimentKind, flags: Flags) -> Result<ExperimentConfig, CliError> {
    let base = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(declared) = base.experiment {
        if declared != kind {
            return Err(CliError::Config(format!(
                "config declares experiment `{}` but the `{}` subcommand was used",
                declared.name(),
                kind.name()
            )));
        }
    }
    let overrides = ExperimentConfig {
        experiment: Some(kind),
        seed: flags.seed,
        process: flags.process,
        symbol: flags.symbol,
        nu: flags.nu,
        eta: flags.eta,
        f: flags.f,
        x: flags.x,
        lambda: flags.lambda,
        t: flags.t,
        alpha: flags.alpha,
        xi: flags.xi,
        n_paths: flags.n_paths,
        dt: flags.dt,
        horizon: flags.horizon,
        eps: flags.eps,
        max_se: flags.max_se,
        suite: flags.suite,
        grid: flags.grid,
        operator: flags.operator,
        u: flags.u,
        phi: flags.phi,
        side: flags.side,
        order: flags.order,
        out: flags.out,
        csv: flags.csv,
        threads: flags.threads,
    };
    Ok(base.overlay(overrides))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, flags) = match cli.command {
        Command::Simulate(f) => (ExperimentKind::Simulate, f),
        Command::Resolvent(f) => (ExperimentKind::Resolvent, f),
        Command::Operator(f) => (ExperimentKind::Operator, f),
        Command::Pde(f) => (ExperimentKind::Pde, f),
        Command::Verify(f) => (ExperimentKind::Verify, f),
    };
    let outcome = assemble(kind, flags).and_then(|config| {
        if let Some(n) = config.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
        }
        let report = run(&config)?;
        if config.out.is_none() {
            print!("{}", report.to_json());
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            for c in report.checks().iter().filter(|c| !c.pass || c.inconclusive) {
                let label = if c.inconclusive { "INCONCLUSIVE" } else { "FAIL" };
                let se = c.se.map_or(String::new(), |se| format!(" (se {se})"));
                eprintln!("{label} {}: analytic {} estimate {}{se} tolerance {}", c.name, c.analytic, c.estimate, c.tolerance);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
