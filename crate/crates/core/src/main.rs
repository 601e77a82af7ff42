//! Thin command-line front end over the experiment runners.
//!
//! Exit codes: 0 all checks passed, 1 invalid configuration or usage,
//! 2 a computation ran but a checked threshold failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ultrawave::experiment::{
    cmd_cauchy, cmd_degeneracy, cmd_eigen, cmd_fourier_selftest, cmd_norms, cmd_planewave,
    cmd_radon, ExperimentConfig, OutputFormat, RunOutcome,
};

#[derive(Parser)]
#[command(name = "ultrawave", version, about = "Exact p-adic wave equation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Prime of the base field Q_p
    #[arg(long)]
    p: Option<u64>,
    /// Spatial dimension
    #[arg(long)]
    n: Option<usize>,
    /// Order of the fractional operator
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Support ball exponent (functions live in ||x|| <= p^N)
    #[arg(long = "N", allow_negative_numbers = true)]
    big_n: Option<i64>,
    /// Constancy exponent (functions constant on balls of radius p^-l)
    #[arg(long, allow_negative_numbers = true)]
    l: Option<i64>,
    /// Seed for the deterministic random test functions
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated Cauchy routes (radon,direct,spectral,convolution)
    #[arg(long, value_delimiter = ',')]
    routes: Option<Vec<String>>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table output format: csv or json
    #[arg(long)]
    format: Option<OutputFormat>,
    /// JSON config file; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the eigenfunction relation and the radial null space
    Eigen(CommonArgs),
    /// Check that plane waves solve the wave equation
    Planewave(CommonArgs),
    /// Radon transform roundtrip on random test functions
    Radon(CommonArgs),
    /// Solve the Cauchy problem along the requested routes and compare
    Cauchy(CommonArgs),
    /// Exact measure of the degenerate symbol set
    Degeneracy(CommonArgs),
    /// L_kappa norm ratios of the solution kernels (report only)
    Norms(CommonArgs),
    /// Fourier roundtrip, Plancherel, and fast-vs-direct self test
    FourierSelftest(CommonArgs),
}

fn build_config(args: &CommonArgs) -> Result<ExperimentConfig, ultrawave::Error> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = args.p {
        config.p = p;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if let Some(big_n) = args.big_n {
        config.big_n = big_n;
    }
    if let Some(l) = args.l {
        config.l = l;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(routes) = &args.routes {
        config.routes = routes.clone();
    }
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    if let Some(format) = args.format {
        config.format = format;
    }
    Ok(config)
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("ULTRAWAVE_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors; usage mistakes exit 1
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (args, runner): (&CommonArgs, fn(&ExperimentConfig) -> ultrawave::Result<RunOutcome>) =
        match &cli.command {
            Command::Eigen(a) => (a, cmd_eigen),
            Command::Planewave(a) => (a, cmd_planewave),
            Command::Radon(a) => (a, cmd_radon),
            Command::Cauchy(a) => (a, cmd_cauchy),
            Command::Degeneracy(a) => (a, cmd_degeneracy),
            Command::Norms(a) => (a, cmd_norms),
            Command::FourierSelftest(a) => (a, cmd_fourier_selftest),
        };
    let config = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };
    match runner(&config) {
        Ok(outcome) => {
            println!("{}", outcome.report);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("check failed");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
