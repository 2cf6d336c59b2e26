mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use config::{FileConfig, Format};

#[derive(Debug, Parser)]
#[command(name = "gue-lab", version, about = "Numerical laboratory for GUE eigenvalue fluctuations")]
struct Cli {
    /// Flat TOML file with any of the config keys listed below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 means available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the five closed-form Airy integrals against quadrature.
    VerifyIdentities {
        #[arg(long)]
        grid_step: Option<f64>,
        /// Perturb one closed-form prefactor (negative control).
        #[arg(long, hide = true)]
        corrupt_constant: bool,
    },
    /// Expected count and number variance of an interval, with asymptotics.
    KernelStats {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4096))]
        n: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
    /// Monte Carlo check of the eigenvalue central limit theorems.
    Clt {
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        edge_exponent: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        thetas: Option<Vec<f64>>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        sampler: Option<String>,
    },
    /// Hermite zeros against their semicircle location estimates.
    Zeros {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=2000))]
        n: Option<u64>,
    },
}

impl Cli {
    fn flags(&self) -> FileConfig {
        let mut f = FileConfig {
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
            threads: self.threads,
            ..FileConfig::default()
        };
        match &self.command {
            Command::VerifyIdentities { grid_step, .. } => f.grid_step = *grid_step,
            Command::KernelStats { n, t, lo, hi } => {
                f.n = n.map(|v| v as usize);
                f.t = *t;
                f.lo = *lo;
                f.hi = *hi;
            }
            Command::Clt {
                mode,
                n,
                k,
                edge_exponent,
                thetas,
                gamma,
                indices,
                lambdas,
                replicates,
                sampler,
            } => {
                f.mode = mode.clone();
                f.n = *n;
                f.k = *k;
                f.edge_exponent = *edge_exponent;
                f.thetas = thetas.clone();
                f.gamma = *gamma;
                f.indices = indices.clone();
                f.lambdas = lambdas.clone();
                f.replicates = *replicates;
                f.sampler = sampler.clone();
            }
            Command::Zeros { n } => f.n = n.map(|v| v as usize),
        }
        f
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().after_help(config::keys_help()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let file = match &cli.config {
        Some(p) => match FileConfig::load(p) {
            Ok(f) => f,
            Err(e) => return commands::usage(&e),
        },
        None => FileConfig::default(),
    };
    let merged = file.merge(cli.flags());
    let (name, resolved) = match &cli.command {
        Command::VerifyIdentities { .. } => ("verify-identities", commands::resolve_identities(merged)),
        Command::KernelStats { .. } => ("kernel-stats", commands::resolve_kernel(merged)),
        Command::Clt { .. } => ("clt", commands::resolve_clt(merged)),
        Command::Zeros { .. } => ("zeros", commands::resolve_zeros(merged)),
    };
    let resolved = match resolved {
        Ok(r) => r,
        Err(e) => return commands::usage(&e),
    };
    if cli.print_config {
        print!("{}", toml::to_string(&resolved).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    let threads = resolved.threads.unwrap_or(0);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        return commands::usage(&format!("cannot build thread pool: {e}"));
    }
    let corrupt = matches!(cli.command, Command::VerifyIdentities { corrupt_constant: true, .. });
    commands::execute(name, &resolved, corrupt)
}
