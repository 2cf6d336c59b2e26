use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Flat key set shared by the config file and the command-line flags.
/// Keys irrelevant to the chosen subcommand are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub const DEFAULT_SEED: u64 = 20260101;

/// `(key, default, description)` for `--help`.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("seed", "20260101", "master seed of the replicate streams"),
    ("out", "gue-lab-out", "output directory"),
    ("format", "json", "csv or json"),
    ("threads", "0", "worker threads, 0 = available parallelism"),
    ("grid_step", "0.25", "verify-identities: spacing of the x grid on [-5, 3]"),
    ("n", "2048 / 1024 / 400", "matrix size (kernel-stats / clt / zeros)"),
    ("t", "0", "kernel-stats: interval [t√(2n), ∞) unless lo/hi are given"),
    ("lo", "-", "kernel-stats: lower endpoint (raw units)"),
    ("hi", "inf", "kernel-stats: upper endpoint (raw units)"),
    ("mode", "bulk-single", "clt: bulk-single, edge-single, bulk-joint, edge-joint, mosteller"),
    ("k", "n/2, edge ⌈n^exponent⌉", "clt: index of a single eigenvalue"),
    ("edge_exponent", "0.5", "clt: default edge index exponent"),
    ("thetas", "[0.5]", "clt joint: gap exponents"),
    ("gamma", "0.5", "clt edge-joint: edge exponent"),
    ("indices", "-", "clt bulk-joint: explicit ascending indices"),
    ("lambdas", "[0.25, 0.75]", "clt mosteller: quantile levels"),
    ("replicates", "5000", "clt: Monte Carlo replicates (at least 100)"),
    ("sampler", "tridiagonal", "clt: tridiagonal or dense"),
];

pub fn keys_help() -> String {
    let mut s = String::from("Config keys (TOML file via --config, or the matching flag):\n");
    for (k, d, h) in KEYS {
        s.push_str(&format!("  {k:<14} default {d:<24} {h}\n"));
    }
    s
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    /// Values set in `over` win.
    pub fn merge(self, over: FileConfig) -> FileConfig {
        macro_rules! pick {
            ($($f:ident),*) => { FileConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            seed, out, format, threads, grid_step, n, t, lo, hi, mode, k, edge_exponent, thetas, gamma, indices,
            lambdas, replicates, sampler
        )
    }
}
