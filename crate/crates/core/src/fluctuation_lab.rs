//! Monte Carlo experiments for the individual and joint eigenvalue central
//! limit theorems, with the uniform order-statistics baseline.
//!
//! Replicate `r` draws from `SeedSpec { master_seed, stream_index: r }`.
//! Replicates run on the rayon pool but are collected in index order and all
//! reductions are pairwise sums in that order, so a report depends only on
//! its configuration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{
    sample_gue_dense, sample_gue_selected, sample_uniform_order_stats, SamplerChoice, SeedSpec, DENSE_MAX_N,
    GAMMA_METHOD, GAUSSIAN_METHOD, PRNG_ALGORITHM,
};
use crate::semicircle::{
    bulk_index_warning, bulk_standardization, covariance_bulk, covariance_edge, edge_index_warning,
    edge_standardization, mosteller_correlation, CovarianceModel, IndexExponents, Standardization,
};
use crate::stats::{correlation, ks_statistic, mean_and_covariance, normal_cdf};

pub const REPORT_SCHEMA: u32 = 1;
pub const MIN_REPLICATES: usize = 100;

/// Pilot-calibrated Monte Carlo tolerances (see `docs/pilots.md`).
pub mod thresholds {
    pub const BULK_KS: f64 = 0.05;
    pub const BULK_MEAN: f64 = 0.1;
    pub const BULK_VAR: f64 = 0.2;
    pub const EDGE_KS: f64 = 0.08;
    pub const BULK_CORR: f64 = 0.1;
    pub const EDGE_CORR: f64 = 0.15;
    pub const MOSTELLER_CORR: f64 = 0.05;
    pub const MOSTELLER_KS: f64 = 0.03;
}

const PILOT: &str = "pilot-calibrated Monte Carlo tolerance; no convergence rate is available for the limit law";
const LIMIT: &str = "target is the limit covariance; tolerance pilot-calibrated";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    BulkSingle,
    EdgeSingle,
    BulkJoint,
    EdgeJoint,
    MostellerBaseline,
}

/// Which eigenvalues (or sample quantiles) an experiment follows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSpec {
    /// Bulk: `x_k`. Edge: `x_{n-k}`.
    Single { k: usize },
    Joint(IndexExponents),
    Quantiles { lambdas: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    pub index: IndexSpec,
    pub replicates: usize,
    pub master_seed: u64,
    pub sampler: SamplerChoice,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.replicates < MIN_REPLICATES {
            return cfg(format!("replicates = {} is below the minimum {MIN_REPLICATES}", self.replicates));
        }
        if self.n < 2 {
            return cfg("n must be at least 2".into());
        }
        if self.sampler == SamplerChoice::Dense && self.n > DENSE_MAX_N && self.mode != Mode::MostellerBaseline {
            return cfg(format!("the dense sampler is limited to n <= {DENSE_MAX_N}"));
        }
        match (&self.mode, &self.index) {
            (Mode::BulkSingle, IndexSpec::Single { k }) => {
                if *k < 1 || *k >= self.n {
                    return cfg(format!("bulk index k = {k} outside 1..=n-1"));
                }
            }
            (Mode::EdgeSingle, IndexSpec::Single { k }) => {
                if *k < 2 || *k >= self.n {
                    return cfg(format!("edge index k = {k} needs 2 <= k < n"));
                }
            }
            (Mode::BulkJoint, IndexSpec::Joint(e)) => {
                if e.gamma.is_some() {
                    return cfg("bulk joint experiments take no edge exponent".into());
                }
                if e.ks.iter().any(|&k| k < 1 || k >= self.n) {
                    return cfg(format!("bulk indices {:?} outside 1..=n-1", e.ks));
                }
            }
            (Mode::EdgeJoint, IndexSpec::Joint(e)) => {
                if e.gamma.is_none() {
                    return cfg("edge joint experiments need the edge exponent gamma".into());
                }
                if e.ks.iter().any(|&k| k < 2 || k >= self.n) {
                    return cfg(format!("edge indices {:?} need 2 <= k < n", e.ks));
                }
            }
            (Mode::MostellerBaseline, IndexSpec::Quantiles { lambdas }) => {
                if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
                    return cfg("quantile levels must lie in (0, 1)".into());
                }
                if lambdas.windows(2).any(|w| w[1] < w[0]) {
                    return cfg("quantile levels must be ascending".into());
                }
            }
            (m, i) => return cfg(format!("index specification {i:?} does not fit mode {m:?}")),
        }
        Ok(())
    }
}

/// One pass/fail check with its threshold and where the threshold comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: String,
}

impl Verdict {
    fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64, provenance: &str) -> Self {
        Self {
            name: name.into(),
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
            provenance: provenance.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub prng: String,
    pub gaussian: String,
    pub gamma: String,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            prng: PRNG_ALGORITHM.to_string(),
            gaussian: GAUSSIAN_METHOD.to_string(),
            gamma: GAMMA_METHOD.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub metadata: Metadata,
    /// 1-based ascending index of each followed eigenvalue (or order statistic).
    pub indices: Vec<usize>,
    pub standardizations: Vec<Standardization>,
    /// `replicates × m`.
    pub standardized_samples: Vec<Vec<f64>>,
    pub sample_mean: Vec<f64>,
    pub sample_cov: Vec<Vec<f64>>,
    pub sample_corr: Vec<Vec<f64>>,
    /// Kolmogorov–Smirnov distance of each coordinate to `N(0, 1)`.
    pub marginal_ks: Vec<f64>,
    /// First-coordinate KS distance, for univariate modes.
    pub ks_stat: Option<f64>,
    pub target_cov: CovarianceModel,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Standardized samples: header `X_1,...,X_m`, one row per replicate.
    pub fn samples_csv(&self) -> String {
        let m = self.indices.len();
        let mut out = (1..=m).map(|i| format!("X_{i}")).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.standardized_samples {
            out.push_str(&row.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

// Ascending eigenvalue indices followed in one replicate, and their maps.
fn eigen_targets(config: &ExperimentConfig) -> Result<(Vec<usize>, Vec<Standardization>, Vec<String>)> {
    let n = config.n;
    let mut warnings = Vec::new();
    let (edge, ks): (bool, Vec<usize>) = match (&config.mode, &config.index) {
        (Mode::BulkSingle, IndexSpec::Single { k }) => (false, vec![*k]),
        (Mode::EdgeSingle, IndexSpec::Single { k }) => (true, vec![*k]),
        (Mode::BulkJoint, IndexSpec::Joint(e)) => (false, e.ks.clone()),
        (Mode::EdgeJoint, IndexSpec::Joint(e)) => (true, e.ks.clone()),
        _ => unreachable!("validated"),
    };
    let mut idx = Vec::new();
    let mut maps = Vec::new();
    for k in ks {
        if edge {
            warnings.extend(edge_index_warning(n, k));
            idx.push(n - k);
            maps.push(edge_standardization(n, k)?);
        } else {
            warnings.extend(bulk_index_warning(n, k));
            idx.push(k);
            maps.push(bulk_standardization(n, k)?);
        }
    }
    Ok((idx, maps, warnings))
}

fn draw_eigenvalues(config: &ExperimentConfig, idx: &[usize], r: u64) -> Result<Vec<f64>> {
    let seed = SeedSpec::new(config.master_seed, r);
    match config.sampler {
        SamplerChoice::Tridiagonal => sample_gue_selected(config.n, seed, idx),
        SamplerChoice::Dense => {
            let s = sample_gue_dense(config.n, seed)?;
            Ok(idx.iter().map(|&k| s.eigenvalues[k - 1]).collect())
        }
    }
}

fn summarize(
    config: &ExperimentConfig,
    indices: Vec<usize>,
    standardizations: Vec<Standardization>,
    samples: Vec<Vec<f64>>,
    target_cov: CovarianceModel,
    warnings: Vec<String>,
) -> ExperimentReport {
    let (sample_mean, sample_cov) = mean_and_covariance(&samples);
    let sample_corr = correlation(&sample_cov);
    let marginal_ks = (0..indices.len())
        .map(|c| {
            let mut col: Vec<f64> = samples.iter().map(|r| r[c]).collect();
            col.sort_by(|a, b| a.total_cmp(b));
            ks_statistic(&col, normal_cdf)
        })
        .collect::<Vec<_>>();
    let ks_stat = (indices.len() == 1).then(|| marginal_ks[0]);
    let mut verdicts = Vec::new();
    match config.mode {
        Mode::BulkSingle => {
            verdicts.push(Verdict::within("ks", marginal_ks[0], 0.0, thresholds::BULK_KS, PILOT));
            verdicts.push(Verdict::within("mean", sample_mean[0], 0.0, thresholds::BULK_MEAN, PILOT));
            verdicts.push(Verdict::within("variance", sample_cov[0][0], 1.0, thresholds::BULK_VAR, PILOT));
        }
        Mode::EdgeSingle => {
            verdicts.push(Verdict::within("ks", marginal_ks[0], 0.0, thresholds::EDGE_KS, PILOT));
        }
        Mode::BulkJoint | Mode::EdgeJoint | Mode::MostellerBaseline => {
            let tol = match config.mode {
                Mode::BulkJoint => thresholds::BULK_CORR,
                Mode::EdgeJoint => thresholds::EDGE_CORR,
                _ => thresholds::MOSTELLER_CORR,
            };
            let m = indices.len();
            for i in 0..m {
                for j in i + 1..m {
                    verdicts.push(Verdict::within(
                        format!("corr_{}_{}", i + 1, j + 1),
                        sample_corr[i][j],
                        target_cov.lambda[i][j],
                        tol,
                        LIMIT,
                    ));
                }
            }
            if config.mode == Mode::MostellerBaseline && m == 1 {
                verdicts.push(Verdict::within("ks", marginal_ks[0], 0.0, thresholds::MOSTELLER_KS, PILOT));
            }
        }
    }
    ExperimentReport {
        schema: REPORT_SCHEMA,
        config: config.clone(),
        metadata: Metadata::default(),
        indices,
        standardizations,
        standardized_samples: samples,
        sample_mean,
        sample_cov,
        sample_corr,
        marginal_ks,
        ks_stat,
        target_cov,
        verdicts,
        warnings,
    }
}

fn run_eigen(config: &ExperimentConfig, target_cov: CovarianceModel) -> Result<ExperimentReport> {
    let (idx, maps, warnings) = eigen_targets(config)?;
    let samples: Vec<Vec<f64>> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let x = draw_eigenvalues(config, &idx, r)?;
            Ok(x.iter().zip(&maps).map(|(v, s)| s.apply(*v)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(summarize(config, idx, maps, samples, target_cov, warnings))
}

/// Single eigenvalue: bulk `x_k` or edge `x_{n-k}`, standardized and tested
/// against `N(0, 1)`.
pub fn run_single(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    if !matches!(config.mode, Mode::BulkSingle | Mode::EdgeSingle) {
        return Err(Error::Config(format!("run_single cannot run mode {:?}", config.mode)));
    }
    run_eigen(config, CovarianceModel::new(vec![vec![1.0]])?)
}

/// Several eigenvalues of the same spectrum, compared with the limit
/// covariance.
pub fn run_joint(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let IndexSpec::Joint(e) = &config.index else {
        return Err(Error::Config("run_joint needs a joint index specification".into()));
    };
    let target = match config.mode {
        Mode::BulkJoint => covariance_bulk(e)?,
        Mode::EdgeJoint => covariance_edge(e)?,
        m => return Err(Error::Config(format!("run_joint cannot run mode {m:?}"))),
    };
    run_eigen(config, target)
}

/// Uniform order statistics `X_(⌊λ_j n⌋+1)` standardized by mean `λ_j` and
/// variance `λ_j(1-λ_j)/n`.
pub fn run_mosteller(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let IndexSpec::Quantiles { lambdas } = &config.index else {
        return Err(Error::Config("run_mosteller needs quantile levels".into()));
    };
    let n = config.n;
    let nf = n as f64;
    let idx: Vec<usize> = lambdas.iter().map(|&l| (l * nf).floor() as usize + 1).collect();
    let maps: Vec<Standardization> = lambdas
        .iter()
        .map(|&l| Standardization {
            center: l,
            scale: (l * (1.0 - l) / nf).sqrt(),
        })
        .collect();
    let samples: Vec<Vec<f64>> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let u = sample_uniform_order_stats(n, SeedSpec::new(config.master_seed, r));
            idx.iter().zip(&maps).map(|(&k, s)| s.apply(u[k - 1])).collect()
        })
        .collect();
    let target = mosteller_correlation(lambdas)?;
    Ok(summarize(config, idx, maps, samples, target, Vec::new()))
}

/// Dispatch on the configured mode.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.mode {
        Mode::BulkSingle | Mode::EdgeSingle => run_single(config),
        Mode::BulkJoint | Mode::EdgeJoint => run_joint(config),
        Mode::MostellerBaseline => run_mosteller(config),
    }
}
