//! Semicircle law, eigenvalue standardizations, limit covariance models and
//! the Hermite-zero location estimate.
//!
//! Index sequences are ascending everywhere. A descending sequence
//! `k_1 > k_2 > ...` is relabelled in reverse order; the covariance only
//! depends on the gap exponents between two positions, so nothing else
//! changes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::symmetric_eigenvalues;

/// `G(t) = (2/π) ∫_{-1}^t √(1-x²) dx = (arcsin t + t√(1-t²))/π + ½`.
pub fn semicircle_cdf(t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("semicircle_cdf needs |t| <= 1, got {t}"));
    }
    Ok(cdf_unchecked(t))
}

fn cdf_unchecked(t: f64) -> f64 {
    ((t.asin() + t * (1.0 - t * t).sqrt()) / PI + 0.5).clamp(0.0, 1.0)
}

/// Semicircle density on `[-1, 1]`.
pub fn semicircle_density(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        2.0 / PI * (1.0 - t * t).sqrt()
    }
}

/// `G⁻¹(a)` by Newton iteration safeguarded with bisection, to
/// `|G(t) - a| <= 1e-13`.
pub fn semicircle_quantile(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return domain(format!("semicircle_quantile needs 0 < a < 1, got {a}"));
    }
    // Near ±1, G(t) ≈ (2√2/3π)(1∓t)^{3/2}; in between the sine of the
    // centred arcsine argument is a fair start.
    let mut t = if a < 0.05 {
        -1.0 + (3.0 * PI * a / (2.0 * 2f64.sqrt())).powf(2.0 / 3.0)
    } else if a > 0.95 {
        1.0 - (3.0 * PI * (1.0 - a) / (2.0 * 2f64.sqrt())).powf(2.0 / 3.0)
    } else {
        (PI * (a - 0.5) / 2.0).sin()
    };
    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    for _ in 0..200 {
        let r = cdf_unchecked(t) - a;
        if r.abs() <= 1e-13 {
            return Ok(t);
        }
        if r > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let d = semicircle_density(t);
        let mut next = if d > 0.0 { t - r / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == t {
            break;
        }
        t = next;
    }
    Ok(t)
}

/// Affine map `x ↦ (x - center)/scale` that standardizes one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub center: f64,
    pub scale: f64,
}

impl Standardization {
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }
}

/// Bulk map for `x_k`: center `t√(2n)` with `t = G⁻¹(k/n)`, scale
/// `√(log n / (4(1-t²)n))`.
pub fn bulk_standardization(n: usize, k: usize) -> Result<Standardization> {
    if n < 2 || k < 1 || k > n - 1 {
        return domain(format!("bulk index needs 1 <= k <= n-1, got k = {k}, n = {n}"));
    }
    let nf = n as f64;
    let t = semicircle_quantile(k as f64 / nf)?;
    Ok(Standardization {
        center: t * (2.0 * nf).sqrt(),
        scale: (nf.ln() / (4.0 * (1.0 - t * t) * nf)).sqrt(),
    })
}

/// Warning text when `k/n` is too close to the spectrum edges for the bulk map.
pub fn bulk_index_warning(n: usize, k: usize) -> Option<String> {
    let a = k as f64 / n as f64;
    (!(0.01..=0.99).contains(&a)).then(|| format!("k/n = {a:.4} is outside [0.01, 0.99]; the bulk law is not in force"))
}

/// Edge map for `x_{n-k}`: center `√(2n)(1 - (3πk/(4√2 n))^{2/3})`, scale
/// `((1/12π)^{2/3} log k / (n^{1/3} k^{2/3}))^{1/2}`.
pub fn edge_standardization(n: usize, k: usize) -> Result<Standardization> {
    if k < 2 {
        return domain(format!("edge index needs k >= 2 (log k > 0), got {k}"));
    }
    if k >= n {
        return domain(format!("edge index needs k < n, got k = {k}, n = {n}"));
    }
    let (nf, kf) = (n as f64, k as f64);
    let center = (2.0 * nf).sqrt() * (1.0 - (3.0 * PI * kf / (4.0 * 2f64.sqrt() * nf)).powf(2.0 / 3.0));
    let var = (1.0 / (12.0 * PI)).powf(2.0 / 3.0) * kf.ln() / (nf.cbrt() * kf.powf(2.0 / 3.0));
    Ok(Standardization {
        center,
        scale: var.sqrt(),
    })
}

pub fn edge_index_warning(n: usize, k: usize) -> Option<String> {
    let a = k as f64 / n as f64;
    (a > 0.2).then(|| format!("k/n = {a:.4} > 0.2; the edge law needs k/n -> 0"))
}

/// Gap exponents and the concrete ascending index sequence they generate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexExponents {
    /// `thetas[i]` governs the gap `k_{i+1} - k_i`; length `m - 1`.
    pub thetas: Vec<f64>,
    /// Edge exponent, `k_1 ~ n^γ`; `None` for bulk configurations.
    pub gamma: Option<f64>,
    /// Ascending 1-based indices (bulk: `x_k`; edge: `x_{n-k}`).
    pub ks: Vec<usize>,
}

/// `⌈n^θ⌉`, the index gap used for `~ n^θ` at finite `n` (slowly varying factor fixed to one).
pub fn gap(n: usize, theta: f64) -> usize {
    ((n as f64).powf(theta) - 1e-9).ceil().max(1.0) as usize
}

impl IndexExponents {
    /// Bulk sequence starting at `k_first` with gaps `⌈n^{θ_i}⌉`.
    pub fn bulk(n: usize, k_first: usize, thetas: Vec<f64>) -> Result<Self> {
        let mut ks = vec![k_first];
        for &t in &thetas {
            ks.push(ks.last().unwrap() + gap(n, t));
        }
        Self::bulk_with_indices(n, thetas, ks)
    }

    /// Bulk configuration with explicitly chosen indices (for example gaps
    /// `n/4` when `θ = 1`).
    pub fn bulk_with_indices(n: usize, thetas: Vec<f64>, ks: Vec<usize>) -> Result<Self> {
        check_thetas(&thetas, 1.0, true)?;
        check_ks(n, &ks, thetas.len())?;
        Ok(Self { thetas, gamma: None, ks })
    }

    /// Edge sequence `k_1 = ⌈n^γ⌉`, `k_{i+1} = k_i + ⌈n^{θ_i}⌉`.
    pub fn edge(n: usize, gamma: f64, thetas: Vec<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return domain(format!("edge exponent gamma must lie in (0, 1), got {gamma}"));
        }
        check_thetas(&thetas, gamma, false)?;
        let mut ks = vec![gap(n, gamma)];
        for &t in &thetas {
            ks.push(ks.last().unwrap() + gap(n, t));
        }
        check_ks(n, &ks, thetas.len())?;
        if ks[0] < 2 {
            return domain("edge indices need k_1 >= 2");
        }
        Ok(Self {
            thetas,
            gamma: Some(gamma),
            ks,
        })
    }

    pub fn dim(&self) -> usize {
        self.thetas.len() + 1
    }
}

fn check_thetas(thetas: &[f64], upper: f64, closed: bool) -> Result<()> {
    for &t in thetas {
        let ok = t > 0.0 && if closed { t <= upper } else { t < upper };
        if !ok {
            let bracket = if closed { "]" } else { ")" };
            return domain(format!("gap exponent {t} outside (0, {upper}{bracket}"));
        }
    }
    Ok(())
}

fn check_ks(n: usize, ks: &[usize], n_thetas: usize) -> Result<()> {
    if ks.len() != n_thetas + 1 {
        return domain(format!("{} indices for {} gap exponents", ks.len(), n_thetas));
    }
    if ks.windows(2).any(|w| w[1] <= w[0]) {
        return domain("indices must be strictly ascending");
    }
    if ks[0] < 1 || *ks.last().unwrap() > n - 1 {
        return domain(format!("indices must lie in 1..=n-1 (n = {n}), got {ks:?}"));
    }
    Ok(())
}

/// Symmetric limit covariance (or correlation) matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceModel {
    pub dim: usize,
    pub lambda: Vec<Vec<f64>>,
}

impl CovarianceModel {
    /// Validates unit diagonal, symmetry, entries in `[0, 1]` and positive
    /// semidefiniteness (smallest eigenvalue `>= -1e-10`).
    pub fn new(lambda: Vec<Vec<f64>>) -> Result<Self> {
        let m = lambda.len();
        for (i, row) in lambda.iter().enumerate() {
            if row.len() != m {
                return domain("covariance matrix must be square");
            }
            if row[i] != 1.0 {
                return domain(format!("diagonal entry {i} is {} instead of 1", row[i]));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != lambda[j][i] {
                    return domain(format!("covariance not symmetric at ({i}, {j})"));
                }
                if !(0.0..=1.0).contains(&v) {
                    return domain(format!("entry ({i}, {j}) = {v} outside [0, 1]"));
                }
            }
        }
        let model = Self { dim: m, lambda };
        let min = model.min_eigenvalue()?;
        if min < -1e-10 {
            return domain(format!("covariance not positive semidefinite (smallest eigenvalue {min:e})"));
        }
        Ok(model)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        if self.dim == 0 {
            return Ok(0.0);
        }
        let flat: Vec<f64> = self.lambda.iter().flatten().copied().collect();
        Ok(symmetric_eigenvalues(self.dim, &flat)?[0])
    }
}

// The exponent entering Λ_ij: the largest gap exponent between positions i
// and j, i.e. over the gaps i, ..., j-1.
fn gap_exponent_max(thetas: &[f64], i: usize, j: usize) -> f64 {
    thetas[i..j].iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn build(m: usize, entry: impl Fn(usize, usize) -> f64) -> Result<CovarianceModel> {
    let mut lambda = vec![vec![1.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let v = entry(i, j).clamp(0.0, 1.0);
            lambda[i][j] = v;
            lambda[j][i] = v;
        }
    }
    CovarianceModel::new(lambda)
}

/// Bulk covariance `Λ_ij = 1 - max{θ_k : i <= k < j}`.
pub fn covariance_bulk(exponents: &IndexExponents) -> Result<CovarianceModel> {
    check_thetas(&exponents.thetas, 1.0, true)?;
    let th = &exponents.thetas;
    build(th.len() + 1, |i, j| 1.0 - gap_exponent_max(th, i, j))
}

/// Edge covariance `Λ_ij = 1 - max{θ_k : i <= k < j}/γ`.
pub fn covariance_edge(exponents: &IndexExponents) -> Result<CovarianceModel> {
    let Some(gamma) = exponents.gamma else {
        return domain("edge covariance needs the edge exponent gamma");
    };
    if !(gamma > 0.0 && gamma < 1.0) {
        return domain(format!("edge exponent gamma must lie in (0, 1), got {gamma}"));
    }
    check_thetas(&exponents.thetas, gamma, false)?;
    let th = &exponents.thetas;
    build(th.len() + 1, |i, j| 1.0 - gap_exponent_max(th, i, j) / gamma)
}

/// Limiting correlations of uniform sample quantiles,
/// `ρ = √(λ_j(1-λ_j')/(λ_j'(1-λ_j)))` for `λ_j <= λ_j'`.
///
/// Repeated levels are accepted and give correlation one.
pub fn mosteller_correlation(lambdas: &[f64]) -> Result<CovarianceModel> {
    if lambdas.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
        return domain("quantile levels must lie in (0, 1)");
    }
    if lambdas.windows(2).any(|w| w[1] < w[0]) {
        return domain("quantile levels must be ascending");
    }
    build(lambdas.len(), |i, j| {
        let (a, b) = (lambdas[i], lambdas[j]);
        (a * (1.0 - b) / (b * (1.0 - a))).sqrt()
    })
}

/// Default smallest admissible index distance from either end for the
/// Hermite-zero estimate.
pub const DEFAULT_ZERO_K0: usize = 10;

/// Estimate of the zero `z_{k,n}` of `H_n` and its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEstimate {
    /// Estimate of `z_{k,n}/√(2n)`.
    pub scaled: f64,
    /// `√(2n)·scaled`.
    pub raw: f64,
    /// `C/(n²(α(1-α))^{4/3})` with `α = k/n`, in scaled units.
    pub bound: f64,
}

/// `z_{k,n}/√(2n) ≈ G⁻¹[k/n - arcsin(G⁻¹(k/n))/(2πn) - 1/(2n)]` for
/// `k0 <= k <= n - k0`, with the bound evaluated for the constant `c`.
///
/// Zeros are numbered `z_{1,n} < … < z_{n,n}`. With `+1/(2n)` in place of
/// `-1/(2n)` the formula tracks `z_{k+1,n}` instead, and the error is
/// `O(1/n)` rather than `O(1/n²)`.
pub fn hermite_zero_estimate(n: usize, k: usize, k0: usize, c: f64) -> Result<ZeroEstimate> {
    if n < 2 || k < k0.max(1) || k + k0 > n || k >= n {
        return domain(format!("zero index needs {k0} <= k <= n - {k0}, got k = {k}, n = {n}"));
    }
    let nf = n as f64;
    let alpha = k as f64 / nf;
    let t = semicircle_quantile(alpha)?;
    let arg = alpha - t.asin() / (2.0 * PI * nf) - 0.5 / nf;
    if !(arg > 0.0 && arg < 1.0) {
        return domain(format!("corrected level {arg} left (0, 1)"));
    }
    let scaled = semicircle_quantile(arg)?;
    Ok(ZeroEstimate {
        scaled,
        raw: scaled * (2.0 * nf).sqrt(),
        bound: c / (nf * nf * (alpha * (1.0 - alpha)).powf(4.0 / 3.0)),
    })
}

/// `max_k |z_{k,n} - √(2n)G⁻¹(k/n)|·√n` over bulk indices `k ∈ [n/5, 4n/5]`,
/// i.e. the smallest `C` in `|z_{k,n} - √(2n)G⁻¹(k/n)| <= C/√n` at this `n`.
pub fn bulk_zero_constant(zeros: &[f64]) -> Result<f64> {
    let n = zeros.len();
    let nf = n as f64;
    let mut c: f64 = 0.0;
    for k in n.div_ceil(5)..=(4 * n) / 5 {
        if k == 0 || k >= n {
            continue;
        }
        let t = semicircle_quantile(k as f64 / nf)?;
        c = c.max((zeros[k - 1] - (2.0 * nf).sqrt() * t).abs() * nf.sqrt());
    }
    Ok(c)
}

/// Smallest constant making the refined estimate's bound hold at every
/// `k0 <= k <= n - k0`.
pub fn refined_zero_constant(zeros: &[f64], k0: usize) -> Result<f64> {
    let n = zeros.len();
    let mut c: f64 = 0.0;
    for k in k0.max(1)..=n.saturating_sub(k0) {
        if k >= n {
            break;
        }
        let est = hermite_zero_estimate(n, k, k0, 1.0)?;
        let err = (zeros[k - 1] / (2.0 * n as f64).sqrt() - est.scaled).abs();
        c = c.max(err / est.bound);
    }
    Ok(c)
}

/// Mirror image of a right-edge center for the left edge (`x ↦ -x`).
pub fn mirror(s: Standardization) -> Standardization {
    Standardization {
        center: -s.center,
        scale: s.scale,
    }
}
