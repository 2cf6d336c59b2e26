//! Small statistics toolbox: normal CDF, Kolmogorov–Smirnov distances,
//! moments and correlation matrices with order-stable summation.

use crate::quadrature::pairwise_sum;

/// Standard normal CDF, `Φ(x) = erfc(-x/√2)/2`.
///
/// `erfc` comes from `libm` (the musl port: rational approximations on
/// `[0, 0.84)`, `[0.84, 1.25)`, `[1.25, 28)`), accurate to about one ulp,
/// and evaluated on the side that avoids cancellation.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Kolmogorov–Smirnov distance between the empirical CDF of sorted
/// `samples` and `cdf`, evaluated exactly at the jump points.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let n = samples.len();
    if n == 0 {
        return 0.0;
    }
    debug_assert!(samples.windows(2).all(|w| w[0] <= w[1]), "samples must be sorted");
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / nf - f).max(f - i as f64 / nf);
    }
    d.clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov distance of two sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    if na == 0 || nb == 0 {
        return 0.0;
    }
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(v) / v.len() as f64
}

/// Unbiased sample variance.
pub fn variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return f64::NAN;
    }
    let m = mean(v);
    let sq: Vec<f64> = v.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (v.len() - 1) as f64
}

/// Column means and unbiased covariance of a `rows × m` sample (row-major
/// rows of equal length).
pub fn mean_and_covariance(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = rows.first().map_or(0, |r| r.len());
    let cols: Vec<Vec<f64>> = (0..m).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let denom = (rows.len().max(2) - 1) as f64;
    let mut cov = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in a..m {
            let prods: Vec<f64> = cols[a]
                .iter()
                .zip(&cols[b])
                .map(|(x, y)| (x - means[a]) * (y - means[b]))
                .collect();
            let c = pairwise_sum(&prods) / denom;
            cov[a][b] = c;
            cov[b][a] = c;
        }
    }
    (means, cov)
}

/// Correlation matrix from a covariance matrix.
pub fn correlation(cov: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = cov.len();
    let mut out = vec![vec![0.0; m]; m];
    for a in 0..m {
        for b in 0..m {
            out[a][b] = if a == b { 1.0 } else { cov[a][b] / (cov[a][a] * cov[b][b]).sqrt() };
        }
    }
    out
}

/// Pearson correlation with its large-sample standard error
/// `(1 - r²)/√(N - 1)`.
pub fn pearson(x: &[f64], y: &[f64]) -> (f64, f64) {
    let rows: Vec<Vec<f64>> = x.iter().zip(y).map(|(a, b)| vec![*a, *b]).collect();
    let (_, cov) = mean_and_covariance(&rows);
    let r = cov[0][1] / (cov[0][0] * cov[1][1]).sqrt();
    (r, (1.0 - r * r) / ((x.len() as f64 - 1.0).max(1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_eq!(normal_cdf(40.0), 1.0);
        assert_eq!(normal_cdf(-40.0), 0.0);
        // mpmath, 30 digits
        assert!((normal_cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-15);
        assert!((normal_cdf(-3.0) - 1.349_898_031_630_094_5e-3).abs() < 1e-17);
        assert!((normal_cdf(-1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
    }

    #[test]
    fn ks_point_mass_at_median() {
        let s = vec![0.0; 17];
        assert_eq!(ks_statistic(&s, normal_cdf), 0.5);
    }

    #[test]
    fn ks_two_sample_basics() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        assert_eq!(ks_two_sample(&a, &[10.0, 11.0]), 1.0);
        assert!((ks_two_sample(&[1.0, 2.0], &[1.5, 2.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn moments() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&v), 2.5);
        assert!((variance(&v) - 5.0 / 3.0).abs() < 1e-15);
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]];
        let (m, c) = mean_and_covariance(&rows);
        assert_eq!(m, vec![2.0, 4.0]);
        assert!((correlation(&c)[0][1] - 1.0).abs() < 1e-15);
    }
}
