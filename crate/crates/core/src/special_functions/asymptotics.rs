use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::airy::airy;
use crate::error::{Error, Result};

/// Default half-width of the transition zones around `x = ±1`.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Asymptotic regime of `h_n(√(2n) x) e^{-n x²}` for `x >= 0`.
///
/// The ranges are `[0, 1-δ)`, `[1-δ, 1)`, `[1, 1+δ)` and `[1+δ, ∞)`.
/// The bulk regime also accepts negative `x` with `|x| < 1-δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HermiteRegime {
    Bulk,
    EdgeInside,
    EdgeOutside,
    FarOutside,
}

impl HermiteRegime {
    /// Regime containing `|x|`.
    pub fn classify(x: f64, delta: f64) -> Self {
        let x = x.abs();
        if x < 1.0 - delta {
            Self::Bulk
        } else if x < 1.0 {
            Self::EdgeInside
        } else if x < 1.0 + delta {
            Self::EdgeOutside
        } else {
            Self::FarOutside
        }
    }

    pub fn contains(self, x: f64, delta: f64) -> bool {
        match self {
            Self::Bulk => x.abs() < 1.0 - delta,
            _ => x >= 0.0 && Self::classify(x, delta) == self,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bulk => "bulk",
            Self::EdgeInside => "edge-inside",
            Self::EdgeOutside => "edge-outside",
            Self::FarOutside => "far-outside",
        }
    }
}

// s - sin s and sinh s - s for small s, where the direct forms cancel.
fn s_minus_sin(s: f64) -> f64 {
    if s > 0.3 {
        return s - s.sin();
    }
    let s2 = s * s;
    let mut term = s * s2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= -s2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

fn sinh_minus_s(s: f64) -> f64 {
    if s > 0.3 {
        return s.sinh() - s;
    }
    let s2 = s * s;
    let mut term = s * s2 / 6.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-18 * sum.abs() {
        term *= s2 / ((k + 1.0) * (k + 2.0));
        sum += term;
        k += 2.0;
    }
    sum
}

/// `F(x) = |∫_x^1 √|1-y²| dy|`.
///
/// On `[-1, 1]` this is `½(arccos x - x√(1-x²))`; for `x > 1` it is
/// `½(x√(x²-1) - arccosh x)`, and for `x < -1` the quarter-disc area `π/2`
/// plus the same outside integral over `[x, -1]`.
pub fn edge_phase(x: f64) -> f64 {
    if x > 1.0 {
        // x = cosh τ:  ½(cosh τ sinh τ - τ) = ¼(sinh 2τ - 2τ)
        let tau = 2.0 * ((x - 1.0) / 2.0).sqrt().asinh();
        0.25 * sinh_minus_s(2.0 * tau)
    } else if x >= -1.0 {
        // x = cos θ:  ½(θ - sin θ cos θ) = ¼(2θ - sin 2θ)
        let theta = 2.0 * ((1.0 - x) / 2.0).sqrt().asin();
        0.25 * s_minus_sin(2.0 * theta)
    } else {
        FRAC_PI_2 + edge_phase(-x)
    }
}

/// `Φ(x) = ∓(3n F(x))^{2/3}`, negative for `x <= 1` and positive beyond.
pub fn edge_turning(n: usize, x: f64) -> f64 {
    let v = (3.0 * n as f64 * edge_phase(x)).powf(2.0 / 3.0);
    if x <= 1.0 {
        -v
    } else {
        v
    }
}

/// `Φ'(x) = 2n √|1-x²| (3n F(x))^{-1/3}`, with the limit `2 n^{2/3}` at `x = 1`.
pub fn edge_turning_derivative(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    if (x - 1.0).abs() < 1e-9 {
        return 2.0 * nf.powf(2.0 / 3.0);
    }
    2.0 * nf * (1.0 - x * x).abs().sqrt() / (3.0 * nf * edge_phase(x)).cbrt()
}

/// `γ'(x)/γ(x)` for `γ = ((x-1)/(x+1))^{1/4}`, i.e. `¼(1/(x-1) - 1/(x+1))`.
///
/// The complex branch of `γ` only enters through this real combination.
pub fn edge_log_derivative_gamma(x: f64) -> f64 {
    0.25 * (1.0 / (x - 1.0) - 1.0 / (x + 1.0))
}

fn mismatch(regime: HermiteRegime, x: f64, delta: f64) -> Error {
    Error::RegimeMismatch {
        regime: regime.name(),
        x,
        delta,
    }
}

/// Leading-order value of `h_n(√(2n) x) e^{-n x²}` in the given regime.
///
/// For [`HermiteRegime::FarOutside`] the returned number is the magnitude
/// bound `n^{-1/4} e^{-n F(x)}` with unit constant, not a value.
pub fn hermite_asymptotic(n: usize, x: f64, regime: HermiteRegime, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("asymptotic regimes need n >= 1".into()));
    }
    if !regime.contains(x, delta) {
        return Err(mismatch(regime, x, delta));
    }
    let nf = n as f64;
    let f = edge_phase(x);
    let v = match regime {
        HermiteRegime::Bulk => {
            let amp = (2.0 / (PI * (2.0 * nf).sqrt())).sqrt() / (1.0 - x * x).powf(0.25);
            amp * (2.0 * nf * f - 0.5 * x.asin()).cos()
        }
        HermiteRegime::EdgeInside | HermiteRegime::EdgeOutside => {
            let pre = (2.0 * nf).powf(-0.25);
            if (x - 1.0).abs() < 1e-12 {
                let a = airy(0.0);
                let c = nf.powf(1.0 / 6.0);
                pre * (std::f64::consts::SQRT_2 * c * a.ai - a.ai_prime / (std::f64::consts::SQRT_2 * c))
            } else {
                let s = 3.0 * nf * f;
                let arg = s.powf(2.0 / 3.0);
                let (ratio, arg) = if regime == HermiteRegime::EdgeInside {
                    ((1.0 + x) / (1.0 - x), -arg)
                } else {
                    ((x + 1.0) / (x - 1.0), arg)
                };
                let a = airy(arg);
                pre * (ratio.powf(0.25) * s.powf(1.0 / 6.0) * a.ai
                    - ratio.powf(-0.25) * s.powf(-1.0 / 6.0) * a.ai_prime)
            }
        }
        HermiteRegime::FarOutside => nf.powf(-0.25) * (-nf * f).exp(),
    };
    Ok(v)
}

/// Which asymptotic expansion of the scaled density to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityMode {
    Bulk,
    Edge,
}

fn edge_first_coefficient(n: usize, x: f64) -> f64 {
    let phi = edge_turning(n, x);
    edge_turning_derivative(n, x) / (4.0 * phi) - edge_log_derivative_gamma(x)
}

/// Asymptotic scaled eigenvalue density `n ρ_n(x)`, where `x` is measured in
/// units of `√(2n)` and `∫ n ρ_n = n`.
///
/// * `Bulk` (`|x| <= 1-δ`): semicircle plus the leading oscillatory correction
///   `(1/4π)(1/(x-1) - 1/(x+1)) cos(4n F(x))`.
/// * `Edge` (`0 <= x <= 1+δ`): the Airy form
///   `(Φ'/4Φ - γ'/γ)·2 Ai Ai' + Φ'(Ai'² - Φ Ai²)` evaluated at `Φ(x)`.
pub fn density_asymptotic(n: usize, x: f64, mode: DensityMode, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("density needs n >= 1".into()));
    }
    let nf = n as f64;
    match mode {
        DensityMode::Bulk => {
            if x.abs() > 1.0 - delta {
                return Err(mismatch(HermiteRegime::Bulk, x, delta));
            }
            let lead = nf * 2.0 / PI * (1.0 - x * x).sqrt();
            // Counting phase 2π·n·G̃(x) = 4nF(x), checked against the exact kernel.
            let phase = 4.0 * nf * edge_phase(x);
            let corr = (1.0 / (x - 1.0) - 1.0 / (x + 1.0)) / (4.0 * PI) * phase.cos();
            Ok(lead + corr)
        }
        DensityMode::Edge => {
            if !(0.0..=1.0 + delta).contains(&x) {
                return Err(Error::RegimeMismatch {
                    regime: "edge-density",
                    x,
                    delta,
                });
            }
            let phi = edge_turning(n, x);
            let dphi = edge_turning_derivative(n, x);
            let a = airy(phi);
            // The two singular parts of the first coefficient cancel at x = 1.
            let h = 1e-6;
            let c = if (x - 1.0).abs() < h {
                0.5 * (edge_first_coefficient(n, 1.0 - h) + edge_first_coefficient(n, 1.0 + h))
            } else {
                edge_first_coefficient(n, x)
            };
            Ok(c * 2.0 * a.ai * a.ai_prime
                + dphi * (a.ai_prime * a.ai_prime - phi * a.ai * a.ai))
        }
    }
}
