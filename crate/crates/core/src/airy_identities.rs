//! Closed forms of `∫_x^∞` for five quadratic Airy integrands, their
//! quadrature oracles, and the two-parameter family `u_α(x) = Ai(αx)`
//! from which they follow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::{graded_breakpoints, integrate_panels};
use crate::special_functions::airy;

/// Upper limit standing in for `+∞` in the oracles; the integrands are below
/// `e^{-160}` there.
pub const ORACLE_UPPER_LIMIT: f64 = 40.0;
pub const ORACLE_TOLERANCE: f64 = 1e-10;
pub const CLOSED_FORM_RANGE: f64 = 20.0;

/// Integrand of `∫_x^∞ (...) dy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AiryIntegralKind {
    /// `Ai²`
    Ai2,
    /// `y Ai²`
    YAi2,
    /// `Ai'²`
    Aip2,
    /// `y² Ai²`
    Y2Ai2,
    /// `y Ai'²`
    YAip2,
}

impl AiryIntegralKind {
    pub const ALL: [AiryIntegralKind; 5] = [Self::Ai2, Self::YAi2, Self::Aip2, Self::Y2Ai2, Self::YAip2];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ai2 => "Ai2",
            Self::YAi2 => "YAi2",
            Self::Aip2 => "Aip2",
            Self::Y2Ai2 => "Y2Ai2",
            Self::YAip2 => "YAip2",
        }
    }

    pub fn integrand(self, y: f64) -> f64 {
        let a = airy(y);
        match self {
            Self::Ai2 => a.ai * a.ai,
            Self::YAi2 => y * a.ai * a.ai,
            Self::Aip2 => a.ai_prime * a.ai_prime,
            Self::Y2Ai2 => y * y * a.ai * a.ai,
            Self::YAip2 => y * a.ai_prime * a.ai_prime,
        }
    }
}

/// Rational prefactors of the closed forms. Only the defaults are correct;
/// other values exist so that the verification suite can be shown to fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefactors {
    pub third: f64,
    pub fifth: f64,
    pub three_halves: f64,
}

impl Default for Prefactors {
    fn default() -> Self {
        Self {
            third: 1.0 / 3.0,
            fifth: 0.2,
            three_halves: 1.5,
        }
    }
}

/// Closed form of `∫_x^∞` of the integrand, for `|x| <= 20`.
pub fn airy_integral_closed(kind: AiryIntegralKind, x: f64) -> Result<f64> {
    airy_integral_closed_with(kind, x, &Prefactors::default())
}

pub fn airy_integral_closed_with(kind: AiryIntegralKind, x: f64, c: &Prefactors) -> Result<f64> {
    if !(x.abs() <= CLOSED_FORM_RANGE) {
        return domain(format!("closed forms are evaluated for |x| <= {CLOSED_FORM_RANGE}, got {x}"));
    }
    let a = airy(x);
    let (ai2, aip2, aiaip) = (a.ai * a.ai, a.ai_prime * a.ai_prime, a.ai * a.ai_prime);
    let x2 = x * x;
    Ok(match kind {
        AiryIntegralKind::Ai2 => aip2 - x * ai2,
        AiryIntegralKind::YAi2 => c.third * (x * aip2 - x2 * ai2 - aiaip),
        AiryIntegralKind::Aip2 => c.third * (x2 * ai2 - x * aip2 - 2.0 * aiaip),
        AiryIntegralKind::Y2Ai2 => c.fifth * (x2 * aip2 - x2 * x * ai2 - 2.0 * x * aiaip + ai2),
        AiryIntegralKind::YAip2 => c.fifth * (x2 * x * ai2 - x2 * aip2 - 3.0 * x * aiaip + c.three_halves * ai2),
    })
}

// Panels of at most a quarter of the local Airy wavelength 2π/√|y| on the
// oscillatory side, unit width on the decaying side.
fn airy_breakpoints(a: f64, b: f64, scale: f64) -> Vec<f64> {
    graded_breakpoints(a, b, |y| {
        let w = if y < 0.0 { 0.5 * PI / (scale * y.abs().sqrt()) } else { 1.0 };
        w.min(1.0)
    })
}

/// Adaptive quadrature of the integrand on `[x, 40]`, tolerance `1e-10`.
pub fn airy_integral_oracle(kind: AiryIntegralKind, x: f64) -> Result<f64> {
    if !(x.abs() <= CLOSED_FORM_RANGE) {
        return domain(format!("oracle is evaluated for |x| <= {CLOSED_FORM_RANGE}, got {x}"));
    }
    let bp = airy_breakpoints(x, ORACLE_UPPER_LIMIT, 1.0);
    integrate_panels(|y| kind.integrand(y), &bp, ORACLE_TOLERANCE, 100_000)
}

/// `∫_a^∞ x u_α(x) u_β(x) dx = (u_α(a)u_β'(a) - u_α'(a)u_β(a))/(α³ - β³)`
/// with `u_α(x) = Ai(αx)`.
pub fn ualpha_cross_integral(a: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return domain("alpha and beta must be positive");
    }
    if alpha == beta {
        return domain("alpha and beta must differ");
    }
    // The formula is symmetric; a fixed order makes the swap exact in floating point.
    let (alpha, beta) = if alpha >= beta { (alpha, beta) } else { (beta, alpha) };
    let (ua, ub) = (airy(alpha * a), airy(beta * a));
    let num = ua.ai * beta * ub.ai_prime - alpha * ua.ai_prime * ub.ai;
    Ok(num / (alpha.powi(3) - beta.powi(3)))
}

/// Quadrature of `x Ai(αx) Ai(βx)` on `[a, 40]`.
pub fn ualpha_cross_oracle(a: f64, alpha: f64, beta: f64) -> Result<f64> {
    let scale = alpha.max(beta).powf(1.5);
    let bp = airy_breakpoints(a, ORACLE_UPPER_LIMIT, scale);
    integrate_panels(|x| x * airy(alpha * x).ai * airy(beta * x).ai, &bp, ORACLE_TOLERANCE, 100_000)
}

/// `∫_s^∞ (Ai'² - u Ai²) du = ⅔(s²Ai² - sAi'²) - ⅓ Ai Ai'`, the expected
/// number of Airy-process points above `s`.
pub fn airy_edge_count(s: f64) -> f64 {
    let a = airy(s);
    2.0 / 3.0 * (s * s * a.ai * a.ai - s * a.ai_prime * a.ai_prime) - a.ai * a.ai_prime / 3.0
}

/// One row of the identity verification table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub kind: AiryIntegralKind,
    pub x: f64,
    pub closed: f64,
    pub oracle: f64,
    pub residual: f64,
}

/// Closed form against oracle for every kind on `grid`.
pub fn identity_residuals(grid: &[f64], prefactors: &Prefactors) -> Result<Vec<IdentityResidual>> {
    let mut out = Vec::with_capacity(grid.len() * 5);
    for kind in AiryIntegralKind::ALL {
        for &x in grid {
            let closed = airy_integral_closed_with(kind, x, prefactors)?;
            let oracle = airy_integral_oracle(kind, x)?;
            out.push(IdentityResidual {
                kind,
                x,
                closed,
                oracle,
                residual: (closed - oracle).abs(),
            });
        }
    }
    Ok(out)
}

/// `lo, lo + step, ..., hi` (inclusive up to rounding).
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| lo + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_identity_at_origin() {
        let v = airy_integral_closed(AiryIntegralKind::Ai2, 0.0).unwrap();
        // Ai'(0)² from the 24-digit value of Ai'(0)
        assert!((v - 0.258_819_403_792_806_8f64.powi(2)).abs() < 1e-15);
        assert!((v - 0.066_988).abs() < 1e-6);
    }

    #[test]
    fn second_identity_at_origin_is_positive() {
        let v = airy_integral_oracle(AiryIntegralKind::YAi2, 0.0).unwrap();
        let a = airy(0.0);
        assert!(v > 0.0);
        assert!((v + a.ai * a.ai_prime / 3.0).abs() < 1e-10);
    }

    #[test]
    fn far_right_is_negligible() {
        for k in AiryIntegralKind::ALL {
            assert!(airy_integral_closed(k, 15.0).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn closed_matches_oracle_on_sample_points() {
        for k in AiryIntegralKind::ALL {
            for &x in &[-5.0, -2.0, 0.0, 1.0, 3.0] {
                let c = airy_integral_closed(k, x).unwrap();
                let o = airy_integral_oracle(k, x).unwrap();
                assert!((c - o).abs() <= 1e-8, "{k:?} at {x}: {c} vs {o}");
            }
        }
    }

    #[test]
    fn derivative_is_minus_integrand() {
        let h = 1e-4;
        for k in AiryIntegralKind::ALL {
            for &x in &[-3.7, -1.0, 0.5, 2.0] {
                let d = (airy_integral_closed(k, x + h).unwrap() - airy_integral_closed(k, x - h).unwrap()) / (2.0 * h);
                assert!((d + k.integrand(x)).abs() <= 1e-6, "{k:?} at {x}");
            }
        }
    }

    #[test]
    fn cross_integral() {
        let v = ualpha_cross_integral(0.0, 1.01, 0.99).unwrap();
        let lim = airy_integral_closed(AiryIntegralKind::YAi2, 0.0).unwrap();
        assert!((v - lim).abs() <= 1e-4);
        assert_eq!(ualpha_cross_integral(0.3, 1.2, 0.7).unwrap(), ualpha_cross_integral(0.3, 0.7, 1.2).unwrap());
        for &(a, al, be) in &[(0.0, 1.01, 0.99), (-2.0, 1.3, 0.8), (1.0, 2.0, 0.5)] {
            let c = ualpha_cross_integral(a, al, be).unwrap();
            let o = ualpha_cross_oracle(a, al, be).unwrap();
            assert!((c - o).abs() <= 1e-8, "({a}, {al}, {be}): {c} vs {o}");
        }
        assert!(ualpha_cross_integral(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn edge_count_is_sum_of_two_identities() {
        for &s in &[-6.0, -1.0, 0.0, 2.0] {
            let want = airy_integral_closed(AiryIntegralKind::Aip2, s).unwrap()
                - airy_integral_closed(AiryIntegralKind::YAi2, s).unwrap();
            assert!((airy_edge_count(s) - want).abs() < 1e-14 * want.abs().max(1.0));
        }
    }
}
