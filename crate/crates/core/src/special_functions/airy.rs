use std::f64::consts::{FRAC_PI_4, PI};

use super::ddouble::DD;

/// Inside `|x| <= AIRY_SERIES_LIMIT` the Maclaurin series is summed in
/// double-double arithmetic; outside it the asymptotic expansions are used.
pub const AIRY_SERIES_LIMIT: f64 = 8.0;

// Ai(0) and -Ai'(0) as double-doubles.
const AI0: DD = DD::new(0.355_028_053_887_817_2, 2.052_336_324_362_12e-17);
const MINUS_AIP0: DD = DD::new(0.258_819_403_792_806_8, -2.522_243_111_610_832e-17);

/// Value of the Airy function and its derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub ai_prime: f64,
}

/// `Ai(x)` and `Ai'(x)`.
pub fn airy(x: f64) -> AiryPair {
    if x.is_nan() {
        return AiryPair {
            ai: f64::NAN,
            ai_prime: f64::NAN,
        };
    }
    if x.abs() <= AIRY_SERIES_LIMIT {
        maclaurin(x)
    } else if x > 0.0 {
        asymptotic_positive(x)
    } else {
        asymptotic_negative(-x)
    }
}

/// Leading oscillatory approximation on the negative axis,
/// `Ai(-r) ≈ π^{-1/2} r^{-1/4} cos(⅔ r^{3/2} - π/4)` and
/// `Ai'(-r) ≈ π^{-1/2} r^{1/4} sin(⅔ r^{3/2} - π/4)`, for `r > 0`.
pub fn airy_leading_oscillatory(r: f64) -> AiryPair {
    let phase = 2.0 / 3.0 * r.powf(1.5) - FRAC_PI_4;
    let amp = 1.0 / PI.sqrt();
    AiryPair {
        ai: amp * r.powf(-0.25) * phase.cos(),
        ai_prime: amp * r.powf(0.25) * phase.sin(),
    }
}

// Ai = c1 f - c2 g with
//   f  = Σ x^{3k} / [(2·3)(5·6)···((3k-1)·3k)]
//   g  = Σ x^{3k+1} / [(3·4)(6·7)···(3k·(3k+1))]
// and the term-wise derivatives f', g'.
fn maclaurin(x: f64) -> AiryPair {
    let xd = DD::from_f64(x);
    let x3 = xd * xd * xd;

    let mut tf = DD::from_f64(1.0);
    let mut tg = xd;
    let mut tfp = (xd * xd).div_f64(2.0);
    let mut tgp = DD::from_f64(1.0);

    let mut f = tf;
    let mut g = tg;
    let mut fp = tfp;
    let mut gp = tgp;

    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf = (tf * x3).div_f64((k3 - 1.0) * k3);
        tg = (tg * x3).div_f64(k3 * (k3 + 1.0));
        tfp = (tfp * x3).div_f64(k3 * (k3 + 2.0));
        tgp = (tgp * x3).div_f64((k3 - 2.0) * k3);
        f = f + tf;
        g = g + tg;
        fp = fp + tfp;
        gp = gp + tgp;
        let small = |t: DD, s: DD| t.abs_hi() <= 1e-34 * s.abs_hi().max(1.0);
        if small(tf, f) && small(tg, g) && small(tfp, fp) && small(tgp, gp) {
            break;
        }
    }

    let ai = AI0 * f - MINUS_AIP0 * g;
    let aip = AI0 * fp - MINUS_AIP0 * gp;
    AiryPair {
        ai: ai.to_f64(),
        ai_prime: aip.to_f64(),
    }
}

/// Coefficients u_k and v_k of the large-argument expansions, up to the point
/// where the terms start growing for the given ζ.
fn expansion_terms(zeta: f64) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    let mut uk = 1.0_f64;
    let mut prev_mag = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        uk *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let vk = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk;
        let mag = uk.abs().max(vk.abs()) / zeta.powi(k);
        if mag > prev_mag || mag < 1e-18 {
            break;
        }
        prev_mag = mag;
        u.push(uk);
        v.push(vk);
    }
    (u, v)
}

fn asymptotic_positive(x: f64) -> AiryPair {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (u, v) = expansion_terms(zeta);
    let mut su = 0.0;
    let mut sv = 0.0;
    let mut p = 1.0;
    for (k, (uk, vk)) in u.iter().zip(&v).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        su += sign * uk * p;
        sv += sign * vk * p;
        p /= zeta;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    AiryPair {
        ai: e / q * su,
        ai_prime: -e * q * sv,
    }
}

fn asymptotic_negative(r: f64) -> AiryPair {
    let zeta = 2.0 / 3.0 * r * r.sqrt();
    let (u, v) = expansion_terms(zeta);
    // Even-index terms feed the cosine (value) / sine (derivative) parts,
    // odd-index terms the other one, with alternating signs within each.
    let (mut pu, mut qu, mut pv, mut qv) = (0.0, 0.0, 0.0, 0.0);
    let mut p = 1.0;
    for (k, (uk, vk)) in u.iter().zip(&v).enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += sign * uk * p;
            pv += sign * vk * p;
        } else {
            qu += sign * uk * p;
            qv += sign * vk * p;
        }
        p /= zeta;
    }
    let phase = zeta - FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    let amp = 1.0 / PI.sqrt();
    let q = r.powf(0.25);
    AiryPair {
        ai: amp / q * (c * pu + s * qu),
        ai_prime: amp * q * (s * pv - c * qv),
    }
}
