//! Panel quadrature: Gauss–Kronrod (10, 21) rules on caller-chosen panels,
//! locally adaptive bisection, and tensor-product node sets for double
//! integrals.
//!
//! Panels are processed in parallel but every reduction is a pairwise tree
//! over panels in index order, so results are bit-stable for a given panel
//! layout regardless of the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};

// Kronrod abscissae on [-1, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_270_749,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Sum with a balanced binary tree; the association order depends only on
/// the slice length.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        len if len <= 8 => v.iter().fold(0.0, |a, b| a + b),
        len => {
            let mid = len / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}

/// One Gauss–Kronrod 21-point panel: `(kronrod, |kronrod - gauss|)`.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64, usize) {
    let (v, e) = gk21(f, a, b);
    if e <= tol || depth == 0 || (b - a).abs() < 1e-14 * a.abs().max(b.abs()).max(1.0) {
        return (v, e, 1);
    }
    let m = 0.5 * (a + b);
    let (v1, e1, n1) = adapt(f, a, m, 0.5 * tol, depth - 1);
    let (v2, e2, n2) = adapt(f, m, b, 0.5 * tol, depth - 1);
    (v1 + v2, e1 + e2, n1 + n2)
}

/// Integrate `f` over the consecutive panels `[bp[i], bp[i+1]]`, bisecting
/// each panel until its Gauss–Kronrod error estimate is below its share of
/// `tol` (shares are proportional to panel width).
pub fn integrate_panels<F>(f: F, breakpoints: &[f64], tol: f64, max_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if breakpoints.len() < 2 {
        return Ok(0.0);
    }
    let a = breakpoints[0];
    let b = *breakpoints.last().unwrap();
    let total = (b - a).abs();
    if total == 0.0 {
        return Ok(0.0);
    }
    let results: Vec<(f64, f64, usize)> = breakpoints
        .par_windows(2)
        .map(|w| {
            let share = tol * (w[1] - w[0]).abs() / total;
            adapt(&f, w[0], w[1], share, 24)
        })
        .collect();
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let errors: Vec<f64> = results.iter().map(|r| r.1).collect();
    let panels: usize = results.iter().map(|r| r.2).sum();
    let err = pairwise_sum(&errors);
    if err > tol || panels > max_panels || !err.is_finite() {
        return Err(Error::QuadratureFailure {
            a,
            b,
            error: err,
            tolerance: tol,
            panels,
        });
    }
    Ok(pairwise_sum(&values))
}

/// Adaptive integral of `f` over `[a, b]` starting from a single panel.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let n0 = 8;
    let bp: Vec<f64> = (0..=n0).map(|i| a + (b - a) * i as f64 / n0 as f64).collect();
    integrate_panels(f, &bp, tol, max_panels)
}

/// Abscissae and weights of the 21-point Kronrod rule on a panel set, with
/// the embedded 10-point Gauss weights (zero at Kronrod-only nodes) for
/// error estimation of tensor-product integrals.
#[derive(Debug, Clone, Default)]
pub struct PanelNodes {
    pub x: Vec<f64>,
    pub w_kronrod: Vec<f64>,
    pub w_gauss: Vec<f64>,
}

impl PanelNodes {
    pub fn from_breakpoints(breakpoints: &[f64]) -> Self {
        let mut out = Self::default();
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for j in 0..10 {
                let g = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
                out.push(c - h * XGK[j], WGK[j] * h, g);
            }
            out.push(c, WGK[10] * h, 0.0);
            for j in (0..10).rev() {
                let g = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
                out.push(c + h * XGK[j], WGK[j] * h, g);
            }
        }
        out
    }

    fn push(&mut self, x: f64, wk: f64, wg: f64) {
        self.x.push(x);
        self.w_kronrod.push(wk);
        self.w_gauss.push(wg);
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Breakpoints on `[a, b]` with local panel width at most `width(x)`.
pub fn graded_breakpoints<W: Fn(f64) -> f64>(a: f64, b: f64, width: W) -> Vec<f64> {
    let mut bp = vec![a];
    if b <= a {
        return bp;
    }
    let mut x = a;
    while x < b {
        let w = width(x).max(1e-12 * (b - a));
        let next = x + w;
        if next >= b - 0.25 * w {
            break;
        }
        bp.push(next);
        x = next;
    }
    bp.push(b);
    bp
}
