//! The Hermite projection kernel
//! `K_n(x, y) = Σ_{i<n} φ_i(x) φ_i(y)` and the counting statistics it
//! generates.
//!
//! Counting variances use the overlap matrix `M_kl = ∫_I φ_k φ_l` of the
//! first `n` Hermite functions: `∬_{I×J} K_n² = ⟨M(I), M(J)⟩_F`, and
//! `∬_{I×I^c} K_n² = Tr M(I) - ‖M(I)‖²_F`. Off-diagonal overlaps are exact
//! from the Wronskian identity
//! `(φ_k'φ_l - φ_k φ_l')' = 2(l-k) φ_k φ_l`; only the diagonal `M_kk` needs
//! quadrature. [`number_variance_direct`] integrates `K_n²` over `I × I^c`
//! on a tensor grid and serves as an independent check for small `n`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::airy_identities::airy_edge_count;
use crate::error::{domain, Error, Result};
use crate::quadrature::{graded_breakpoints, integrate_panels, pairwise_sum, PanelNodes};
use crate::semicircle::semicircle_quantile;
use crate::special_functions::{edge_turning, HermiteTable};

pub const DEFAULT_SINGLE_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_DOUBLE_TOLERANCE: f64 = 1e-6;
/// Largest `n` accepted by the `O(n)`-per-node brute-force integrals.
pub const BRUTE_FORCE_MAX_N: usize = 200;

// Panels span this fraction of the local half wavelength π/ω.
const PANEL_FRACTION: f64 = 1.0;
const PANELS_PER_CHUNK: usize = 32;

/// Dimension `n`, truncation radius and tolerances for kernel integrals.
#[derive(Debug, Clone)]
pub struct KernelContext {
    n: usize,
    truncation_radius: f64,
    quadrature_tolerance: f64,
    double_tolerance: f64,
    table: HermiteTable,
}

impl KernelContext {
    /// Defaults: radius `1.5√(2n) + 5`, tolerances `1e-8` (single
    /// integrals) and `1e-6` (double integrals).
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("kernel needs n >= 1");
        }
        Ok(Self {
            n,
            truncation_radius: 1.5 * (2.0 * n as f64).sqrt() + 5.0,
            quadrature_tolerance: DEFAULT_SINGLE_TOLERANCE,
            double_tolerance: DEFAULT_DOUBLE_TOLERANCE,
            table: HermiteTable::new(n + 1),
        })
    }

    pub fn with_truncation_radius(mut self, r: f64) -> Result<Self> {
        let min = 1.5 * (2.0 * self.n as f64).sqrt();
        if !(r >= min) {
            return domain(format!("truncation radius {r} below 1.5·√(2n) = {min}"));
        }
        self.truncation_radius = r;
        Ok(self)
    }

    pub fn with_tolerance(mut self, single: f64, double: f64) -> Result<Self> {
        if !(single > 0.0 && double > 0.0) {
            return domain("tolerances must be positive");
        }
        self.quadrature_tolerance = single;
        self.double_tolerance = double;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    pub fn quadrature_tolerance(&self) -> f64 {
        self.quadrature_tolerance
    }

    pub fn double_tolerance(&self) -> f64 {
        self.double_tolerance
    }

    /// Local angular frequency of `φ_n`, floored near and beyond the turning
    /// point `√(2n+1)` at the Airy scale.
    pub fn omega(&self, x: f64) -> f64 {
        let two_n = 2.0 * self.n as f64;
        (two_n + 1.0 - x * x).max(two_n.cbrt()).sqrt()
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        graded_breakpoints(a, b, |x| PANEL_FRACTION * PI / self.omega(x))
    }

    fn panel_budget(&self, a: f64, b: f64) -> usize {
        64 * self.breakpoints(a, b).len() + 10_000
    }

    /// `[φ_{n-1}(x), φ_n(x), φ_{n+1}(x)]`.
    pub fn edge_functions(&self, x: f64) -> [f64; 3] {
        self.table.triple(self.n, x)
    }

    /// `K_n(x, x) = n φ_n² - √(n(n+1)) φ_{n-1} φ_{n+1}`.
    pub fn diagonal(&self, x: f64) -> f64 {
        let nf = self.n as f64;
        let [pm, p, pp] = self.edge_functions(x);
        nf * p * p - (nf * (nf + 1.0)).sqrt() * pm * pp
    }

    /// Scaled density `n ρ_n(x) = √(2n) K_n(√(2n) x, √(2n) x)`.
    pub fn scaled_density(&self, x: f64) -> f64 {
        let s = (2.0 * self.n as f64).sqrt();
        s * self.diagonal(s * x)
    }

    /// Arguments closer than this use the diagonal at the midpoint.
    pub fn cd_switch_distance(&self) -> f64 {
        1e-5 / (2.0 * self.n as f64).sqrt()
    }
}

/// `K_n(x, y)` by the Christoffel–Darboux quotient
/// `√(n/2)(φ_n(x)φ_{n-1}(y) - φ_n(y)φ_{n-1}(x))/(x - y)`.
///
/// For `|x - y|` below [`KernelContext::cd_switch_distance`] the quotient
/// cancels badly; `K_n` is even in `x - y` about the midpoint, so the
/// midpoint diagonal is accurate to second order there. Arguments are put
/// in a fixed order first, so the result is exactly symmetric.
pub fn kernel_eval(ctx: &KernelContext, x: f64, y: f64) -> f64 {
    let (x, y) = if x >= y { (x, y) } else { (y, x) };
    if x - y < ctx.cd_switch_distance() {
        return ctx.diagonal(0.5 * (x + y));
    }
    let [xm, xn, _] = ctx.edge_functions(x);
    let [ym, yn, _] = ctx.edge_functions(y);
    (ctx.n as f64 / 2.0).sqrt() * (xn * ym - yn * xm) / (x - y)
}

/// `K_n(x, y)` as the plain sum `Σ_{i<n} φ_i(x)φ_i(y)`.
pub fn kernel_sum(n: usize, x: f64, y: f64) -> f64 {
    let t = HermiteTable::new(n + 1);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    t.fill(x, &mut a);
    t.fill(y, &mut b);
    a.iter().zip(&b).map(|(u, v)| u * v).sum()
}

/// Closed, possibly half-infinite interval `[lo, hi]`; `lo == hi` is empty.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return domain(format!("invalid interval [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    pub fn above(a: f64) -> Self {
        Self { lo: a, hi: f64::INFINITY }
    }

    pub fn below(b: f64) -> Self {
        Self { lo: f64::NEG_INFINITY, hi: b }
    }

    pub fn full() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    /// Intersection with `[-r, r]`.
    pub fn clip(&self, r: f64) -> (f64, f64) {
        (self.lo.max(-r), self.hi.min(r))
    }
}

/// Disjoint intervals with weights, the linear statistic `Σ α_j #I_j`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightedIntervals {
    pub intervals: Vec<Interval>,
    pub alphas: Vec<f64>,
}

impl WeightedIntervals {
    pub fn new(intervals: Vec<Interval>, alphas: Vec<f64>) -> Result<Self> {
        if intervals.len() != alphas.len() {
            return domain("one weight per interval");
        }
        let mut sorted: Vec<&Interval> = intervals.iter().filter(|i| !i.is_empty()).collect();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        if sorted.windows(2).any(|w| w[1].lo < w[0].hi) {
            return domain("intervals must be pairwise disjoint");
        }
        Ok(Self { intervals, alphas })
    }
}

/// `E[#I] = ∫_I K_n(x, x) dx`.
pub fn expected_count(ctx: &KernelContext, interval: Interval) -> Result<f64> {
    let (a, b) = interval.clip(ctx.truncation_radius);
    if a >= b {
        return Ok(0.0);
    }
    integrate_panels(
        |x| ctx.diagonal(x),
        &ctx.breakpoints(a, b),
        ctx.quadrature_tolerance,
        ctx.panel_budget(a, b),
    )
}

/// The point `x` with `E[#[x, ∞)] = count`, for `0 < count < n`.
///
/// Safeguarded Newton on the expected count, whose derivative is `-K_n(x, x)`.
pub fn count_quantile(ctx: &KernelContext, count: f64) -> Result<f64> {
    let nf = ctx.n as f64;
    if !(count > 0.0 && count < nf) {
        return domain(format!("count {count} outside (0, {nf})"));
    }
    let r = ctx.truncation_radius;
    let (mut lo, mut hi) = (-r, r);
    let mut x = (2.0 * nf).sqrt() * semicircle_quantile(1.0 - count / nf)?;
    for _ in 0..100 {
        let f = expected_count(ctx, Interval::above(x))? - count;
        if f.abs() <= 1e-9 {
            return Ok(x);
        }
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = ctx.diagonal(x);
        let newton = x + f / d;
        x = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-13 * r {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Expected number of eigenvalues in `[√(2n) t, ∞)` three ways.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EdgeCount {
    pub t: f64,
    /// Quadrature of the exact kernel diagonal.
    pub quadrature: f64,
    /// `(4√2/3π) n (1-t)^{3/2}`.
    pub leading: f64,
    /// `⅔(Φ²Ai² - ΦAi'²) - ⅓AiAi'` at `Φ = Φ(t)`.
    pub airy: f64,
}

impl EdgeCount {
    pub fn minus_leading(&self) -> f64 {
        self.quadrature - self.leading
    }

    pub fn minus_airy(&self) -> f64 {
        self.quadrature - self.airy
    }
}

pub fn edge_expected_count(ctx: &KernelContext, t: f64) -> Result<EdgeCount> {
    if !(0.5..1.0).contains(&t) {
        return domain(format!("edge count needs 0.5 <= t < 1, got {t}"));
    }
    let nf = ctx.n as f64;
    let quadrature = expected_count(ctx, Interval::above((2.0 * nf).sqrt() * t))?;
    Ok(EdgeCount {
        t,
        quadrature,
        leading: 4.0 * 2f64.sqrt() / (3.0 * PI) * nf * (1.0 - t).powf(1.5),
        airy: airy_edge_count(edge_turning(ctx.n, t)),
    })
}

// φ_k and φ_k' (k < n) at a finite endpoint.
struct Endpoint {
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

impl Endpoint {
    fn at(ctx: &KernelContext, a: f64) -> Self {
        let n = ctx.n;
        let mut all = vec![0.0; n + 1];
        ctx.table.fill(a, &mut all);
        let dphi = (0..n)
            .map(|k| {
                let down = if k == 0 { 0.0 } else { (k as f64 / 2.0).sqrt() * all[k - 1] };
                down - ((k as f64 + 1.0) / 2.0).sqrt() * all[k + 1]
            })
            .collect();
        all.truncate(n);
        Self { phi: all, dphi }
    }

    // ∫_a^∞ φ_k φ_l for k != l.
    fn tail(&self, k: usize, l: usize) -> f64 {
        (self.dphi[k] * self.phi[l] - self.phi[k] * self.dphi[l]) / (2.0 * (k as f64 - l as f64))
    }
}

/// Overlap matrix `M_kl = ∫_I φ_k φ_l`, `k, l < n`, in factored form.
struct Overlaps {
    diag: Vec<f64>,
    lo: Option<Endpoint>,
    hi: Option<Endpoint>,
}

impl Overlaps {
    fn new(ctx: &KernelContext, interval: Interval) -> Result<Self> {
        let r = ctx.truncation_radius;
        let (a, b) = interval.clip(r);
        let finite = |v: f64| v > -r && v < r;
        Ok(Self {
            diag: diagonal_overlaps(ctx, a, b)?,
            lo: finite(a).then(|| Endpoint::at(ctx, a)),
            hi: finite(b).then(|| Endpoint::at(ctx, b)),
        })
    }

    fn off(&self, k: usize, l: usize) -> f64 {
        self.lo.as_ref().map_or(0.0, |e| e.tail(k, l)) - self.hi.as_ref().map_or(0.0, |e| e.tail(k, l))
    }

    fn trace(&self) -> f64 {
        pairwise_sum(&self.diag)
    }
}

/// `∫_a^b φ_k²` for `k < n` on a fixed Gauss–Kronrod panel grid, halving
/// the panels until the embedded Gauss rule agrees.
fn diagonal_overlaps(ctx: &KernelContext, a: f64, b: f64) -> Result<Vec<f64>> {
    let n = ctx.n;
    if a >= b {
        return Ok(vec![0.0; n]);
    }
    let mut bp = ctx.breakpoints(a, b);
    let tol = ctx.quadrature_tolerance;
    let mut err = f64::INFINITY;
    for _ in 0..4 {
        let nodes = PanelNodes::from_breakpoints(&bp);
        let per_chunk = 21 * PANELS_PER_CHUNK;
        let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..nodes.len())
            .step_by(per_chunk)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&start| {
                let mut k_acc = vec![0.0; n];
                let mut g_acc = vec![0.0; n];
                let mut buf = vec![0.0; n];
                for i in start..(start + per_chunk).min(nodes.len()) {
                    ctx.table.fill(nodes.x[i], &mut buf);
                    let (wk, wg) = (nodes.w_kronrod[i], nodes.w_gauss[i]);
                    for k in 0..n {
                        let v = buf[k] * buf[k];
                        k_acc[k] += wk * v;
                        g_acc[k] += wg * v;
                    }
                }
                (k_acc, g_acc)
            })
            .collect();
        let mut diag = vec![0.0; n];
        err = 0.0;
        for k in 0..n {
            let kv: Vec<f64> = chunks.iter().map(|c| c.0[k]).collect();
            let gv: Vec<f64> = chunks.iter().map(|c| c.1[k]).collect();
            diag[k] = pairwise_sum(&kv);
            err += (diag[k] - pairwise_sum(&gv)).abs();
        }
        if err <= tol {
            return Ok(diag);
        }
        bp = refine(&bp);
    }
    Err(Error::QuadratureFailure {
        a,
        b,
        error: err,
        tolerance: tol,
        panels: bp.len() - 1,
    })
}

fn refine(bp: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * bp.len());
    for w in bp.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*bp.last().unwrap());
    out
}

// Traces Tr M_i and Gram matrix ⟨M_i, M_j⟩_F.
fn gram(ctx: &KernelContext, intervals: &[Interval]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = ctx.n;
    let m = intervals.len();
    let ov: Vec<Overlaps> = intervals.iter().map(|&i| Overlaps::new(ctx, i)).collect::<Result<_>>()?;
    let traces = ov.iter().map(Overlaps::trace).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = vec![0.0; m * m];
            let mut vals = vec![0.0; m];
            for l in k + 1..n {
                for (v, o) in vals.iter_mut().zip(&ov) {
                    *v = o.off(k, l);
                }
                for i in 0..m {
                    for j in i..m {
                        acc[i * m + j] += 2.0 * vals[i] * vals[j];
                    }
                }
            }
            for i in 0..m {
                for j in i..m {
                    acc[i * m + j] += ov[i].diag[k] * ov[j].diag[k];
                }
            }
            acc
        })
        .collect();
    let mut s = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let col: Vec<f64> = rows.iter().map(|r| r[i * m + j]).collect();
            s[i][j] = pairwise_sum(&col);
            s[j][i] = s[i][j];
        }
    }
    Ok((traces, s))
}

/// `Var(#I) = ∬_{I × I^c} K_n(x, y)² dx dy`.
pub fn number_variance(ctx: &KernelContext, interval: Interval) -> Result<f64> {
    let r = ctx.truncation_radius;
    let (a, b) = interval.clip(r);
    if a >= b || (a <= -r && b >= r) {
        return Ok(0.0);
    }
    let (t, s) = gram(ctx, &[interval])?;
    Ok(t[0] - s[0][0])
}

/// `Var(Σ α_i #I_i) = Σ α_i² ∬_{I_i×I_i^c} K_n² - Σ_{i≠j} α_i α_j ∬_{I_i×I_j} K_n²`.
pub fn linear_statistic_variance(ctx: &KernelContext, ws: &WeightedIntervals) -> Result<f64> {
    let (t, s) = gram(ctx, &ws.intervals)?;
    let m = t.len();
    let mut terms = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let a2 = ws.alphas[i] * ws.alphas[j];
            terms.push(if i == j { a2 * (t[i] - s[i][i]) } else { -a2 * s[i][j] });
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Direct tensor-product quadrature of `K_n²` over `I × I^c` (complement
/// truncated at the radius); the embedded Gauss rule gives the error
/// estimate. Limited to `n <= 200`.
pub fn number_variance_direct(ctx: &KernelContext, interval: Interval) -> Result<f64> {
    guard_brute_force(ctx)?;
    let r = ctx.truncation_radius;
    let (a, b) = interval.clip(r);
    if a >= b {
        return Ok(0.0);
    }
    let inner = PanelNodes::from_breakpoints(&ctx.breakpoints(a, b));
    let mut outer = PanelNodes::from_breakpoints(&ctx.breakpoints(-r, a.max(-r)));
    let right = PanelNodes::from_breakpoints(&ctx.breakpoints(b.min(r), r));
    outer.x.extend(right.x);
    outer.w_kronrod.extend(right.w_kronrod);
    outer.w_gauss.extend(right.w_gauss);
    let rows: Vec<(f64, f64)> = (0..inner.len())
        .into_par_iter()
        .map(|i| {
            let x = inner.x[i];
            let vals: Vec<f64> = outer.x.iter().map(|&y| kernel_eval(ctx, x, y).powi(2)).collect();
            let k: Vec<f64> = vals.iter().zip(&outer.w_kronrod).map(|(v, w)| v * w).collect();
            let g: Vec<f64> = vals.iter().zip(&outer.w_gauss).map(|(v, w)| v * w).collect();
            (inner.w_kronrod[i] * pairwise_sum(&k), inner.w_gauss[i] * pairwise_sum(&g))
        })
        .collect();
    let kv: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let gv: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (k, g) = (pairwise_sum(&kv), pairwise_sum(&gv));
    let err = (k - g).abs();
    if err > ctx.double_tolerance {
        return Err(Error::QuadratureFailure {
            a,
            b,
            error: err,
            tolerance: ctx.double_tolerance,
            panels: inner.len() / 21,
        });
    }
    Ok(k)
}

fn guard_brute_force(ctx: &KernelContext) -> Result<()> {
    if ctx.n > BRUTE_FORCE_MAX_N {
        return domain(format!("brute-force kernel integrals are limited to n <= {BRUTE_FORCE_MAX_N}"));
    }
    Ok(())
}

/// `|∫ K_n(x, y) K_n(y, z) dy - K_n(x, z)|`; limited to `n <= 200`.
pub fn reproducing_check(ctx: &KernelContext, x: f64, z: f64) -> Result<f64> {
    guard_brute_force(ctx)?;
    let r = ctx.truncation_radius;
    let v = integrate_panels(
        |y| kernel_eval(ctx, x, y) * kernel_eval(ctx, y, z),
        &ctx.breakpoints(-r, r),
        1e-3 * ctx.quadrature_tolerance,
        ctx.panel_budget(-r, r),
    )?;
    Ok((v - kernel_eval(ctx, x, z)).abs())
}
