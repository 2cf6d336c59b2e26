use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use gue_core::airy_identities::{grid, identity_residuals, Prefactors};
use gue_core::fluctuation_lab::{self, ExperimentConfig, IndexSpec, Mode};
use gue_core::kernel::{edge_expected_count, expected_count, number_variance, Interval, KernelContext};
use gue_core::sampler::{hermite_zeros, SamplerChoice};
use gue_core::semicircle::{
    bulk_zero_constant, gap, hermite_zero_estimate, refined_zero_constant, semicircle_cdf, semicircle_quantile,
    IndexExponents, DEFAULT_ZERO_K0,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{FileConfig, Format, DEFAULT_SEED};

const SCHEMA: u32 = 1;
const IDENTITY_TOLERANCE: f64 = 1e-8;

// 0 success, 1 a verification verdict failed, 2 usage or configuration
// error, 3 numerical failure.
const EXIT_VERDICT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

pub fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn globals(c: &FileConfig) -> FileConfig {
    FileConfig {
        seed: Some(c.seed.unwrap_or(DEFAULT_SEED)),
        out: Some(c.out.clone().unwrap_or_else(|| PathBuf::from("gue-lab-out"))),
        format: Some(c.format.unwrap_or(Format::Json)),
        threads: Some(c.threads.unwrap_or(0)),
        ..FileConfig::default()
    }
}

pub fn resolve_identities(c: FileConfig) -> Result<FileConfig, String> {
    let step = c.grid_step.unwrap_or(0.25);
    if !(step > 0.0 && step <= 8.0) {
        return Err(format!("grid_step must lie in (0, 8], got {step}"));
    }
    Ok(FileConfig { grid_step: Some(step), ..globals(&c) })
}

pub fn resolve_kernel(c: FileConfig) -> Result<FileConfig, String> {
    let n = c.n.unwrap_or(2048);
    if !(1..=4096).contains(&n) {
        return Err(format!("kernel-stats needs 1 <= n <= 4096, got {n}"));
    }
    let mut r = FileConfig { n: Some(n), ..globals(&c) };
    if c.lo.is_some() || c.hi.is_some() {
        r.lo = c.lo;
        r.hi = c.hi;
        let lo = c.lo.unwrap_or(f64::NEG_INFINITY);
        let hi = c.hi.unwrap_or(f64::INFINITY);
        Interval::new(lo, hi).map_err(|e| e.to_string())?;
    } else {
        let t = c.t.unwrap_or(0.0);
        if !t.is_finite() {
            return Err(format!("t must be finite, got {t}"));
        }
        r.t = Some(t);
    }
    Ok(r)
}

pub fn resolve_clt(c: FileConfig) -> Result<FileConfig, String> {
    let n = c.n.unwrap_or(1024);
    let mode = c.mode.clone().unwrap_or_else(|| "bulk-single".into());
    let mut r = FileConfig {
        n: Some(n),
        mode: Some(mode.clone()),
        replicates: Some(c.replicates.unwrap_or(5000)),
        sampler: Some(c.sampler.clone().unwrap_or_else(|| "tridiagonal".into())),
        ..globals(&c)
    };
    match mode.as_str() {
        "bulk-single" => r.k = Some(c.k.unwrap_or(n / 2)),
        "edge-single" => {
            let e = c.edge_exponent.unwrap_or(0.5);
            r.edge_exponent = Some(e);
            r.k = Some(c.k.unwrap_or_else(|| gap(n, e)));
        }
        "bulk-joint" => {
            r.thetas = Some(c.thetas.clone().unwrap_or_else(|| vec![0.5]));
            if c.indices.is_some() {
                r.indices = c.indices.clone();
            } else {
                r.k = Some(c.k.unwrap_or(n / 2));
            }
        }
        "edge-joint" => {
            r.gamma = Some(c.gamma.unwrap_or(0.5));
            r.thetas = Some(c.thetas.clone().unwrap_or_else(|| vec![0.25]));
        }
        "mosteller" => r.lambdas = Some(c.lambdas.clone().unwrap_or_else(|| vec![0.25, 0.75])),
        m => return Err(format!("unknown mode {m:?}")),
    }
    let e = experiment(&r)?;
    e.validate().map_err(|e| e.to_string())?;
    Ok(r)
}

pub fn resolve_zeros(c: FileConfig) -> Result<FileConfig, String> {
    let n = c.n.unwrap_or(400);
    if !(1..=2000).contains(&n) {
        return Err(format!("zeros needs 1 <= n <= 2000, got {n}"));
    }
    Ok(FileConfig { n: Some(n), ..globals(&c) })
}

fn experiment(c: &FileConfig) -> Result<ExperimentConfig, String> {
    let n = c.n.unwrap();
    let err = |e: gue_core::Error| e.to_string();
    let (mode, index) = match c.mode.as_deref().unwrap() {
        "bulk-single" => (Mode::BulkSingle, IndexSpec::Single { k: c.k.unwrap() }),
        "edge-single" => (Mode::EdgeSingle, IndexSpec::Single { k: c.k.unwrap() }),
        "bulk-joint" => {
            let thetas = c.thetas.clone().unwrap();
            let e = match &c.indices {
                Some(ks) => IndexExponents::bulk_with_indices(n, thetas, ks.clone()),
                None => IndexExponents::bulk(n, c.k.unwrap(), thetas),
            };
            (Mode::BulkJoint, IndexSpec::Joint(e.map_err(err)?))
        }
        "edge-joint" => {
            let e = IndexExponents::edge(n, c.gamma.unwrap(), c.thetas.clone().unwrap()).map_err(err)?;
            (Mode::EdgeJoint, IndexSpec::Joint(e))
        }
        _ => (Mode::MostellerBaseline, IndexSpec::Quantiles { lambdas: c.lambdas.clone().unwrap() }),
    };
    let sampler = match c.sampler.as_deref().unwrap() {
        "tridiagonal" => SamplerChoice::Tridiagonal,
        "dense" => SamplerChoice::Dense,
        s => return Err(format!("unknown sampler {s:?}")),
    };
    Ok(ExperimentConfig {
        mode,
        n,
        index,
        replicates: c.replicates.unwrap(),
        master_seed: c.seed.unwrap(),
        sampler,
    })
}

#[derive(Serialize)]
struct Metadata<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a FileConfig,
    provenance: Vec<String>,
}

struct Output {
    /// File stem to contents; written in order.
    files: Vec<(String, String)>,
    provenance: Vec<String>,
    passed: bool,
}

pub fn execute(name: &str, cfg: &FileConfig, corrupt: bool) -> ExitCode {
    let start = Instant::now();
    let out_dir = cfg.out.clone().unwrap();
    let format = cfg.format.unwrap();
    let result = match name {
        "verify-identities" => verify_identities(cfg, format, corrupt),
        "kernel-stats" => kernel_stats(cfg, format),
        "clt" => clt(cfg, format),
        _ => zeros(cfg, format),
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    let meta = Metadata {
        schema: SCHEMA,
        tool: "gue-lab",
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        seed: cfg.seed.unwrap(),
        config: cfg,
        provenance: out.provenance.clone(),
    };
    let mut files = out.files;
    files.push(("metadata.json".into(), pretty(&meta)));
    let wall = start.elapsed().as_secs_f64();
    files.push((
        "run_meta.json".into(),
        pretty(&json!({
            "command": name,
            "wall_time_seconds": wall,
            "threads": rayon::current_num_threads(),
        })),
    ));
    if let Err(e) = write_all(&out_dir, &files) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_NUMERIC);
    }
    eprintln!("{name}: wrote {} files to {} in {wall:.2} s", files.len(), out_dir.display());
    if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERDICT)
    }
}

fn write_all(dir: &Path, files: &[(String, String)]) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

// `key,value` rows for flat records.
fn record_csv(v: &Value) -> String {
    let mut s = String::from("key,value\n");
    if let Value::Object(m) = v {
        for (k, x) in m {
            let x = match x {
                Value::Null => String::new(),
                other => other.to_string(),
            };
            let _ = writeln!(s, "{k},{x}");
        }
    }
    s
}

fn verify_identities(cfg: &FileConfig, format: Format, corrupt: bool) -> Result<Output, String> {
    let mut pre = Prefactors::default();
    if corrupt {
        pre.third *= 1.0 + 1e-3;
    }
    let xs = grid(-5.0, 3.0, cfg.grid_step.unwrap());
    let rows = identity_residuals(&xs, &pre).map_err(|e| e.to_string())?;
    let failing: Vec<_> = rows.iter().filter(|r| !(r.residual <= IDENTITY_TOLERANCE)).collect();
    for r in &failing {
        eprintln!("FAIL {} x = {}: closed {:e}, oracle {:e}, residual {:e}", r.kind.name(), r.x, r.closed, r.oracle, r.residual);
    }
    let body = match format {
        Format::Json => (
            "identities.json".to_string(),
            pretty(&json!({
                "schema": SCHEMA,
                "tolerance": IDENTITY_TOLERANCE,
                "pass": failing.is_empty(),
                "rows": rows.iter().map(|r| json!({
                    "kind": r.kind.name(), "x": r.x, "closed": r.closed, "oracle": r.oracle,
                    "residual": r.residual, "pass": r.residual <= IDENTITY_TOLERANCE,
                })).collect::<Vec<_>>(),
            })),
        ),
        Format::Csv => {
            let mut s = String::from("kind,x,closed,oracle,residual,pass\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{:e},{:e},{:e},{}",
                    r.kind.name(),
                    r.x,
                    r.closed,
                    r.oracle,
                    r.residual,
                    r.residual <= IDENTITY_TOLERANCE
                );
            }
            ("identities.csv".to_string(), s)
        }
    };
    Ok(Output {
        files: vec![body],
        provenance: vec![
            "closed forms built from Ai and Ai'; oracle is adaptive Gauss-Kronrod over [x, 40] at 1e-10".into(),
            format!("tolerance {IDENTITY_TOLERANCE:e} absolute"),
        ],
        passed: failing.is_empty(),
    })
}

fn kernel_stats(cfg: &FileConfig, format: Format) -> Result<Output, String> {
    let n = cfg.n.unwrap();
    let nf = n as f64;
    let root = (2.0 * nf).sqrt();
    let interval = match cfg.t {
        Some(t) => Interval::above(t * root),
        None => Interval::new(cfg.lo.unwrap_or(f64::NEG_INFINITY), cfg.hi.unwrap_or(f64::INFINITY)).map_err(|e| e.to_string())?,
    };
    let ctx = KernelContext::new(n).map_err(|e| e.to_string())?;
    eprintln!("kernel-stats: n = {n}, interval [{}, {}]", interval.lo, interval.hi);
    let count = expected_count(&ctx, interval).map_err(|e| e.to_string())?;
    let variance = number_variance(&ctx, interval).map_err(|e| e.to_string())?;
    let g = |x: f64| semicircle_cdf((x / root).clamp(-1.0, 1.0)).unwrap();
    let semicircle_count = if interval.is_empty() { 0.0 } else { nf * (g(interval.hi) - g(interval.lo)) };
    let log_n = nf.ln() / (2.0 * PI * PI);
    let mut rec = json!({
        "n": n,
        "lo": interval.lo,
        "hi": interval.hi,
        "expected_count": count,
        "semicircle_count": semicircle_count,
        "count_minus_semicircle": count - semicircle_count,
        "number_variance": variance,
        "log_n_over_2pi2": log_n,
        "variance_over_log_n_target": if interval.is_empty() { 0.0 } else { variance / log_n },
    });
    let m = rec.as_object_mut().unwrap();
    // Half-line [s√(2n), ∞) inside the bulk: effective eigenvalue count n(1-|s|)^{3/2}.
    if interval.hi == f64::INFINITY && interval.lo.is_finite() {
        let s = interval.lo / root;
        if s.abs() < 1.0 {
            let target = (nf * (1.0 - s.abs()).powf(1.5)).ln() / (2.0 * PI * PI);
            m.insert("log_effective_target".into(), json!(target));
            m.insert("variance_over_effective_target".into(), json!(variance / target));
        }
        if (0.5..1.0).contains(&s) {
            let e = edge_expected_count(&ctx, s).map_err(|e| e.to_string())?;
            m.insert("edge_leading".into(), json!(e.leading));
            m.insert("edge_airy".into(), json!(e.airy));
            m.insert("edge_count_minus_leading".into(), json!(e.minus_leading()));
            m.insert("edge_count_minus_airy".into(), json!(e.minus_airy()));
        }
    }
    let file = match format {
        Format::Json => ("kernel_stats.json".to_string(), pretty(&rec)),
        Format::Csv => ("kernel_stats.csv".to_string(), record_csv(&rec)),
    };
    Ok(Output {
        files: vec![file],
        provenance: vec![
            "expected count: adaptive Gauss-Kronrod of K_n(x,x) at 1e-8".into(),
            "number variance: Tr M - |M|_F^2 of the Hermite overlap matrix M".into(),
            "asymptotic comparisons are leading-order; no pass/fail verdict".into(),
        ],
        passed: true,
    })
}

fn clt(cfg: &FileConfig, format: Format) -> Result<Output, String> {
    let e = experiment(cfg)?;
    eprintln!("clt: {:?}, n = {}, {} replicates ({:?} sampler)", e.mode, e.n, e.replicates, e.sampler);
    let report = fluctuation_lab::run(&e).map_err(|e| e.to_string())?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for v in &report.verdicts {
        eprintln!(
            "{} {}: {:.4} (target {} ± {})",
            if v.pass { "pass" } else { "FAIL" },
            v.name,
            v.value,
            v.target,
            v.tolerance
        );
    }
    let files = match format {
        Format::Json => vec![("report.json".to_string(), report.to_json() + "\n")],
        Format::Csv => {
            let mut v = String::from("name,value,target,tolerance,pass\n");
            for x in &report.verdicts {
                let _ = writeln!(v, "{},{:e},{},{},{}", x.name, x.value, x.target, x.tolerance, x.pass);
            }
            vec![("samples.csv".to_string(), report.samples_csv()), ("verdicts.csv".to_string(), v)]
        }
    };
    let mut provenance: Vec<String> = report.verdicts.iter().map(|v| format!("{}: {}", v.name, v.provenance)).collect();
    provenance.push(report.metadata.prng.clone());
    provenance.push(report.metadata.gaussian.clone());
    provenance.push(report.metadata.gamma.clone());
    Ok(Output { files, provenance, passed: report.passed() })
}

#[derive(Serialize)]
struct ZeroRow {
    k: usize,
    zero: f64,
    semicircle: Option<f64>,
    scaled_error: Option<f64>,
    refined: Option<f64>,
    refined_error: Option<f64>,
}

fn zeros(cfg: &FileConfig, format: Format) -> Result<Output, String> {
    let n = cfg.n.unwrap();
    let nf = n as f64;
    let z = hermite_zeros(n).map_err(|e| e.to_string())?;
    let rows: Vec<ZeroRow> = z
        .iter()
        .enumerate()
        .map(|(i, &zero)| {
            let k = i + 1;
            let semicircle = (k < n).then(|| (2.0 * nf).sqrt() * semicircle_quantile(k as f64 / nf).unwrap());
            let refined = hermite_zero_estimate(n, k, DEFAULT_ZERO_K0, 1.0).ok().map(|e| e.raw);
            ZeroRow {
                k,
                zero,
                semicircle,
                scaled_error: semicircle.map(|s| (zero - s).abs() * nf.sqrt()),
                refined,
                refined_error: refined.map(|r| (zero - r).abs()),
            }
        })
        .collect();
    let fitted = bulk_zero_constant(&z).map_err(|e| e.to_string())?;
    let refined_c = refined_zero_constant(&z, DEFAULT_ZERO_K0).map_err(|e| e.to_string())?;
    let summary = json!({
        "n": n,
        "fitted_c_bulk": fitted,
        "fitted_c_refined": refined_c,
        "k0": DEFAULT_ZERO_K0,
    });
    let files = match format {
        Format::Json => vec![("zeros.json".to_string(), pretty(&json!({ "summary": summary, "rows": rows })))],
        Format::Csv => {
            let mut s = String::from("k,zero,semicircle,scaled_error,refined,refined_error\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{:e},{},{},{},{}",
                    r.k,
                    r.zero,
                    cell(r.semicircle),
                    cell(r.scaled_error),
                    cell(r.refined),
                    cell(r.refined_error)
                );
            }
            vec![("zeros.csv".to_string(), s), ("zeros_summary.csv".to_string(), record_csv(&summary))]
        }
    };
    Ok(Output {
        files,
        provenance: vec![
            "zeros: eigenvalues of the Hermite Jacobi matrix (implicit QL)".into(),
            "fitted_c_bulk: max over k in [n/5, 4n/5] of |z_k - sqrt(2n) G^-1(k/n)| sqrt(n)".into(),
            format!("fitted_c_refined: smallest C making the refined bound hold for {DEFAULT_ZERO_K0} <= k <= n - {DEFAULT_ZERO_K0}"),
        ],
        passed: true,
    })
}
