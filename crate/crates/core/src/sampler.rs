//! GUE spectrum samplers, Hermite zeros and uniform order statistics.
//!
//! Normalization: the joint eigenvalue density is proportional to
//! `Π|x_i - x_j|² e^{-Σ x_i²}`, so the semicircle support is `[-√(2n), √(2n)]`.
//!
//! * Dense model: `H_ii ~ N(0, ½)`, `Re H_ij, Im H_ij ~ N(0, ¼)` for `i < j`.
//! * Tridiagonal model: diagonal `a_i ~ N(0, ½)`, off-diagonal
//!   `b_i = χ_{2i}/2 = √(Γ_i/2)` with `Γ_i ~ Gamma(shape i, scale 1)`,
//!   `i = 1, ..., n-1`. This is the β = 2 Hermite model rescaled by `1/√2`.
//!
//! Random streams: ChaCha20 (`rand_chacha` 0.3) seeded by
//! `seed_from_u64(master_seed)` and switched to stream `stream_index`.
//! Normals use the ziggurat sampler of `rand_distr` 0.4, Gamma variates its
//! Marsaglia–Tsang sampler. Changing any of these changes every spectrum
//! bit for bit, so they are echoed in experiment metadata.

use std::io::{self, Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{HermitianMatrix, SymTridiagonal};

pub const PRNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.3): seed_from_u64(master_seed), set_stream(stream_index)";
pub const GAUSSIAN_METHOD: &str = "ziggurat (rand_distr 0.4 StandardNormal)";
pub const GAMMA_METHOD: &str = "Marsaglia-Tsang (rand_distr 0.4 Gamma, shape i, scale 1)";

/// Largest dimension accepted by the dense sampler.
pub const DENSE_MAX_N: usize = 2000;
pub const ZEROS_MAX_N: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Ascending eigenvalues of one sampled matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerChoice {
    Dense,
    Tridiagonal,
}

fn normal(rng: &mut ChaCha20Rng, sd: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sd * z
}

/// Dense GUE matrix. Draw order: the diagonal, then `(Re, Im)` of the upper
/// triangle row by row.
pub fn sample_gue_matrix(n: usize, seed: SeedSpec) -> HermitianMatrix {
    let mut rng = seed.rng();
    let mut h = HermitianMatrix::zeros(n);
    let sd_diag = 0.5f64.sqrt();
    for i in 0..n {
        h.set(i, i, Complex64::new(normal(&mut rng, sd_diag), 0.0));
    }
    for i in 0..n {
        for j in i + 1..n {
            let re = normal(&mut rng, 0.5);
            let im = normal(&mut rng, 0.5);
            h.set(i, j, Complex64::new(re, im));
        }
    }
    h
}

/// Spectrum of a dense GUE matrix (Householder reduction, then implicit QL).
pub fn sample_gue_dense(n: usize, seed: SeedSpec) -> Result<Spectrum> {
    if n == 0 || n > DENSE_MAX_N {
        return domain(format!("dense sampler needs 1 <= n <= {DENSE_MAX_N}, got {n}"));
    }
    let eigenvalues = sample_gue_matrix(n, seed).eigenvalues()?;
    Ok(Spectrum { n, eigenvalues })
}

/// Tridiagonal matrix with the GUE eigenvalue law. Draw order: the
/// diagonal, then `b_{n-1}, ..., b_1` top to bottom.
pub fn sample_gue_tridiagonal_matrix(n: usize, seed: SeedSpec) -> SymTridiagonal {
    let mut rng = seed.rng();
    let sd = 0.5f64.sqrt();
    let diag: Vec<f64> = (0..n).map(|_| normal(&mut rng, sd)).collect();
    let off: Vec<f64> = (1..n)
        .rev()
        .map(|i| {
            let g: f64 = Gamma::new(i as f64, 1.0).expect("positive shape").sample(&mut rng);
            (0.5 * g).sqrt()
        })
        .collect();
    SymTridiagonal::new(diag, off)
}

pub fn sample_gue_tridiagonal(n: usize, seed: SeedSpec) -> Result<Spectrum> {
    if n == 0 {
        return domain("tridiagonal sampler needs n >= 1");
    }
    let eigenvalues = sample_gue_tridiagonal_matrix(n, seed).eigenvalues()?;
    Ok(Spectrum { n, eigenvalues })
}

/// Selected eigenvalues `x_k` (1-based ascending) of one tridiagonal draw, by
/// Sturm bisection; same law as picking them from the full spectrum.
pub fn sample_gue_selected(n: usize, seed: SeedSpec, ks: &[usize]) -> Result<Vec<f64>> {
    if let Some(&k) = ks.iter().find(|&&k| k < 1 || k > n) {
        return domain(format!("eigenvalue index {k} outside 1..={n}"));
    }
    let t = sample_gue_tridiagonal_matrix(n, seed);
    Ok(ks.iter().map(|&k| t.eigenvalue(k)).collect())
}

/// Draw one spectrum with the chosen sampler.
pub fn sample_spectrum(choice: SamplerChoice, n: usize, seed: SeedSpec) -> Result<Spectrum> {
    match choice {
        SamplerChoice::Dense => sample_gue_dense(n, seed),
        SamplerChoice::Tridiagonal => sample_gue_tridiagonal(n, seed),
    }
}

/// Zeros of the physicists' Hermite polynomial `H_n`, ascending, as
/// eigenvalues of the Jacobi matrix with zero diagonal and off-diagonal
/// `√(k/2)`, `k = 1, ..., n-1`.
pub fn hermite_zeros(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > ZEROS_MAX_N {
        return domain(format!("hermite_zeros needs 1 <= n <= {ZEROS_MAX_N}, got {n}"));
    }
    let off = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut z = SymTridiagonal::new(vec![0.0; n], off).eigenvalues()?;
    // The spectrum is symmetric; enforce it exactly.
    for i in 0..n / 2 {
        let m = 0.5 * (z[n - 1 - i] - z[i]);
        z[i] = -m;
        z[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        z[n / 2] = 0.0;
    }
    Ok(z)
}

/// Sorted i.i.d. Uniform(0, 1) sample.
pub fn sample_uniform_order_stats(n: usize, seed: SeedSpec) -> Vec<f64> {
    let mut rng = seed.rng();
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample(Open01)).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Binary spectrum file magic.
pub const SPECTRA_MAGIC: [u8; 8] = *b"GUESPEC\0";
pub const SPECTRA_VERSION: u32 = 1;

/// CSV: header `x_1,...,x_n`, then one row per replicate.
pub fn write_spectra_csv<W: Write>(mut w: W, spectra: &[Spectrum]) -> io::Result<()> {
    let n = spectra.first().map_or(0, |s| s.n);
    let header: Vec<String> = (1..=n).map(|k| format!("x_{k}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for s in spectra {
        let row: Vec<String> = s.eigenvalues.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Little-endian binary: magic, `u32` version, `u64` n, `u64` replicate
/// count, `u64` master seed, then the eigenvalues as `f64`, replicate-major.
pub fn write_spectra_binary<W: Write>(mut w: W, spectra: &[Spectrum], master_seed: u64) -> io::Result<()> {
    let n = spectra.first().map_or(0, |s| s.n);
    if spectra.iter().any(|s| s.n != n || s.eigenvalues.len() != n) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "spectra of unequal size"));
    }
    w.write_all(&SPECTRA_MAGIC)?;
    w.write_all(&SPECTRA_VERSION.to_le_bytes())?;
    w.write_all(&(n as u64).to_le_bytes())?;
    w.write_all(&(spectra.len() as u64).to_le_bytes())?;
    w.write_all(&master_seed.to_le_bytes())?;
    for s in spectra {
        for v in &s.eigenvalues {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Inverse of [`write_spectra_binary`]; returns the spectra and master seed.
pub fn read_spectra_binary<R: Read>(mut r: R) -> io::Result<(Vec<Spectrum>, u64)> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if magic != SPECTRA_MAGIC {
        return Err(bad("not a spectrum file"));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != SPECTRA_VERSION {
        return Err(bad("unsupported spectrum file version"));
    }
    let mut b8 = [0u8; 8];
    let mut next_u64 = |r: &mut R| -> io::Result<u64> {
        r.read_exact(&mut b8)?;
        Ok(u64::from_le_bytes(b8))
    };
    let n = next_u64(&mut r)? as usize;
    let reps = next_u64(&mut r)? as usize;
    let seed = next_u64(&mut r)?;
    let mut out = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut ev = Vec::with_capacity(n);
        for _ in 0..n {
            ev.push(f64::from_bits(next_u64(&mut r)?));
        }
        out.push(Spectrum { n, eigenvalues: ev });
    }
    Ok((out, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::hermite_weighted;

    #[test]
    fn small_zeros() {
        assert_eq!(hermite_zeros(1).unwrap(), vec![0.0]);
        let z = hermite_zeros(2).unwrap();
        assert!((z[1] - 0.5f64.sqrt()).abs() < 1e-15 && z[0] == -z[1]);
    }

    #[test]
    fn zeros_are_roots() {
        for z in hermite_zeros(50).unwrap() {
            assert!(hermite_weighted(50, z).abs() <= 1e-8);
        }
    }

    #[test]
    fn determinism_and_streams() {
        let a = sample_gue_tridiagonal(30, SeedSpec::new(7, 3)).unwrap();
        let b = sample_gue_tridiagonal(30, SeedSpec::new(7, 3)).unwrap();
        let c = sample_gue_tridiagonal(30, SeedSpec::new(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn dense_trace() {
        let seed = SeedSpec::new(11, 0);
        let h = sample_gue_matrix(40, seed);
        let s = sample_gue_dense(40, seed).unwrap();
        let sum: f64 = s.eigenvalues.iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-9 * h.trace().abs().max(1.0));
        assert!(sample_gue_dense(DENSE_MAX_N + 1, seed).is_err());
    }

    #[test]
    fn selected_match_full() {
        let seed = SeedSpec::new(5, 9);
        let full = sample_gue_tridiagonal(300, seed).unwrap().eigenvalues;
        let sel = sample_gue_selected(300, seed, &[1, 150, 300]).unwrap();
        for (k, v) in [1usize, 150, 300].iter().zip(sel) {
            assert!((full[k - 1] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn binary_roundtrip() {
        let spectra: Vec<Spectrum> = (0..3).map(|i| sample_gue_tridiagonal(5, SeedSpec::new(1, i)).unwrap()).collect();
        let mut buf = Vec::new();
        write_spectra_binary(&mut buf, &spectra, 1).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 24 + 15 * 8);
        let (back, seed) = read_spectra_binary(&buf[..]).unwrap();
        assert_eq!((back, seed), (spectra.clone(), 1));
        let mut csv = Vec::new();
        write_spectra_csv(&mut csv, &spectra).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("x_1,x_2,x_3,x_4,x_5\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
