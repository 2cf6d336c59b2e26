//! Symmetric tridiagonal eigenvalues (implicit QL with Wilkinson-type
//! shifts, Sturm-sequence bisection) and Householder reduction of dense
//! Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum QL sweeps spent on any single eigenvalue.
pub const MAX_QL_ITERATIONS: usize = 50;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`; length `n - 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        if n <= 1 {
            return Ok(d);
        }
        let mut e = self.off.clone();
        e.push(0.0);
        tql1(&mut d, &mut e)?;
        d.sort_by(|a, b| a.total_cmp(b));
        Ok(d)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count of the negative
    /// pivots of `T - x I = L D Lᵀ`).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut q = 1.0_f64;
        for i in 0..n {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Eigenvalue number `k` (1-based, ascending) by Sturm bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let n = self.dim();
        assert!(k >= 1 && k <= n, "eigenvalue index {k} out of 1..={n}");
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        // invariant: count_below(lo) < k <= count_below(hi)
        hi += f64::EPSILON * scale;
        lo -= f64::EPSILON * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * mid.abs().max(1e-300) {
                break;
            }
            if self.count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

// Implicit QL, eigenvalues only. `e[i]` couples i and i + 1, e[n-1] = 0.
fn tql1(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::EigensolverFailure {
                    index: l,
                    iterations: iter - 1,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// From a real symmetric row-major matrix.
    pub fn from_real_symmetric(n: usize, a: &[f64]) -> Self {
        assert_eq!(a.len(), n * n);
        Self {
            n,
            data: a.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and its mirror `(j, i)`; diagonal entries keep only the real part.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        if i == j {
            self.data[i * self.n + i] = Complex64::new(v.re, 0.0);
        } else {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = v.conj();
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    /// Unitary reduction `Qᴴ A Q = T` by Householder reflectors, followed by
    /// a diagonal phase change making the off-diagonal of `T` real and
    /// non-negative.
    pub fn tridiagonalize(&self) -> SymTridiagonal {
        let n = self.n;
        let mut a = self.data.clone();
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        let mut p = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n.saturating_sub(1) {
            diag.push(a[k * n + k].re);
            let m = n - k - 1;
            let xs = &mut v[..m];
            for (i, slot) in xs.iter_mut().enumerate() {
                *slot = a[(k + 1 + i) * n + k];
            }
            let norm = xs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                off.push(0.0);
                continue;
            }
            let x0 = xs[0];
            let phase = if x0.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * norm;
            xs[0] -= alpha;
            let vnorm = xs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            off.push(norm);
            if vnorm == 0.0 {
                continue;
            }
            for z in xs.iter_mut() {
                *z /= vnorm;
            }
            let vs = &v[..m];
            // p = A_sub v
            for i in 0..m {
                let row = (k + 1 + i) * n + k + 1;
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    s += a[row + j] * vs[j];
                }
                p[i] = s;
            }
            let kk: f64 = (0..m).map(|i| (vs[i].conj() * p[i]).re).sum();
            for i in 0..m {
                p[i] -= vs[i] * kk;
            }
            // A_sub -= 2 (v wᴴ + w vᴴ)
            for i in 0..m {
                let row = (k + 1 + i) * n + k + 1;
                let vi2 = vs[i] * 2.0;
                let wi2 = p[i] * 2.0;
                for j in 0..m {
                    a[row + j] -= vi2 * p[j].conj() + wi2 * vs[j].conj();
                }
            }
        }
        if n > 0 {
            diag.push(a[(n - 1) * n + n - 1].re);
        }
        SymTridiagonal::new(diag, off)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.tridiagonalize().eigenvalues()
    }
}

/// Ascending eigenvalues of a real symmetric row-major matrix.
pub fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    HermitianMatrix::from_real_symmetric(n, a).eigenvalues()
}
