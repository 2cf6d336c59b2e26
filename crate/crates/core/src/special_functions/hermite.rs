/// π^{-1/4}, the value of the normalised constant Hermite function at 0.
pub const PI_POW_MINUS_QUARTER: f64 = 0.751_125_544_464_942_5;

// Rescaling threshold for the unnormalised recurrence.
const RESCALE_EXP: i32 = 600;
const RESCALE_LIMIT: f64 = 4.149_515_568_880_993e180; // 2^600

/// Multiply `v` by `2^e` without intermediate overflow.
pub(crate) fn scale_pow2(mut v: f64, mut e: i32) -> f64 {
    while e > 1000 {
        v *= f64::from_bits(((1000 + 1023) as u64) << 52);
        e -= 1000;
    }
    while e < -1000 {
        v *= f64::from_bits(((-1000 + 1023) as u64) << 52);
        e += 1000;
    }
    v * f64::from_bits(((e + 1023) as u64) << 52)
}

/// Precomputed recurrence coefficients `√(2/(k+1))` and `√(k/(k+1))` up to a
/// fixed degree. Sharing one table across many abscissae removes the square
/// roots from the inner loop of the kernel quadratures.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl HermiteTable {
    /// Table valid for degrees up to and including `max_degree`.
    pub fn new(max_degree: usize) -> Self {
        let a = (0..max_degree)
            .map(|k| (2.0 / (k as f64 + 1.0)).sqrt())
            .collect();
        let b = (0..max_degree)
            .map(|k| (k as f64 / (k as f64 + 1.0)).sqrt())
            .collect();
        Self { a, b }
    }

    pub fn max_degree(&self) -> usize {
        self.a.len()
    }

    /// `[φ_{n-1}(x), φ_n(x), φ_{n+1}(x)]` with `φ_{-1} = 0`.
    ///
    /// Requires `n + 1 <= max_degree`.
    pub fn triple(&self, n: usize, x: f64) -> [f64; 3] {
        assert!(n < self.a.len(), "degree {} beyond table", n + 1);
        let mut it = HermiteFunctions::with_coefficients(x, |k| (self.a[k], self.b[k]));
        it.advance_to(n + 1);
        it.last_three()
    }

    /// Fills `out[k] = φ_k(x)` for `k < out.len()`; requires
    /// `out.len() <= max_degree + 1`.
    pub fn fill(&self, x: f64, out: &mut [f64]) {
        assert!(out.len() <= self.a.len() + 1, "degree {} beyond table", out.len());
        let mut it = HermiteFunctions::with_coefficients(x, |k| (self.a[k], self.b[k]));
        for (k, slot) in out.iter_mut().enumerate() {
            it.advance_to(k);
            *slot = it.value();
        }
    }
}

/// Forward three-term recurrence for the weighted orthonormal Hermite
/// functions `φ_k(x) = h_k(x) e^{-x²/2}`.
///
/// The Gaussian weight is folded into the seed, and the running pair is kept
/// as `mantissa · 2^exponent` so that neither the tiny seed far from the
/// origin nor the growth through the classically forbidden region leaves the
/// representable range.
#[derive(Debug, Clone)]
pub struct HermiteFunctions<C> {
    x: f64,
    coef: C,
    degree: usize,
    prev2: f64,
    prev: f64,
    cur: f64,
    exp2: i32,
    started: bool,
}

fn default_coefficients(k: usize) -> (f64, f64) {
    let kf = k as f64;
    ((2.0 / (kf + 1.0)).sqrt(), (kf / (kf + 1.0)).sqrt())
}

impl HermiteFunctions<fn(usize) -> (f64, f64)> {
    pub fn new(x: f64) -> Self {
        Self::with_coefficients(x, default_coefficients as fn(usize) -> (f64, f64))
    }
}

impl<C: Fn(usize) -> (f64, f64)> HermiteFunctions<C> {
    fn with_coefficients(x: f64, coef: C) -> Self {
        let half_sq = 0.5 * x * x;
        let (seed, exp2) = if !half_sq.is_finite() {
            (0.0, 0)
        } else if half_sq < 700.0 {
            (PI_POW_MINUS_QUARTER * (-half_sq).exp(), 0)
        } else {
            let l2 = -half_sq / std::f64::consts::LN_2;
            let e = l2.floor();
            (PI_POW_MINUS_QUARTER * (l2 - e).exp2(), e as i32)
        };
        Self {
            x,
            coef,
            degree: 0,
            prev2: 0.0,
            prev: 0.0,
            cur: seed,
            exp2,
            started: false,
        }
    }

    /// Current degree `k` of [`Self::value`].
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `φ_k(x)` at the current degree.
    pub fn value(&self) -> f64 {
        scale_pow2(self.cur, self.exp2)
    }

    fn step(&mut self) {
        let (a, b) = (self.coef)(self.degree);
        let next = a * self.x * self.cur - b * self.prev;
        self.prev2 = self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.degree += 1;
        if next.abs() > RESCALE_LIMIT {
            let s = scale_pow2(1.0, -RESCALE_EXP);
            self.prev2 *= s;
            self.prev *= s;
            self.cur *= s;
            self.exp2 += RESCALE_EXP;
        }
    }

    pub fn advance_to(&mut self, degree: usize) {
        while self.degree < degree {
            self.step();
        }
    }

    /// `[φ_{k-2}, φ_{k-1}, φ_k]` at the current degree `k`.
    pub fn last_three(&self) -> [f64; 3] {
        [
            scale_pow2(self.prev2, self.exp2),
            scale_pow2(self.prev, self.exp2),
            scale_pow2(self.cur, self.exp2),
        ]
    }
}

impl Iterator for HermiteFunctions<fn(usize) -> (f64, f64)> {
    type Item = f64;

    /// Yields `φ_0, φ_1, ...`.
    fn next(&mut self) -> Option<f64> {
        if self.started {
            self.step();
        }
        self.started = true;
        Some(self.value())
    }
}

/// Weighted orthonormal Hermite function `h_n(x) e^{-x²/2}`.
pub fn hermite_weighted(n: usize, x: f64) -> f64 {
    let mut it = HermiteFunctions::new(x);
    it.advance_to(n);
    it.value()
}

/// `[φ_{n-1}(x), φ_n(x), φ_{n+1}(x)]`, with `φ_{-1} = 0`.
pub fn hermite_weighted_triple(n: usize, x: f64) -> [f64; 3] {
    let mut it = HermiteFunctions::new(x);
    it.advance_to(n + 1);
    it.last_three()
}

/// `φ_0(x), ..., φ_{n_max}(x)`.
pub fn hermite_weighted_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut it = HermiteFunctions::new(x);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(it.value());
    for k in 1..=n_max {
        it.advance_to(k);
        out.push(it.value());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert!((hermite_weighted(0, 0.0) - PI_POW_MINUS_QUARTER).abs() < 1e-16);
        assert_eq!(hermite_weighted(1, 0.0), 0.0);
        let x = 0.7;
        let h1 = std::f64::consts::SQRT_2 * x * PI_POW_MINUS_QUARTER * (-0.5 * x * x).exp();
        assert!((hermite_weighted(1, x) - h1).abs() < 1e-15);
    }

    #[test]
    fn pinned_extended_precision_values() {
        // 60-digit recurrence evaluated with mpmath.
        let cases = [
            (10, 1.3, -0.349_991_471_678_912_36),
            (100, 5.0, 0.210_854_619_683_931_64),
            (1000, 40.0, 0.172_250_520_732_792_27),
            (1000, 50.0, 1.738_117_861_841_323_6e-35),
        ];
        for (n, x, want) in cases {
            let got = hermite_weighted(n, x);
            assert!(
                ((got - want) / want).abs() < 1e-11,
                "n={n} x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn parity() {
        for n in [3usize, 8, 51, 400] {
            let a = hermite_weighted(n, 1.7);
            let b = hermite_weighted(n, -1.7);
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(a, s * b);
        }
    }

    #[test]
    fn extreme_arguments_do_not_overflow() {
        for &(n, x) in &[(100_000usize, 1000.0), (100_000, 447.0), (100_000, 0.3), (5, 1000.0)] {
            let v = hermite_weighted(n, x);
            assert!(v.is_finite(), "n={n} x={x}");
            // Uniform bound |φ_n| ≤ π^{-1/4}.
            assert!(v.abs() <= 0.7512);
        }
        assert_eq!(hermite_weighted(5, 1000.0), 0.0);
        // Near the turning point the function is O(n^{-1/12}) and must not vanish.
        let n = 100_000usize;
        let v = hermite_weighted(n, (2.0 * n as f64).sqrt());
        assert!(v.abs() > 1e-3);
    }

    #[test]
    fn recurrence_residual() {
        for n in 1..200usize {
            for i in 0..25 {
                let x = -6.0 + 0.5 * i as f64;
                let [p, c, nx] = hermite_weighted_triple(n, x);
                let nf = n as f64;
                let lhs = (nf + 1.0).sqrt() * nx;
                let rhs = std::f64::consts::SQRT_2 * x * c - nf.sqrt() * p;
                let scale = lhs.abs().max(rhs.abs()).max(1e-300);
                assert!(((lhs - rhs) / scale).abs() < 1e-10 || (lhs - rhs).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn table_matches_direct() {
        let t = HermiteTable::new(301);
        for &x in &[-3.3, 0.0, 0.4, 12.0, 30.0] {
            assert_eq!(t.triple(300, x), hermite_weighted_triple(300, x));
            let mut buf = vec![0.0; 302];
            t.fill(x, &mut buf);
            assert_eq!(buf, hermite_weighted_all(301, x));
        }
    }

    #[test]
    fn orthonormal_up_to_degree_30() {
        let t = HermiteTable::new(31);
        for i in 0..=30 {
            for j in i..=30 {
                let v = crate::quadrature::integrate_adaptive(
                    |x: f64| {
                        let mut b = [0.0; 31];
                        t.fill(x, &mut b);
                        b[i] * b[j]
                    },
                    -14.0,
                    14.0,
                    1e-12,
                    100_000,
                )
                .unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-8, "({i}, {j}): {v}");
            }
        }
    }

    #[test]
    fn iterator_yields_sequence() {
        let direct = hermite_weighted_all(6, 0.9);
        let it: Vec<f64> = HermiteFunctions::new(0.9).take(7).collect();
        assert_eq!(direct, it);
    }
}
