//! Small numeric helpers shared across modules: compensated summation,
//! accurate unit-circle phases and a least-squares slope.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.sum.re = neumaier(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, v.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Real-valued counterpart of [`KahanSum`].
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanReal {
    sum: f64,
    comp: f64,
}

impl KahanReal {
    #[inline]
    pub fn add(&mut self, v: f64) {
        self.sum = neumaier(self.sum, v, &mut self.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `frac(a * b)` computed from the exact two-product, so large `a` does not
/// destroy the low-order bits of the phase.
#[inline]
pub fn frac_mul(a: f64, b: f64) -> f64 {
    let p = a * b;
    let err = a.mul_add(b, -p);
    frac(frac(p) + err)
}

/// `e(x) = exp(2 pi i x)` with the argument reduced mod 1 first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (TAU * frac(x)).sin_cos();
    Complex64::new(c, s)
}

/// Circle arc-length distance between two points of `R/Z`.
#[inline]
pub fn circle_dist(x: f64, y: f64) -> f64 {
    let d = frac(x - y);
    d.min(1.0 - d)
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Star discrepancy-like statistic of points in `[0, 1)`: the sup over
/// intervals `[0, a)` of |empirical - a|, computed exactly from sorted data.
pub fn star_discrepancy(points: &[f64]) -> f64 {
    let mut v: Vec<f64> = points.iter().map(|&x| frac(x)).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((x - lo).abs()).max((hi - x).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let mut k = KahanReal::default();
        k.add(1e16);
        for _ in 0..1000 {
            k.add(1.0);
        }
        k.add(-1e16);
        assert_eq!(k.value(), 1000.0);
    }

    #[test]
    fn frac_mul_keeps_low_bits() {
        let n = 1_000_000.0f64;
        let alpha = 0.5f64.powi(10) + 0.5f64.powi(40);
        // n^2 * alpha = 1e12 * (2^-10 + 2^-40) reduced exactly
        let exact = {
            let n2: u128 = 1_000_000u128 * 1_000_000u128;
            let num = n2 * ((1u128 << 30) + 1);
            let m = num % (1u128 << 40);
            m as f64 / (1u128 << 40) as f64
        };
        assert!((frac_mul(n * n, alpha) - exact).abs() < 1e-15);
    }

    #[test]
    fn circle_dist_wraps() {
        assert!((circle_dist(0.95, 0.05) - 0.1).abs() < 1e-15);
        assert_eq!(circle_dist(0.3, 0.3), 0.0);
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [2.0, 4.0, 6.0];
        assert!((ols_slope(&xs, &ys) - 2.0).abs() < 1e-15);
    }
}
