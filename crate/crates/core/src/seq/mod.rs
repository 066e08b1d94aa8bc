//! Weight sequences c_1..c_N, their Cesàro means σ_N(t) and spectra.

pub mod arith;
pub mod gauss;

pub use arith::{daboussi_delange_diagnostic, liouville, mobius, DirichletCharacter, LinearSieve};
pub use gauss::{quadratic_rational_cesaro, quadratic_rational_spectrum, SpectralAtom};

use crate::error::{Error, Result};
use crate::numeric::{e, frac_mul, KahanReal, KahanSum};
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::fmt::Write as _;

/// Default Hölder exponent attached to bounded sequences.
pub const DEFAULT_LAMBDA: f64 = 2.0;

/// A finite complex weight sequence with its growth-condition constant.
///
/// `growth_bound` is sup_{M ≤ N} ((1/M) Σ_{n≤M} |c_n|^λ)^{1/λ}.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    name: String,
    params: String,
    values: Vec<Complex64>,
    lambda: f64,
    growth_bound: f64,
}

impl WeightSequence {
    pub fn new(name: impl Into<String>, values: Vec<Complex64>, lambda: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("weight sequence must be nonempty".into()));
        }
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("growth exponent must be > 1, got {lambda}")));
        }
        if let Some(i) = values.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("c_{} is not finite", i + 1)));
        }
        let growth_bound = growth_bound(&values, lambda);
        Ok(Self {
            name: name.into(),
            params: String::new(),
            values,
            lambda,
            growth_bound,
        })
    }

    fn with_params(mut self, params: String) -> Self {
        self.params = params;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &str {
        &self.params
    }

    /// c_1..c_N; index 0 holds c_1.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn growth_bound(&self) -> f64 {
        self.growth_bound
    }

    /// c_n for 1-based n.
    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n - 1]
    }

    /// a·self + b·other over the common prefix.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        let n = self.len().min(other.len());
        let values = (0..n).map(|i| a * self.values[i] + b * other.values[i]).collect();
        Self::new(format!("{}+{}", self.name, other.name), values, self.lambda.min(other.lambda))
    }

    /// One complex number per line, preceded by a `#` header naming the
    /// generator and its parameters.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 40);
        let _ = writeln!(
            out,
            "# generator={} params={} N={} lambda={} growth_bound={}",
            self.name,
            if self.params.is_empty() { "-" } else { &self.params },
            self.len(),
            self.lambda,
            self.growth_bound
        );
        for c in &self.values {
            let _ = writeln!(out, "{:?} {:?}", c.re, c.im);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty sequence file".into()))?;
        let field = |key: &str| -> Option<&str> {
            header
                .trim_start_matches('#')
                .split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        };
        let name = field("generator").ok_or_else(|| Error::Parse("missing generator".into()))?;
        let params = field("params").unwrap_or("-");
        let lambda: f64 = field("lambda")
            .ok_or_else(|| Error::Parse("missing lambda".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("lambda: {e}")))?;
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut it = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::Parse(format!("line {}: missing value", i + 2)))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
            };
            values.push(Complex64::new(parse(it.next())?, parse(it.next())?));
        }
        let seq = Self::new(name, values, lambda)?;
        Ok(seq.with_params(if params == "-" { String::new() } else { params.to_string() }))
    }
}

fn growth_bound(values: &[Complex64], lambda: f64) -> f64 {
    let mut acc = KahanReal::default();
    let mut best: f64 = 0.0;
    for (i, c) in values.iter().enumerate() {
        acc.add(c.norm().powf(lambda));
        best = best.max(acc.value() / (i + 1) as f64);
    }
    best.powf(1.0 / lambda)
}

fn real_sequence(name: &str, vals: impl IntoIterator<Item = i8>) -> WeightSequence {
    let values = vals.into_iter().map(|m| Complex64::new(m as f64, 0.0)).collect();
    WeightSequence::new(name, values, DEFAULT_LAMBDA).expect("bounded integer weights")
}

/// μ(n) as a weight sequence.
pub fn mobius_sequence(n: usize) -> WeightSequence {
    real_sequence("mobius", mobius(n))
}

/// l(n) as a weight sequence.
pub fn liouville_sequence(n: usize) -> WeightSequence {
    real_sequence("liouville", liouville(n))
}

/// The deterministic unimodular phase families.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseKind {
    /// e(c n log n)
    NLogN { c: f64 },
    /// e(n² α)
    Quadratic { alpha: f64 },
    /// e(P(n)) for P(n) = Σ coeffs[k] n^k
    Polynomial { coeffs: Vec<f64> },
}

/// Unimodular sequence c_n = e(φ(n)); growth_bound is 1 for every λ.
pub fn phase_sequence(kind: &PhaseKind, n: usize) -> WeightSequence {
    let (name, params) = match kind {
        PhaseKind::NLogN { c } => ("n_log_n", format!("c={c:?}")),
        PhaseKind::Quadratic { alpha } => ("quadratic_phase", format!("alpha={alpha:?}")),
        PhaseKind::Polynomial { coeffs } => (
            "polynomial_phase",
            format!("coeffs={}", coeffs.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(",")),
        ),
    };
    let values = (1..=n)
        .map(|k| {
            let kf = k as f64;
            match kind {
                PhaseKind::NLogN { c } => e(frac_mul(kf, c * kf.ln())),
                PhaseKind::Quadratic { alpha } => e(frac_mul(kf * kf, *alpha)),
                PhaseKind::Polynomial { coeffs } => {
                    let mut phase = 0.0;
                    let mut power = 1.0;
                    for &a in coeffs {
                        phase += frac_mul(power, a);
                        power *= kf;
                    }
                    e(phase)
                }
            }
        })
        .collect();
    WeightSequence::new(name, values, DEFAULT_LAMBDA)
        .expect("unimodular weights")
        .with_params(params)
}

/// Random sequence c_n = n^τ ξ_n with ξ_n i.i.d. Rademacher from a seeded
/// ChaCha8 stream. λ is chosen as 2, for which the growth constant is finite
/// only up to the n^τ drift; it is reported as measured.
pub fn subnormal_sequence(tau: f64, n: usize, seed: u64) -> Result<WeightSequence> {
    if !(tau > 0.0 && tau < 0.5) {
        return Err(Error::InvalidArgument(format!("tau must lie in (0, 1/2), got {tau}")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (1..=n)
        .map(|k| {
            let xi = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Complex64::new((k as f64).powf(tau) * xi, 0.0)
        })
        .collect();
    Ok(WeightSequence::new("subnormal", values, DEFAULT_LAMBDA)?
        .with_params(format!("tau={tau:?},seed={seed}")))
}

/// σ_N(t) = (1/N) Σ_{n≤N} c_n e(−nt), compensated.
pub fn cesaro_mean(w: &WeightSequence, t: f64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    if n > w.len() {
        return Err(Error::LengthExceeded { requested: n, stored: w.len() });
    }
    let mut acc = KahanSum::new();
    for (i, c) in w.values[..n].iter().enumerate() {
        acc.add(c * e(-frac_mul((i + 1) as f64, t)));
    }
    Ok(acc.value() / n as f64)
}

/// (1/N) Σ_{n≤N, n≡r mod q} c_n e(−nt), with r ∈ 1..=q.
pub fn arithmetic_subsequence_mean(w: &WeightSequence, q: usize, r: usize, t: f64, n: usize) -> Result<Complex64> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be >= 2, got {q}")));
    }
    if r == 0 || r > q {
        return Err(Error::InvalidArgument(format!("r must lie in 1..={q}, got {r}")));
    }
    if n > w.len() {
        return Err(Error::LengthExceeded { requested: n, stored: w.len() });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let mut acc = KahanSum::new();
    let mut k = r;
    while k <= n {
        acc.add(w.values[k - 1] * e(-frac_mul(k as f64, t)));
        k += q;
    }
    Ok(acc.value() / n as f64)
}

/// σ_N evaluated on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub grid: Vec<f64>,
    pub sigma: Vec<Complex64>,
    pub n: usize,
    pub max_abs: f64,
}

impl SpectrumReport {
    /// Grid point where |σ_N| is largest.
    pub fn argmax(&self) -> f64 {
        let i = self
            .sigma
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.grid[i]
    }

    /// CSV with columns `t,re_sigma,im_sigma,abs_sigma,N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_sigma,im_sigma,abs_sigma,N\n");
        for (t, s) in self.grid.iter().zip(&self.sigma) {
            let _ = writeln!(out, "{:?},{:?},{:?},{:?},{}", t, s.re, s.im, s.norm(), self.n);
        }
        out
    }
}

/// The uniform grid {i/m}.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| i as f64 / m as f64).collect()
}

/// The default scan grid: 512 uniform points together with every r/s,
/// s ≤ 8, sorted and deduplicated.
pub fn default_grid() -> Vec<f64> {
    let mut pts: Vec<(u64, u64)> = (0..512u64).map(|i| (i, 512)).collect();
    for s in 1..=8u64 {
        for r in (0..s).filter(|r| r.gcd(&s) == 1) {
            pts.push((r, s));
        }
    }
    pts.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    pts.dedup_by(|a, b| a.0 * b.1 == b.0 * a.1);
    pts.into_iter().map(|(r, s)| r as f64 / s as f64).collect()
}

/// σ_N on the given grid, evaluated in parallel over grid points.
pub fn scan_grid(w: &WeightSequence, grid: &[f64], n: usize) -> Result<SpectrumReport> {
    if n == 0 || n > w.len() {
        return Err(Error::LengthExceeded { requested: n, stored: w.len() });
    }
    let sigma: Vec<Complex64> = grid
        .par_iter()
        .map(|&t| cesaro_mean(w, t, n).expect("length checked"))
        .collect();
    let max_abs = sigma.iter().map(|s| s.norm()).fold(0.0, f64::max);
    Ok(SpectrumReport {
        grid: grid.to_vec(),
        sigma,
        n,
        max_abs,
    })
}

/// σ_N on the uniform grid of `grid_size` points.
pub fn zero_set_scan(w: &WeightSequence, grid_size: usize, n: usize) -> Result<SpectrumReport> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument("grid_size must be >= 2".into()));
    }
    scan_grid(w, &uniform_grid(grid_size), n)
}
