//! Weighted Birkhoff sums S_N f(x) = (1/N) Σ_{n=1}^N c_n f(Tⁿx) and the
//! empirical testers around them: decay verdicts, mean equicontinuity, bad
//! time densities, mean attraction, periodic shadowing and autocorrelations.

use crate::error::{Error, Result};
use crate::flow::{Flow, Observable};
use crate::numeric::{ols_slope, KahanReal, KahanSum};
use crate::seq::{cesaro_mean, WeightSequence};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::collections::VecDeque;
use std::fmt;

/// Slope of log|S_N| against log N below which a sum counts as decaying.
pub const DECAY_SLOPE: f64 = -0.1;
/// Slope above which a sum counts as stagnant.
pub const STAGNANT_SLOPE: f64 = -0.02;
/// Final level, relative to growth bound × sup|f|, required for decay.
pub const DECAY_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Decaying,
    Stagnant(Complex64),
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Decaying => write!(f, "decaying"),
            Verdict::Stagnant(l) => {
                let tidy = |v: f64| if v.abs() < 5e-7 { 0.0 } else { v };
                write!(f, "stagnant({:.6}{:+.6}i)", tidy(l.re), tidy(l.im))
            },
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjointnessReport {
    pub sequence: String,
    pub flow: String,
    pub observable: String,
    pub start: String,
    pub checkpoints: Vec<(usize, Complex64)>,
    pub slope: f64,
    pub sup_f: f64,
    pub verdict: Verdict,
}

impl DisjointnessReport {
    pub fn final_value(&self) -> Complex64 {
        self.checkpoints.last().map(|c| c.1).unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sequence": self.sequence,
            "flow": self.flow,
            "observable": self.observable,
            "start": self.start,
            "checkpoints": self.checkpoints.iter().map(|(n, s)| json!({"N": n, "re": s.re, "im": s.im})).collect::<Vec<_>>(),
            "slope": self.slope,
            "verdict": self.verdict.to_string(),
        })
    }

    /// `N,re,im,abs` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,re,im,abs\n");
        for (n, v) in &self.checkpoints {
            s.push_str(&format!("{n},{:?},{:?},{:?}\n", v.re, v.im, v.norm()));
        }
        s
    }
}

/// 10², 10^2.5, 10³, … up to n_max, always ending at n_max.
pub fn default_checkpoints(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (4..)
        .map(|k| 10f64.powf(k as f64 / 2.0).round() as usize)
        .take_while(|&n| n < n_max)
        .collect();
    out.push(n_max);
    out.dedup();
    out
}

/// Decay slope over the last half of the checkpoints.
pub fn decay_slope(checkpoints: &[(usize, Complex64)]) -> f64 {
    let half = &checkpoints[checkpoints.len() / 2..];
    let half = if half.len() < 2 && checkpoints.len() >= 2 { &checkpoints[checkpoints.len() - 2..] } else { half };
    let xs: Vec<f64> = half.iter().map(|c| (c.0 as f64).ln()).collect();
    let ys: Vec<f64> = half.iter().map(|c| c.1.norm().max(1e-300).ln()).collect();
    ols_slope(&xs, &ys)
}

pub fn classify(checkpoints: &[(usize, Complex64)], growth_bound: f64, sup_f: f64) -> (f64, Verdict) {
    let slope = decay_slope(checkpoints);
    let last = checkpoints.last().map(|c| c.1).unwrap_or_default();
    let verdict = if slope < DECAY_SLOPE && last.norm() < DECAY_LEVEL * growth_bound * sup_f {
        Verdict::Decaying
    } else if slope > STAGNANT_SLOPE && last.norm() >= DECAY_LEVEL * growth_bound * sup_f {
        Verdict::Stagnant(last)
    } else {
        Verdict::Inconclusive
    };
    (slope, verdict)
}

/// Streams the orbit once and records S_N f(x) at each checkpoint.
pub fn weighted_birkhoff<F, O>(w: &WeightSequence, flow: &F, f: &O, x: F::Point, checkpoints: &[usize]) -> Result<DisjointnessReport>
where
    F: Flow,
    F::Point: fmt::Debug,
    O: Observable<F::Point> + ?Sized,
{
    if checkpoints.is_empty() || checkpoints[0] == 0 || checkpoints.windows(2).any(|c| c[1] <= c[0]) {
        return Err(Error::InvalidArgument("checkpoints must be positive and strictly increasing".into()));
    }
    let n_max = *checkpoints.last().unwrap();
    if n_max > w.len() {
        return Err(Error::LengthExceeded { requested: n_max, stored: w.len() });
    }
    let start = format!("{x:?}");
    let mut acc = KahanSum::new();
    let mut sup_f: f64 = 0.0;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut p = x;
    for n in 1..=n_max {
        p = flow.step(&p);
        let v = f.eval(&p);
        sup_f = sup_f.max(v.norm());
        acc.add(w.get(n) * v);
        if next.peek() == Some(&&n) {
            next.next();
            out.push((n, acc.value() / n as f64));
        }
    }
    let (slope, verdict) = classify(&out, w.growth_bound(), sup_f);
    Ok(DisjointnessReport {
        sequence: w.name().to_string(),
        flow: flow.name(),
        observable: f.name(),
        start,
        checkpoints: out,
        slope,
        sup_f,
        verdict,
    })
}

/// One point of the δ → ε response curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub delta: f64,
    pub worst: f64,
}

/// (1/N) Σ_{n=1}^N d(Tⁿx, Tⁿy).
pub fn cesaro_distance<F: Flow>(flow: &F, x: &F::Point, y: &F::Point, n: usize) -> f64 {
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut acc = KahanReal::default();
    for _ in 0..n {
        a = flow.step(&a);
        b = flow.step(&b);
        acc.add(flow.dist(&a, &b));
    }
    acc.value() / n as f64
}

/// Worst Cesàro distance over the given pairs at horizon N.
pub fn mean_equicontinuity_probe<F: Flow>(flow: &F, pairs: &[(F::Point, F::Point)], n: usize) -> f64 {
    pairs.iter().map(|(x, y)| cesaro_distance(flow, x, y, n)).fold(0.0, f64::max)
}

/// Response curve: for each δ, `pairs` samples drawn by `sample(δ)` and the
/// worst Cesàro distance among them.
pub fn mean_equicontinuity_response<F, S>(flow: &F, deltas: &[f64], pairs: usize, n: usize, mut sample: S) -> Vec<ResponsePoint>
where
    F: Flow,
    S: FnMut(f64) -> (F::Point, F::Point),
{
    deltas
        .iter()
        .map(|&delta| {
            let ps: Vec<_> = (0..pairs).map(|_| sample(delta)).collect();
            ResponsePoint { delta, worst: mean_equicontinuity_probe(flow, &ps, n) }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    /// (prefix length n, #{k ≤ n : k bad})
    pub prefix_counts: Vec<(usize, usize)>,
    pub burn_in: usize,
    /// max over prefixes n ≥ burn-in of count/n
    pub upper_density: f64,
}

/// Density of {n ≤ N : d(Tⁿx, Tⁿy) ≥ ε}, reported on dyadic prefixes; the
/// upper density is taken over prefixes of length at least N/8.
pub fn mls_bad_density<F: Flow>(flow: &F, x: &F::Point, y: &F::Point, eps: f64, n: usize) -> DensityEstimate {
    let burn_in = (n / 8).max(1);
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut bad = 0;
    let mut prefix_counts = Vec::new();
    let mut next = 16usize.min(n);
    for k in 1..=n {
        a = flow.step(&a);
        b = flow.step(&b);
        if flow.dist(&a, &b) >= eps {
            bad += 1;
        }
        if k == next || k == n {
            prefix_counts.push((k, bad));
            next = (next * 2).min(n);
        }
    }
    prefix_counts.dedup();
    let upper_density = prefix_counts
        .iter()
        .filter(|(k, _)| *k >= burn_in)
        .map(|&(k, c)| c as f64 / k as f64)
        .fold(0.0, f64::max);
    DensityEstimate { prefix_counts, burn_in, upper_density }
}

/// (1/N) Σ_{n=1}^N d(Tⁿx, Tⁿz).
pub fn mean_attraction_test<F: Flow>(flow: &F, x: &F::Point, z: &F::Point, n: usize) -> f64 {
    cesaro_distance(flow, x, z, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shadowing {
    pub tau: usize,
    pub period: usize,
    /// The shadowed point is z = T^phase(y) for the cycle point y found at
    /// the horizon, aligned so that Tⁿx stays near Tⁿz.
    pub phase: usize,
}

/// Finds τ and a cycle phase with d(T^{τ+m}x, T^{τ+m}z) < ε for all m up to
/// the horizon, z on a periodic orbit; `None` when no cycle closes.
pub fn shadow_periodic<F: Flow>(flow: &F, x: &F::Point, eps: f64, horizon: usize) -> Option<Shadowing> {
    let kmax = (horizon / 2).clamp(1, 4096);
    let close = eps * 1e-4;
    let mut y = x.clone();
    for _ in 0..horizon {
        y = flow.step(&y);
    }
    let mut cycle = vec![y.clone()];
    let mut period = None;
    let mut c = flow.step(&y);
    for k in 1..=kmax {
        if flow.dist(&c, &y) < close {
            period = Some(k);
            break;
        }
        cycle.push(c.clone());
        c = flow.step(&c);
    }
    let k = period?;
    // the cycle must really repeat over the whole window
    let mut c = y.clone();
    for m in 0..horizon.min(64 * k) {
        if flow.dist(&c, &cycle[m % k]) >= close * 10.0 {
            return None;
        }
        c = flow.step(&c);
    }
    // T^horizon x = y = cycle[0], so Tⁿx is compared with cycle[(n − horizon) mod k]
    let phase = (k - horizon % k) % k;
    let mut last_bad = None;
    let mut p = x.clone();
    for n in 0..=horizon {
        if flow.dist(&p, &cycle[(phase + n) % k]) >= eps {
            last_bad = Some(n);
        }
        p = flow.step(&p);
    }
    let tau = last_bad.map(|n| n + 1).unwrap_or(0);
    (tau <= horizon).then_some(Shadowing { tau, period: k, phase })
}

/// γ(k) = Σ_{n=1}^N w_n f(T^{n+k}x) conj f(Tⁿx) for k = 0..=K, streamed
/// through a window of K+1 values. The weights w_n = (2/N) sin²(π(n−½)/N)
/// sum to 1, so every pure character gives γ(k) exactly, while cross terms
/// between distinct frequencies cancel far faster than with the flat 1/N
/// weights; this keeps the Toeplitz matrix of γ positive semidefinite.
pub fn autocorrelation_spectrum<F, O>(flow: &F, f: &O, x: F::Point, lags: usize, n: usize) -> Vec<Complex64>
where
    F: Flow,
    O: Observable<F::Point> + ?Sized,
{
    let weight = |i: usize| {
        if n == 1 {
            1.0
        } else {
            2.0 / n as f64 * (std::f64::consts::PI * (i as f64 - 0.5) / n as f64).sin().powi(2)
        }
    };
    let mut window: VecDeque<Complex64> = VecDeque::with_capacity(lags + 1);
    let mut acc = vec![KahanSum::new(); lags + 1];
    let mut p = x;
    for m in 1..=n + lags {
        p = flow.step(&p);
        let v = f.eval(&p);
        if window.len() == lags + 1 {
            window.pop_back();
        }
        window.push_front(v);
        // window[k] = f(T^{m−k}x)
        for (k, a) in acc.iter_mut().enumerate().take(window.len()) {
            let base = m - k;
            if base <= n {
                a.add(weight(base) * v * window[k].conj());
            }
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

/// Smallest eigenvalue of the Hermitian Toeplitz matrix [γ(i − j)] with
/// γ(−k) = conj γ(k).
pub fn toeplitz_min_eigenvalue(gamma: &[Complex64]) -> f64 {
    let k = gamma.len();
    let m = DMatrix::from_fn(k, k, |i, j| if i >= j { gamma[i - j] } else { gamma[j - i].conj() });
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn toeplitz_is_psd(gamma: &[Complex64], tol: f64) -> bool {
    toeplitz_min_eigenvalue(gamma) >= -tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookedVerdict {
    /// Every atom lies in the zero set and S_N decays.
    Disjoint,
    /// An atom carries spectrum and S_N does not decay.
    Resonant,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HookedReport {
    /// (atom, |σ_N(−atom)|)
    pub atoms: Vec<(f64, f64)>,
    pub spectrum_avoided: bool,
    pub birkhoff: DisjointnessReport,
    pub verdict: HookedVerdict,
}

/// Checks that the sequence's Cesàro means vanish at the spectral atoms of
/// the observable, then runs the weighted Birkhoff sum. An atom θ of σ_f
/// pairs c_n with e(nθ), which is σ_N at t = −θ.
pub fn hooked_disjointness<F, O>(w: &WeightSequence, flow: &F, f: &O, x: F::Point, atoms: &[f64], checkpoints: &[usize]) -> Result<HookedReport>
where
    F: Flow,
    F::Point: fmt::Debug,
    O: Observable<F::Point> + ?Sized,
{
    let n = *checkpoints.last().ok_or_else(|| Error::InvalidArgument("no checkpoints".into()))?;
    let atoms = atoms
        .iter()
        .map(|&a| Ok((a, cesaro_mean(w, -a, n)?.norm())))
        .collect::<Result<Vec<_>>>()?;
    let spectrum_avoided = atoms.iter().all(|a| a.1 < DECAY_LEVEL);
    let birkhoff = weighted_birkhoff(w, flow, f, x, checkpoints)?;
    let verdict = match (spectrum_avoided, birkhoff.verdict) {
        (true, Verdict::Decaying) => HookedVerdict::Disjoint,
        (false, Verdict::Stagnant(_)) => HookedVerdict::Resonant,
        _ => HookedVerdict::Inconclusive,
    };
    Ok(HookedReport { atoms, spectrum_avoided, birkhoff, verdict })
}

/// Both sides of the Hölder estimate
/// |S_N f(x) − S_N f(y)| ≤ C ((1/N) Σ_{n=1}^N |f(Tⁿx) − f(Tⁿy)|^{λ′})^{1/λ′}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl HolderCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

pub fn holder_check<F, O>(w: &WeightSequence, flow: &F, f: &O, x: &F::Point, y: &F::Point, n: usize) -> Result<HolderCheck>
where
    F: Flow,
    O: Observable<F::Point> + ?Sized,
{
    if n == 0 || n > w.len() {
        return Err(Error::LengthExceeded { requested: n, stored: w.len() });
    }
    let lp = w.lambda() / (w.lambda() - 1.0);
    let (mut a, mut b) = (x.clone(), y.clone());
    let mut sx = KahanSum::new();
    let mut sy = KahanSum::new();
    let mut dev = KahanReal::default();
    for k in 1..=n {
        a = flow.step(&a);
        b = flow.step(&b);
        let (fa, fb) = (f.eval(&a), f.eval(&b));
        sx.add(w.get(k) * fa);
        sy.add(w.get(k) * fb);
        dev.add((fa - fb).norm().powf(lp));
    }
    let lhs = (sx.value() - sy.value()).norm() / n as f64;
    let rhs = w.growth_bound() * (dev.value() / n as f64).powf(1.0 / lp);
    Ok(HolderCheck { lhs, rhs })
}
