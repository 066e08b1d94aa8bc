//! The quadratic family T_t(x) = t − (1+t)x² on [−1, 1]: periodic cycles,
//! the period-doubling cascade, the renormalization operator and the
//! adding-machine coding of the cascade cycles.

use crate::error::{Error, Result};
use crate::flow::{Flow, FlowClass};
use rayon::prelude::*;

pub const CYCLE_TOL: f64 = 1e-10;
pub const MULTIPLIER_TOL: f64 = 1e-7;
pub const NESTING_TOL: f64 = 1e-9;
pub const MAX_PERIOD: usize = 1 << 14;
/// Largest renormalization iterate kept as an explicit polynomial.
pub const MAX_POLY_DEGREE: usize = 32;

const FEIGENBAUM_DELTA: f64 = 4.669_201_609;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticMap {
    t: f64,
}

impl QuadraticMap {
    pub fn new(t: f64) -> Result<Self> {
        if !(-0.5..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [-1/2, 1]")));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// t(1−x)(1+x) − x², exact −1 at both endpoints.
    #[inline]
    pub fn step(&self, x: f64) -> f64 {
        quad_step(self.t, x)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        -2.0 * (1.0 + self.t) * x
    }

    pub fn iterate(&self, mut x: f64, n: usize) -> f64 {
        for _ in 0..n {
            x = self.step(x);
        }
        x
    }

    /// (T^n(x), (T^n)′(x))
    pub fn iterate_with_derivative(&self, mut x: f64, n: usize) -> (f64, f64) {
        let mut d = 1.0;
        for _ in 0..n {
            d *= self.derivative(x);
            x = self.step(x);
        }
        (x, d)
    }

    /// The fixed points −1 and p_t = t/(1+t).
    pub fn fixed_points(&self) -> [f64; 2] {
        fixed_points(self.t)
    }

    pub fn as_poly(&self) -> PolyMap {
        PolyMap::from_coeffs(vec![self.t, 0.0, -(1.0 + self.t)]).expect("quadratic family is quadratic-like")
    }
}

#[inline]
pub fn quad_step(t: f64, x: f64) -> f64 {
    t * ((1.0 - x) * (1.0 + x)) - x * x
}

pub fn fixed_points(t: f64) -> [f64; 2] {
    [-1.0, t / (1.0 + t)]
}

impl Flow for QuadraticMap {
    type Point = f64;

    fn name(&self) -> String {
        format!("quadratic_family(t={})", self.t)
    }

    fn step(&self, x: &f64) -> f64 {
        quad_step(self.t, *x)
    }

    fn dist(&self, x: &f64, y: &f64) -> f64 {
        (x - y).abs()
    }

    fn class(&self) -> FlowClass {
        FlowClass::General
    }
}

/// A periodic orbit, points sorted increasingly.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub t: f64,
    pub period: usize,
    pub points: Vec<f64>,
    /// (T^period)′ at a cycle point
    pub multiplier: f64,
}

impl Cycle {
    fn from_point(map: &QuadraticMap, x: f64, period: usize) -> Self {
        let mut points = Vec::with_capacity(period);
        let mut y = x;
        let mut d = 1.0;
        for _ in 0..period {
            points.push(y);
            d *= map.derivative(y);
            y = map.step(y);
        }
        points.sort_by(f64::total_cmp);
        Self { t: map.t, period, points, multiplier: d }
    }

    pub fn is_attracting(&self) -> bool {
        self.multiplier.abs() < 1.0
    }

    /// The point of the cycle closest to the critical point 0.
    pub fn closest_to_critical(&self) -> f64 {
        *self.points.iter().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap()
    }
}

/// Newton on F(x) = T^P(x) − x. With a sign-changing bracket the iteration
/// falls back to bisection whenever a step leaves the bracket.
fn periodic_root(map: &QuadraticMap, x0: f64, period: usize, bracket: Option<(f64, f64)>) -> Option<f64> {
    let f = |x: f64| {
        let (y, d) = map.iterate_with_derivative(x, period);
        (y - x, d - 1.0)
    };
    let mut x = x0;
    let mut br = bracket.map(|(a, b)| {
        let fa = f(a).0;
        if fa < 0.0 {
            (a, b)
        } else {
            (b, a)
        }
    });
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx.abs() < 1e-15 {
            return Some(x);
        }
        if let Some((neg, pos)) = br.as_mut() {
            if fx < 0.0 {
                *neg = x;
            } else {
                *pos = x;
            }
        }
        let mut next = x - fx / dfx;
        if let Some((neg, pos)) = br {
            let (lo, hi) = if neg < pos { (neg, pos) } else { (pos, neg) };
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (hi - lo).abs() < 1e-16 {
                return Some(next);
            }
        }
        if !next.is_finite() || next.abs() > 1.0 {
            return None;
        }
        if (next - x).abs() < 1e-16 {
            return Some(next);
        }
        x = next;
    }
    let (fx, _) = f(x);
    (fx.abs() < CYCLE_TOL).then_some(x)
}

fn transient_point(map: &QuadraticMap, period: usize) -> f64 {
    map.iterate(0.0, (400 * period).clamp(20_000, 4_000_000))
}

fn has_exact_period(map: &QuadraticMap, x: f64, period: usize) -> bool {
    let back = map.iterate(x, period);
    if (back - x).abs() > CYCLE_TOL {
        return false;
    }
    period == 1 || (map.iterate(x, period / 2) - x).abs() > 1e-7
}

/// A point of the 2^k-cycle, descending from the attracting cycle: every
/// cascade cycle point lies between the two points of its child cycle that
/// T^period exchanges.
fn cycle_point(map: &QuadraticMap, period: usize, start: f64, limit: usize) -> Option<f64> {
    let y = map.iterate(start, period);
    let (fs, fy) = (y - start, map.iterate(y, period) - y);
    let bracket = (fs * fy < 0.0).then_some((start, y));
    if let Some(r) = periodic_root(map, start, period, bracket) {
        if has_exact_period(map, r, period) {
            return Some(r);
        }
    }
    if 2 * period > limit {
        return None;
    }
    let child = cycle_point(map, 2 * period, start, limit)?;
    let partner = map.iterate(child, period);
    let r = periodic_root(map, 0.5 * (child + partner), period, Some((child, partner)))?;
    has_exact_period(map, r, period).then_some(r)
}

/// The cycle of period 2ⁿ of T_t (attracting or not), for t below the
/// accumulation of the cascade.
pub fn find_cycle(t: f64, period: usize) -> Result<Cycle> {
    let map = QuadraticMap::new(t)?;
    if period == 0 || !period.is_power_of_two() || period > MAX_PERIOD {
        return Err(Error::InvalidArgument(format!("period {period} must be a power of two <= {MAX_PERIOD}")));
    }
    if period == 1 {
        return Ok(Cycle::from_point(&map, fixed_points(t)[1], 1));
    }
    let start = transient_point(&map, period);
    let x = cycle_point(&map, period, start, (4 * period).max(1 << 16)).ok_or(Error::NoCycle { t, period })?;
    Ok(Cycle::from_point(&map, x, period))
}

/// Parameter where 0 is periodic of exact period 2^k (superstable cycle).
pub fn superstable_parameters(k_max: usize) -> Result<Vec<f64>> {
    let mut s = vec![0.0, (5f64.sqrt() - 1.0) / 2.0];
    for k in 2..=k_max {
        let (a, b) = (s[k - 1], s[k - 2]);
        let mut t = a + (a - b) / FEIGENBAUM_DELTA;
        let p = 1usize << k;
        let mut ok = false;
        for _ in 0..100 {
            let (mut x, mut dx) = (0.0f64, 0.0f64);
            for _ in 0..p {
                dx = 1.0 - x * x - 2.0 * (1.0 + t) * x * dx;
                x = quad_step(t, x);
            }
            let step = x / dx;
            t -= step;
            if step.abs() < 1e-16 * t.abs().max(1.0) {
                ok = true;
                break;
            }
        }
        if !ok && (QuadraticMap { t }).iterate(0.0, p).abs() > 1e-12 {
            return Err(Error::BisectionFailed(format!("superstable parameter of period {p} did not converge")));
        }
        if !(t > a && t < 1.0) {
            return Err(Error::BisectionFailed(format!("superstable parameter of period {p} left the cascade window")));
        }
        s.push(t);
    }
    s.truncate(k_max + 1);
    Ok(s)
}

/// Multiplier of the 2^k-cycle at t.
pub fn cycle_multiplier(t: f64, period: usize) -> Result<f64> {
    Ok(find_cycle(t, period)?.multiplier)
}

/// One cascade parameter: the 2^{n−1}-cycle multiplier crosses −1 between
/// consecutive superstable parameters.
fn cascade_point(n: usize, lo: f64, hi: f64) -> Result<f64> {
    let period = 1usize << (n - 1);
    if n == 1 {
        // multiplier −2t
        return Ok(0.5);
    }
    let g = |t: f64| cycle_multiplier(t, period).map(|m| m + 1.0);
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let m = cycle_multiplier(t, period)?;
    if (m + 1.0).abs() > MULTIPLIER_TOL * 100.0 {
        return Err(Error::BisectionFailed(format!("multiplier {m} at t_{n} = {t}")));
    }
    Ok(t)
}

/// t_1 < … < t_{n_max}: t_n is where the 2^{n−1}-cycle has multiplier −1.
pub fn cascade(n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 || n_max > 12 {
        return Err(Error::InvalidArgument(format!("cascade depth {n_max} outside 1..=12")));
    }
    let s = superstable_parameters(n_max)?;
    let ts = (1..=n_max).into_par_iter().map(|n| cascade_point(n, s[n - 1], s[n])).collect::<Result<Vec<_>>>()?;
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BisectionFailed("cascade is not increasing".into()));
    }
    Ok(ts)
}

/// (t_n − t_{n−1})/(t_{n+1} − t_n) for consecutive triples, with t_0 = −1/2.
pub fn cascade_ratios(ts: &[f64]) -> Vec<f64> {
    let mut all = vec![-0.5];
    all.extend_from_slice(ts);
    all.windows(3).map(|w| (w[1] - w[0]) / (w[2] - w[1])).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeigenbaumEstimate {
    pub t_inf: f64,
    pub error: f64,
    pub delta: f64,
    pub cascade: Vec<f64>,
}

fn extrapolate(ts: &[f64]) -> (f64, f64) {
    let n = ts.len();
    let delta = (ts[n - 2] - ts[n - 3]) / (ts[n - 1] - ts[n - 2]);
    (ts[n - 1] + (ts[n - 1] - ts[n - 2]) / (delta - 1.0), delta)
}

/// Geometric extrapolation of the cascade; the error bar is the spread of
/// the last two extrapolations.
pub fn feigenbaum_parameter(n_max: usize) -> Result<FeigenbaumEstimate> {
    if n_max < 4 {
        return Err(Error::InvalidArgument(format!("cascade depth {n_max} < 4 is insufficient")));
    }
    let ts = cascade(n_max)?;
    let (t_inf, delta) = extrapolate(&ts);
    let (prev, _) = extrapolate(&ts[..n_max - 1]);
    Ok(FeigenbaumEstimate { t_inf, error: (t_inf - prev).abs(), delta, cascade: ts })
}

/// A quadratic-like map of [−1, 1]: an explicit polynomial, or grid values
/// with cubic interpolation once composition degrees grow too large.
#[derive(Debug, Clone, PartialEq)]
pub enum PolyMap {
    Poly(Vec<f64>),
    Grid { values: Vec<f64>, error: f64 },
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(i, &a)| i as f64 * a).collect()
}

/// f ∘ g
fn poly_compose(f: &[f64], g: &[f64]) -> Vec<f64> {
    let mut acc = vec![*f.last().unwrap()];
    for &a in f.iter().rev().skip(1) {
        acc = poly_mul(&acc, g);
        acc[0] += a;
    }
    acc
}

const GRID_SIZE: usize = 4097;

fn grid_x(i: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (GRID_SIZE - 1) as f64
}

fn grid_eval(v: &[f64], x: f64) -> f64 {
    let h = 2.0 / (GRID_SIZE - 1) as f64;
    let s = ((x + 1.0) / h).clamp(0.0, (GRID_SIZE - 1) as f64);
    let i = (s.floor() as usize).clamp(1, GRID_SIZE - 3);
    let u = s - i as f64;
    let (p0, p1, p2, p3) = (v[i - 1], v[i], v[i + 1], v[i + 2]);
    // 4-point Lagrange on nodes −1, 0, 1, 2
    -p0 * u * (u - 1.0) * (u - 2.0) / 6.0 + p1 * (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0
        - p2 * (u + 1.0) * u * (u - 2.0) / 2.0
        + p3 * (u + 1.0) * u * (u - 1.0) / 6.0
}

impl PolyMap {
    /// Validates T(−1) = T(1) = −1 within 1e−9 and a unique interior critical
    /// point.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        let m = PolyMap::Poly(coeffs);
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        for x in [-1.0, 1.0] {
            let v = self.eval(x);
            if (v + 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("T({x}) = {v}, expected -1")));
            }
        }
        let n = 2048;
        let mut changes = 0;
        let mut prev = self.eval(-1.0 + 2.0 / n as f64) - self.eval(-1.0);
        for i in 1..n {
            let d = self.eval(-1.0 + 2.0 * (i + 1) as f64 / n as f64) - self.eval(-1.0 + 2.0 * i as f64 / n as f64);
            if d * prev < 0.0 {
                changes += 1;
            }
            if d != 0.0 {
                prev = d;
            }
        }
        if changes != 1 {
            return Err(Error::InvalidArgument(format!("{changes} interior turning points, expected 1")));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PolyMap::Poly(c) => poly_eval(c, x),
            PolyMap::Grid { values, .. } => grid_eval(values, x),
        }
    }

    pub fn coeffs(&self) -> Option<&[f64]> {
        match self {
            PolyMap::Poly(c) => Some(c),
            PolyMap::Grid { .. } => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs().map(|c| c.len() - 1)
    }

    /// Tracked sup-norm interpolation error (0 for explicit polynomials).
    pub fn error(&self) -> f64 {
        match self {
            PolyMap::Poly(_) => 0.0,
            PolyMap::Grid { error, .. } => *error,
        }
    }

    /// The fixed point β ∈ (0, 1).
    pub fn positive_fixed_point(&self) -> Result<f64> {
        let g = |x: f64| self.eval(x) - x;
        let (mut lo, mut hi) = (0.0, 1.0);
        if g(lo) <= 0.0 || g(hi) >= 0.0 {
            return Err(Error::NoPositiveFixedPoint);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// sup |self − other| on an n-point uniform grid.
    pub fn sup_distance(&self, other: &PolyMap, n: usize) -> f64 {
        (0..n)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                (self.eval(x) - other.eval(x)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// S(T)(x) = T‴/T′ − (3/2)(T″/T′)² by exact polynomial differentiation.
pub fn schwarzian(map: &PolyMap, x: f64) -> Result<f64> {
    let c = map
        .coeffs()
        .ok_or_else(|| Error::InvalidArgument("Schwarzian needs an explicit polynomial".into()))?;
    let d1 = poly_derivative(c);
    let d2 = poly_derivative(&d1);
    let d3 = poly_derivative(&d2);
    let (a, b, cc) = (poly_eval(&d1, x), poly_eval(&d2, x), poly_eval(&d3, x));
    if a.abs() < 1e-300 {
        return Err(Error::CriticalPoint(x));
    }
    Ok(cc / a - 1.5 * (b / a).powi(2))
}

/// ℛ(T)(x) = −β⁻¹T²(−βx) with β the positive fixed point of T.
pub fn renormalize(map: &PolyMap) -> Result<PolyMap> {
    let beta = map.positive_fixed_point()?;
    match map {
        PolyMap::Poly(c) if (c.len() - 1).pow(2) <= MAX_POLY_DEGREE => {
            let inner: Vec<f64> = c.iter().enumerate().map(|(i, &a)| a * (-beta).powi(i as i32)).collect();
            let out: Vec<f64> = poly_compose(c, &inner).into_iter().map(|a| -a / beta).collect();
            Ok(PolyMap::Poly(out))
        }
        _ => {
            let f = |x: f64| -map.eval(map.eval(-beta * x)) / beta;
            let values: Vec<f64> = (0..GRID_SIZE).map(|i| f(grid_x(i))).collect();
            // interpolation error at midpoints, plus inherited error amplified
            // by the composition
            let h = 2.0 / (GRID_SIZE - 1) as f64;
            let interp = (0..GRID_SIZE - 1)
                .map(|i| {
                    let x = grid_x(i) + 0.5 * h;
                    (grid_eval(&values, x) - f(x)).abs()
                })
                .fold(0.0, f64::max);
            let lip = (0..GRID_SIZE - 1).map(|i| (map.eval(grid_x(i + 1)) - map.eval(grid_x(i))).abs() / h).fold(0.0, f64::max);
            let error = interp + map.error() * (1.0 + lip) / beta;
            Ok(PolyMap::Grid { values, error })
        }
    }
}

/// Word permutation induced by a cascade cycle on its nested partition.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingReport {
    pub depth: usize,
    /// Cycle points in increasing order.
    pub points: Vec<f64>,
    /// words[i] is the n-digit word of points[i], least significant digit
    /// first, as an integer.
    pub words: Vec<u32>,
    /// map[w] = word of T(x_w)
    pub map: Vec<u32>,
    /// Smallest gap separating sibling blocks.
    pub min_gap: f64,
    pub adding_machine: bool,
}

impl CodingReport {
    pub fn word_string(&self, w: u32) -> String {
        (0..self.depth).map(|k| if w >> k & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// `word,image` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("word,image\n");
        for (w, &v) in self.map.iter().enumerate() {
            s.push_str(&format!("{},{}\n", self.word_string(w as u32), self.word_string(v)));
        }
        s
    }
}

/// Codes a cycle given as points in increasing order plus succ[i] = index of
/// T(points[i]). Blocks at level k are contiguous runs of 2^{n−k} sorted
/// points; the digit at level k is 0 on the child holding the parent's first
/// visit by the orbit of the point closest to 0.
pub fn code_cycle(points: &[f64], succ: &[usize], tol: f64) -> Result<CodingReport> {
    let m = points.len();
    if !m.is_power_of_two() || succ.len() != m {
        return Err(Error::InvalidArgument("cycle length must be a power of two".into()));
    }
    let depth = m.trailing_zeros() as usize;
    let x0 = (0..m).min_by(|&a, &b| points[a].abs().total_cmp(&points[b].abs())).unwrap();
    let mut time = vec![usize::MAX; m];
    let mut i = x0;
    for j in 0..m {
        if time[i] != usize::MAX {
            return Err(Error::InvalidArgument("successor map is not a single cycle".into()));
        }
        time[i] = j;
        i = succ[i];
    }
    let mut words = vec![0u32; m];
    let mut min_gap = f64::INFINITY;
    for k in 0..depth {
        let size = m >> k;
        for block in (0..m).step_by(size) {
            let half = size / 2;
            let gap = points[block + half] - points[block + half - 1];
            min_gap = min_gap.min(gap);
            if gap < tol {
                return Err(Error::AmbiguousNesting(tol));
            }
            let first = (block..block + size).min_by_key(|&i| time[i]).unwrap();
            let first_in_left = first < block + half;
            for (idx, w) in words.iter_mut().enumerate().skip(block).take(size) {
                let in_left = idx < block + half;
                if in_left != first_in_left {
                    *w |= 1 << k;
                }
            }
        }
    }
    let mut map = vec![0u32; m];
    for i in 0..m {
        map[words[i] as usize] = words[succ[i]];
    }
    let adding_machine = map.iter().enumerate().all(|(w, &v)| v as usize == (w + 1) % m);
    Ok(CodingReport { depth, points: points.to_vec(), words, map, min_gap, adding_machine })
}

/// Codes the 2ⁿ-cycle of T_t.
pub fn attractor_coding(t: f64, depth: usize) -> Result<CodingReport> {
    attractor_coding_with_tol(t, depth, NESTING_TOL)
}

pub fn attractor_coding_with_tol(t: f64, depth: usize, tol: f64) -> Result<CodingReport> {
    let cycle = find_cycle(t, 1 << depth)?;
    let map = QuadraticMap::new(t)?;
    let pts = &cycle.points;
    let succ: Vec<usize> = pts
        .iter()
        .map(|&x| {
            let y = map.step(x);
            let i = pts.partition_point(|&p| p < y);
            let cands = [i.saturating_sub(1), i.min(pts.len() - 1)];
            *cands.iter().min_by(|&&a, &&b| (pts[a] - y).abs().total_cmp(&(pts[b] - y).abs())).unwrap()
        })
        .collect();
    code_cycle(pts, &succ, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinReport {
    pub period: usize,
    /// The attracting cycle in orbit order starting at the synchronized phase.
    pub cycle: Vec<f64>,
    /// (N, (1/N)Σ_{n<N}|Tⁿx − Tⁿz|) at geometric checkpoints and at N.
    pub trace: Vec<(usize, f64)>,
}

impl BasinReport {
    pub fn final_trace(&self) -> f64 {
        self.trace.last().map(|p| p.1).unwrap_or(0.0)
    }
}

/// Which periodic orbit attracts x under T_t, with the Cesàro distance trace
/// to the best-synchronized cycle point.
pub fn basin_probe(t: f64, x: f64, n: usize) -> Result<BasinReport> {
    let map = QuadraticMap::new(t)?;
    if !(-1.0..=1.0).contains(&x) || n == 0 {
        return Err(Error::InvalidArgument(format!("x = {x} outside [-1, 1] or N = 0")));
    }
    let tail = map.iterate(x, n);
    let mut period = 0;
    let mut q = 1;
    while q <= MAX_PERIOD {
        if (map.iterate(tail, q) - tail).abs() < 1e-8 {
            period = q;
            break;
        }
        q *= 2;
    }
    if period == 0 {
        return Err(Error::NoConvergence(n));
    }
    let mut cycle = Vec::with_capacity(period);
    let mut y = tail;
    for _ in 0..period {
        cycle.push(y);
        y = map.step(y);
    }
    // tail = T^n x sits at cycle[0], so z = cycle[(period − n mod period) mod period]
    // is synchronized with x; check every phase anyway
    let traces: Vec<(usize, Vec<(usize, f64)>)> = (0..period)
        .into_par_iter()
        .map(|phase| {
            let (mut a, mut b) = (x, cycle[phase]);
            let mut sum = 0.0;
            let mut out = Vec::new();
            let mut next = 10usize;
            for k in 1..=n {
                sum += (a - b).abs();
                a = map.step(a);
                b = map.step(b);
                if k == next || k == n {
                    out.push((k, sum / k as f64));
                    next *= 10;
                }
            }
            (phase, out)
        })
        .collect();
    let (best, trace) = traces
        .into_iter()
        .min_by(|a, b| a.1.last().unwrap().1.total_cmp(&b.1.last().unwrap().1))
        .unwrap();
    cycle.rotate_left(best);
    Ok(BasinReport { period, cycle, trace })
}
