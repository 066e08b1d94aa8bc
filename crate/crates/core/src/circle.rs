//! Circle rotations and a Denjoy homeomorphism with one wandering orbit of
//! gaps, built so that its semi-conjugacy to the rotation is explicit.

use crate::error::{Error, Result};
use crate::flow::{Flow, FlowClass};
use crate::numeric::{circle_dist, frac, frac_mul, KahanReal};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// x ↦ x + ρ mod 1 with the arc-length metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationFlow {
    pub rho: f64,
}

pub fn rotation_flow(rho: f64) -> Result<RotationFlow> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rotation {rho} outside [0, 1)")));
    }
    Ok(RotationFlow { rho })
}

impl RotationFlow {
    /// Rⁿ(x) without accumulated rounding.
    pub fn orbit_point(&self, x: f64, n: u64) -> f64 {
        frac(x + frac_mul(n as f64, self.rho))
    }
}

impl Flow for RotationFlow {
    type Point = f64;

    fn name(&self) -> String {
        format!("rotation(rho={})", self.rho)
    }

    fn step(&self, x: &f64) -> f64 {
        frac(x + self.rho)
    }

    fn dist(&self, x: &f64, y: &f64) -> f64 {
        circle_dist(*x, *y)
    }

    fn class(&self) -> FlowClass {
        FlowClass::Isometric
    }
}

/// A degree-one circle map given by a lift F: [0, 1) → ℝ, extended by
/// F(x + k) = F(x) + k.
pub trait CircleMap {
    fn lift(&self, x: f64) -> f64;
}

impl CircleMap for RotationFlow {
    fn lift(&self, x: f64) -> f64 {
        x + self.rho
    }
}

/// g⁻¹ ∘ R_ρ ∘ g with g(x) = x + a sin(2πx)/(2π), |a| < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatedRotation {
    pub rho: f64,
    pub a: f64,
}

impl ConjugatedRotation {
    fn g(&self, x: f64) -> f64 {
        x + self.a * (2.0 * PI * x).sin() / (2.0 * PI)
    }

    fn g_inv(&self, y: f64) -> f64 {
        let mut x = y;
        for _ in 0..60 {
            let step = (self.g(x) - y) / (1.0 + self.a * (2.0 * PI * x).cos());
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x
    }
}

impl CircleMap for ConjugatedRotation {
    fn lift(&self, x: f64) -> f64 {
        self.g_inv(self.g(x) + self.rho)
    }
}

/// (F^N(x₀) − x₀)/N, after checking that the lift is nondecreasing with
/// F(1⁻) ≤ F(0) + 1 on a sample grid.
pub fn rotation_number<M: CircleMap + ?Sized>(map: &M, x0: f64, n: usize) -> Result<f64> {
    const SAMPLES: usize = 4096;
    let first = map.lift(0.0);
    let mut prev = first;
    for i in 1..SAMPLES {
        let x = i as f64 / SAMPLES as f64;
        let v = map.lift(x);
        if v < prev - 1e-12 {
            return Err(Error::NonMonotone(x));
        }
        prev = v;
    }
    if prev > first + 1.0 + 1e-12 {
        return Err(Error::NonMonotone(1.0));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N = 0".into()));
    }
    let mut y = x0;
    for _ in 0..n {
        let k = y.floor();
        y = map.lift(y - k) + k;
    }
    Ok((y - x0) / n as f64)
}

/// Σ_{n∈ℤ} 1/(n²+2) = (π/√2) coth(π√2).
fn full_sum() -> f64 {
    let s = PI * 2f64.sqrt();
    s / 2.0 / s.tanh()
}

/// Normalizing constant c with Σ_{n∈ℤ} c/(n²+2) = 1.
pub fn gap_constant() -> f64 {
    1.0 / full_sum()
}

/// Upper bound on the mass of the gaps beyond the truncation:
/// Σ_{|n|>N} c/(n²+2) ≤ 2c/(N−1).
pub fn tail_bound(trunc: usize) -> f64 {
    2.0 * gap_constant() / (trunc as f64 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// An endpoint of the gap I_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub n: i64,
    pub side: Side,
}

impl Endpoint {
    pub fn left(n: i64) -> Self {
        Self { n, side: Side::Left }
    }

    pub fn right(n: i64) -> Self {
        Self { n, side: Side::Right }
    }
}

/// The Denjoy map with gaps I_n = [H(x_n), H(x_n) + ℓ_n), x_n = {nρ},
/// ℓ_n = c/(n²+2), kept for |n| ≤ N. The mass of the discarded gaps is spread
/// uniformly, so H(y) = m·y + Σ_{x_n<y} ℓ_n with m = 1 − Σ_{|n|≤N} ℓ_n.
#[derive(Debug, Clone, PartialEq)]
pub struct DenjoyMap {
    rho: f64,
    trunc: i64,
    c: f64,
    tail_mass: f64,
    // table sorted by x_n
    sx: Vec<f64>,
    sl: Vec<f64>,
    sh: Vec<f64>,
    sn: Vec<i64>,
    // prefix[i] = Σ_{j<i} sl[j]
    prefix: Vec<f64>,
    // rank[n + N] = sorted position of index n
    rank: Vec<usize>,
}

/// Builds the map; N ≥ 1000.
pub fn build_denjoy(rho: f64, trunc: usize) -> Result<DenjoyMap> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rotation number {rho} outside (0, 1)")));
    }
    if trunc < 1000 {
        return Err(Error::InvalidArgument(format!("truncation {trunc} < 1000")));
    }
    let c = gap_constant();
    let n = trunc as i64;
    let mut rows: Vec<(f64, f64, i64)> =
        (-n..=n).map(|k| (frac_mul(k as f64, rho), c / ((k * k) as f64 + 2.0), k)).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    if let Some(w) = rows.windows(2).find(|w| w[1].0 - w[0].0 < 1e-15) {
        return Err(Error::InvalidArgument(format!(
            "x_{} and x_{} coincide: rotation number looks rational at this truncation",
            w[0].2, w[1].2
        )));
    }
    let mut mass = KahanReal::default();
    for r in &rows {
        mass.add(r.1);
    }
    let tail_mass = 1.0 - mass.value();
    let mut prefix = Vec::with_capacity(rows.len() + 1);
    let mut acc = KahanReal::default();
    prefix.push(0.0);
    for r in &rows {
        acc.add(r.1);
        prefix.push(acc.value());
    }
    let sh: Vec<f64> = rows.iter().zip(&prefix).map(|(r, p)| tail_mass * r.0 + p).collect();
    let mut rank = vec![0; rows.len()];
    for (i, r) in rows.iter().enumerate() {
        rank[(r.2 + n) as usize] = i;
    }
    Ok(DenjoyMap {
        rho,
        trunc: n,
        c,
        tail_mass,
        sx: rows.iter().map(|r| r.0).collect(),
        sl: rows.iter().map(|r| r.1).collect(),
        sh,
        sn: rows.iter().map(|r| r.2).collect(),
        prefix,
        rank,
    })
}

/// Builds the map and refuses evaluation accuracies finer than the tail.
pub fn build_denjoy_with_accuracy(rho: f64, trunc: usize, accuracy: f64) -> Result<DenjoyMap> {
    let tail = tail_bound(trunc);
    if accuracy < tail {
        return Err(Error::AccuracyBelowTail { requested: accuracy, tail });
    }
    build_denjoy(rho, trunc)
}

impl DenjoyMap {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn trunc(&self) -> usize {
        self.trunc as usize
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn tail_bound(&self) -> f64 {
        tail_bound(self.trunc as usize)
    }

    /// 1 − Σ_{|n|≤N} ℓ_n.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn gap_mass(&self) -> f64 {
        self.prefix[self.sl.len()]
    }

    fn check(&self, n: i64) -> Result<usize> {
        if n.abs() > self.trunc {
            return Err(Error::OutsideTruncation { index: n, trunc: self.trunc });
        }
        Ok(self.rank[(n + self.trunc) as usize])
    }

    pub fn length(&self, n: i64) -> Result<f64> {
        Ok(self.sl[self.check(n)?])
    }

    pub fn x(&self, n: i64) -> Result<f64> {
        Ok(self.sx[self.check(n)?])
    }

    /// The gap I_n as [left, right).
    pub fn gap(&self, n: i64) -> Result<(f64, f64)> {
        let i = self.check(n)?;
        Ok((self.sh[i], self.sh[i] + self.sl[i]))
    }

    pub fn endpoint(&self, e: Endpoint) -> Result<f64> {
        let (l, r) = self.gap(e.n)?;
        Ok(match e.side {
            Side::Left => l,
            Side::Right => r,
        })
    }

    /// H(y) = m·y + Σ_{x_n<y} ℓ_n, the left end of the gap when y = x_n.
    pub fn big_h(&self, y: f64) -> f64 {
        let y = frac(y);
        let i = self.sx.partition_point(|&x| x < y);
        self.tail_mass * y + self.prefix[i]
    }

    /// The gap containing z, as a sorted position.
    fn locate(&self, z: f64) -> (usize, bool) {
        let i = self.sh.partition_point(|&h| h <= z).max(1) - 1;
        (i, z < self.sh[i] + self.sl[i])
    }

    /// The semi-conjugacy h: collapses each gap I_n to x_n.
    pub fn h(&self, z: f64) -> f64 {
        let z = frac(z);
        let (i, inside) = self.locate(z);
        if inside {
            return self.sx[i];
        }
        let hi = self.sx.get(i + 1).copied().unwrap_or(1.0);
        ((z - self.prefix[i + 1]) / self.tail_mass).clamp(self.sx[i], hi)
    }

    /// Lift of T on [0, 1): the gap I_n maps affinely onto I_{n+1}, the last
    /// stored gap collapses to H(x_{N+1}), and elsewhere T = H ∘ R_ρ ∘ h.
    pub fn lift_value(&self, z: f64) -> f64 {
        let (i, inside) = self.locate(z);
        let y = if inside { self.sx[i] } else { self.h(z) };
        let wrap = (y + self.rho).floor();
        let n = self.sn[i];
        // on the closure of a stored gap, follow the affine branch so that the
        // right endpoint lands on the right endpoint of the image gap
        if n < self.trunc && (inside || y <= self.sx[i]) {
            let j = self.rank[(n + 1 + self.trunc) as usize];
            let t = if inside { (z - self.sh[i]) / self.sl[i] } else { 1.0 };
            let wrap = if self.sx[j] < self.sx[i] { 1.0 } else { 0.0 };
            return self.sh[j] + t * self.sl[j] + wrap;
        }
        self.big_h(y + self.rho - wrap) + wrap
    }

    pub fn step(&self, z: f64) -> f64 {
        frac(self.lift_value(z))
    }

    /// The endpoint (n, side) moved k steps: (n + k, side).
    pub fn symbolic_orbit(&self, e: Endpoint, k: i64) -> Result<Endpoint> {
        self.check(e.n)?;
        let m = e.n + k;
        self.check(m)?;
        Ok(Endpoint { n: m, side: e.side })
    }

    /// Sorted gap table as CSV `n,x_n,H_x_n,ell_n`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,x_n,H_x_n,ell_n\n");
        for i in 0..self.sx.len() {
            writeln!(s, "{},{:?},{:?},{:?}", self.sn[i], self.sx[i], self.sh[i], self.sl[i]).unwrap();
        }
        s
    }

    /// Rebuilds a map from its CSV table and checks the stored rows.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("n,x_n,H_x_n,ell_n") {
            return Err(Error::Parse("missing gap table header".into()));
        }
        let mut rows = Vec::new();
        for (ln, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", ln + 2));
            if f.len() != 4 {
                return Err(bad("field count"));
            }
            let n: i64 = f[0].trim().parse().map_err(|_| bad("n"))?;
            let vals: Vec<f64> = f[1..].iter().map(|v| v.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("number"))?;
            rows.push((n, vals[0], vals[1], vals[2]));
        }
        let trunc = rows.iter().map(|r| r.0.unsigned_abs()).max().ok_or_else(|| Error::Parse("empty gap table".into()))?;
        let rho = rows.iter().find(|r| r.0 == 1).map(|r| r.1).ok_or_else(|| Error::Parse("row n = 1 missing".into()))?;
        let d = build_denjoy(rho, trunc as usize)?;
        if rows.len() != d.sx.len() {
            return Err(Error::Parse(format!("expected {} rows, found {}", d.sx.len(), rows.len())));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.0 != d.sn[i] || r.1 != d.sx[i] || (r.2 - d.sh[i]).abs() > 1e-15 || r.3 != d.sl[i] {
                return Err(Error::Parse(format!("row {} does not match the rebuilt table", i + 2)));
            }
        }
        Ok(d)
    }
}

impl CircleMap for DenjoyMap {
    fn lift(&self, x: f64) -> f64 {
        self.lift_value(x)
    }
}

impl Flow for DenjoyMap {
    type Point = f64;

    fn name(&self) -> String {
        format!("denjoy(rho={},trunc={})", self.rho, self.trunc)
    }

    fn step(&self, x: &f64) -> f64 {
        DenjoyMap::step(self, *x)
    }

    fn dist(&self, x: &f64, y: &f64) -> f64 {
        circle_dist(*x, *y)
    }
}

/// Two Λ-endpoints closer than δ whose k-th images are ℓ_0 apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquicontinuityWitness {
    pub a: Endpoint,
    pub b: Endpoint,
    pub k: i64,
    pub initial: f64,
    pub after: f64,
}

/// Endpoints of the first gap I_{−k} shorter than δ; T^k sends them to the
/// endpoints of I_0.
pub fn non_equicontinuity_witness(d: &DenjoyMap, delta: f64) -> Result<EquicontinuityWitness> {
    let k = (1..=d.trunc)
        .find(|&k| d.length(-k).map(|l| l < delta).unwrap_or(false))
        .ok_or(Error::AccuracyBelowTail { requested: delta, tail: d.length(-d.trunc)? })?;
    let (a, b) = (Endpoint::left(-k), Endpoint::right(-k));
    let initial = circle_dist(d.endpoint(a)?, d.endpoint(b)?);
    let (ta, tb) = (d.symbolic_orbit(a, k)?, d.symbolic_orbit(b, k)?);
    let after = circle_dist(d.endpoint(ta)?, d.endpoint(tb)?);
    Ok(EquicontinuityWitness { a, b, k, initial, after })
}

/// Upper density over k = 1..=M of {k : d(T^k x, T^k y) ≥ ε}, computed by
/// index shifts on the gap table.
pub fn mls_density_on_lambda(d: &DenjoyMap, x: Endpoint, y: Endpoint, eps: f64, horizon: usize) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    let m = horizon as i64;
    d.symbolic_orbit(x, m)?;
    d.symbolic_orbit(y, m)?;
    let mut bad = 0usize;
    for k in 1..=m {
        let dist = circle_dist(d.endpoint(d.symbolic_orbit(x, k)?)?, d.endpoint(d.symbolic_orbit(y, k)?)?);
        if dist >= eps {
            bad += 1;
        }
    }
    Ok(bad as f64 / horizon as f64)
}

/// Closeness threshold for MLS at ε: big gaps are those with |n| ≤ N₀ where
/// the tail beyond N₀ is below ε/2, and pairs with
/// (2N₀+1)|h(x) − h(y)| < ε/2 straddle a big gap at a density below ε/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlsRecipe {
    pub eps: f64,
    pub n0: usize,
    pub delta_h: f64,
}

pub fn mls_recipe(d: &DenjoyMap, eps: f64) -> Result<MlsRecipe> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} outside (0, 1)")));
    }
    let n0 = (2..=d.trunc as usize).find(|&n| tail_bound(n) < eps / 2.0).ok_or(Error::AccuracyBelowTail {
        requested: eps / 2.0,
        tail: d.tail_bound(),
    })?;
    Ok(MlsRecipe { eps, n0, delta_h: eps / (2.0 * (2 * n0 + 1) as f64) })
}

/// `count` pairs of endpoints of neighbouring gaps with |h(x) − h(y)| < δ_h
/// whose orbits stay inside the truncation for `horizon` steps.
pub fn close_endpoint_pairs(d: &DenjoyMap, delta_h: f64, count: usize, horizon: usize, seed: u64) -> Vec<(Endpoint, Endpoint)> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let limit = d.trunc - horizon as i64;
    let mut cands: Vec<(i64, i64)> = (0..d.sx.len() - 1)
        .filter(|&i| d.sx[i + 1] - d.sx[i] < delta_h && d.sn[i] <= limit && d.sn[i + 1] <= limit)
        .map(|i| (d.sn[i], d.sn[i + 1]))
        .collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    cands.shuffle(&mut rng);
    cands
        .into_iter()
        .take(count)
        .map(|(a, b)| {
            let side = |r: bool| if r { Side::Right } else { Side::Left };
            (Endpoint { n: a, side: side(rng.gen()) }, Endpoint { n: b, side: side(rng.gen()) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::orbit;
    use crate::numeric::star_discrepancy;
    use rand::{Rng, SeedableRng};

    const RHO: f64 = std::f64::consts::SQRT_2 - 1.0;

    #[test]
    fn rotation_examples() {
        let id = rotation_flow(0.0).unwrap();
        assert_eq!(id.step(&0.37), 0.37);
        let r = rotation_flow(1.0 / 3.0).unwrap();
        let pts = orbit(&r, 0.1, 3).points;
        assert!(circle_dist(pts[3], 0.1) < 1e-15);
        let g = rotation_flow(RHO).unwrap();
        let pts: Vec<f64> = (0..100_000).map(|n| g.orbit_point(0.0, n)).collect();
        assert!(star_discrepancy(&pts) < 0.01);
        assert!(rotation_flow(1.0).is_err());
    }

    #[test]
    fn rotation_numbers() {
        let r = rotation_flow(RHO).unwrap();
        assert!((rotation_number(&r, 0.2, 1000).unwrap() - RHO).abs() < 1e-3);
        let c = ConjugatedRotation { rho: RHO, a: 0.6 };
        assert!((rotation_number(&c, 0.0, 100_000).unwrap() - RHO).abs() < 1e-3);
        struct Folded;
        impl CircleMap for Folded {
            fn lift(&self, x: f64) -> f64 {
                (2.0 * PI * x).sin() * 0.1 + x * 0.0
            }
        }
        assert!(matches!(rotation_number(&Folded, 0.0, 10), Err(Error::NonMonotone(_))));
    }

    #[test]
    fn constant_normalizes_lengths() {
        let c = gap_constant();
        let mut s = KahanReal::default();
        for n in -1_000_000i64..=1_000_000 {
            s.add(c / ((n * n) as f64 + 2.0));
        }
        assert!((s.value() - 1.0).abs() < 2.0 * tail_bound(1_000_000));
    }

    #[test]
    fn build_invariants() {
        let d = build_denjoy(RHO, 2000).unwrap();
        let mass = d.gap_mass();
        assert!(mass > 1.0 - d.tail_bound() && mass <= 1.0);
        assert!((mass + d.tail_mass() - 1.0).abs() < 1e-15);
        assert!(d.tail_mass() <= d.tail_bound());
        let (l0, r0) = d.gap(0).unwrap();
        let (l1, r1) = d.gap(1).unwrap();
        assert!(r0 <= l1 || r1 <= l0);
        assert_eq!(l1, d.big_h(RHO));
        for i in 0..d.sx.len() - 1 {
            assert!(d.sh[i] + d.sl[i] <= d.sh[i + 1] + 1e-12);
        }
        assert!(build_denjoy(0.25, 2000).is_err());
        assert!(build_denjoy(RHO, 10).is_err());
        assert!(matches!(build_denjoy_with_accuracy(RHO, 2000, 1e-6), Err(Error::AccuracyBelowTail { .. })));
    }

    #[test]
    fn step_examples() {
        let d = build_denjoy(RHO, 2000).unwrap();
        let (l0, _) = d.gap(0).unwrap();
        let (l1, _) = d.gap(1).unwrap();
        assert!((d.step(l0) - l1).abs() < 1e-12);
        let lens: Vec<f64> = (0..50).map(|n| d.length(n).unwrap()).collect();
        assert!(lens.windows(2).all(|w| w[1] < w[0]));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let z: f64 = rng.gen();
            let lhs = d.h(d.step(z));
            let rhs = frac(d.h(z) + RHO);
            assert!(circle_dist(lhs, rhs) <= 2.0 * d.tail_bound(), "z = {z}");
        }
    }

    #[test]
    fn step_preserves_cyclic_order() {
        let d = build_denjoy(RHO, 2000).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let mut v: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            v.sort_by(f64::total_cmp);
            let l: Vec<f64> = v.iter().map(|&z| d.lift_value(z)).collect();
            assert!(l[0] <= l[1] && l[1] <= l[2] && l[2] <= l[0] + 1.0, "{v:?} -> {l:?}");
        }
    }

    #[test]
    fn denjoy_rotation_number() {
        let d = build_denjoy(RHO, 5000).unwrap();
        assert!((rotation_number(&d, 0.3, 100_000).unwrap() - RHO).abs() < 1e-3);
    }

    #[test]
    fn symbolic_orbits() {
        let d = build_denjoy(RHO, 2000).unwrap();
        assert_eq!(d.symbolic_orbit(Endpoint::left(0), 5).unwrap(), Endpoint::left(5));
        assert!(matches!(d.symbolic_orbit(Endpoint::left(1990), 20), Err(Error::OutsideTruncation { .. })));
        let (a, b) = (Endpoint::left(-30), Endpoint::right(-7));
        let (mut fa, mut fb) = (d.endpoint(a).unwrap(), d.endpoint(b).unwrap());
        for k in 1..=20 {
            fa = d.step(fa);
            fb = d.step(fb);
            let sym = circle_dist(
                d.endpoint(d.symbolic_orbit(a, k).unwrap()).unwrap(),
                d.endpoint(d.symbolic_orbit(b, k).unwrap()).unwrap(),
            );
            assert!((sym - circle_dist(fa, fb)).abs() <= d.tail_bound(), "k = {k}");
        }
    }

    #[test]
    fn witnesses_for_small_delta() {
        let d = build_denjoy(RHO, 2000).unwrap();
        let l0 = d.length(0).unwrap();
        for j in 1..=20 {
            let delta = 0.5f64.powi(j);
            let w = non_equicontinuity_witness(&d, delta).unwrap();
            assert!(w.initial < delta && w.after >= l0 / 2.0);
        }
    }

    #[test]
    fn mls_examples() {
        let d = build_denjoy(RHO, 20_000).unwrap();
        let a = Endpoint::left(3);
        assert_eq!(mls_density_on_lambda(&d, a, a, 0.1, 100).unwrap(), 0.0);
        let rec = mls_recipe(&d, 0.05).unwrap();
        let pairs = close_endpoint_pairs(&d, rec.delta_h, 20, 5000, 7);
        assert_eq!(pairs.len(), 20);
        for (x, y) in pairs {
            assert!(mls_density_on_lambda(&d, x, y, rec.eps, 5000).unwrap() < rec.eps);
        }
        assert!(mls_density_on_lambda(&d, a, Endpoint::left(19_999), 0.1, 10).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let d = build_denjoy(RHO, 1000).unwrap();
        let csv = d.to_csv();
        assert!(csv.starts_with("n,x_n,H_x_n,ell_n\n0,0.0,0.0,"));
        let back = DenjoyMap::from_csv(&csv).unwrap();
        assert_eq!(back, d);
        assert!((2.0 * back.length(0).unwrap() - gap_constant()).abs() < 1e-16);
        assert!(DenjoyMap::from_csv("n,x\n").is_err());
        let tampered = csv.replacen("\n1,", "\n1,0.5", 1);
        assert!(DenjoyMap::from_csv(&tampered).is_err());
    }
}
