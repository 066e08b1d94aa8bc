//! Fixed-precision p-adic integers, polynomial and rational flows on Z_p and
//! P¹(Q_p), the spherical metric, and an orbit probe for minimal components.

use crate::error::{Error, Result};
use crate::flow::{Flow, FlowClass};
use std::cmp::Ordering;
use std::fmt;

/// Default number of base-p digits carried.
pub const DEFAULT_PRECISION: usize = 32;

/// An element of Z_p known modulo p^prec, stored as K base-p digits, least
/// significant first. Digits at positions ≥ prec are zero and carry no
/// information.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u32,
    digits: Vec<u32>,
    prec: usize,
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicInt(p={}, digits={:?}, prec={})", self.p, &self.digits[..self.prec], self.prec)
    }
}

fn check_prime(p: u32) -> Result<()> {
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    Ok(())
}

impl PadicInt {
    pub fn zero(p: u32, k: usize) -> Self {
        Self { p, digits: vec![0; k], prec: k }
    }

    pub fn one(p: u32, k: usize) -> Self {
        Self::from_u64(p, k, 1)
    }

    pub fn from_u64(p: u32, k: usize, mut n: u64) -> Self {
        let mut digits = vec![0; k];
        for d in digits.iter_mut() {
            *d = (n % p as u64) as u32;
            n /= p as u64;
        }
        Self { p, digits, prec: k }
    }

    /// Negative integers map to their p-adic expansion (e.g. −1 = (p−1)(p−1)…).
    pub fn from_i64(p: u32, k: usize, n: i64) -> Self {
        let x = Self::from_u64(p, k, n.unsigned_abs());
        if n < 0 {
            x.neg()
        } else {
            x
        }
    }

    /// Digits least significant first; missing high digits are zero.
    pub fn from_digits(p: u32, k: usize, digits: &[u32]) -> Result<Self> {
        check_prime(p)?;
        if digits.len() > k {
            return Err(Error::InvalidArgument(format!("{} digits exceed precision {k}", digits.len())));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::InvalidArgument(format!("digit {d} out of range for p = {p}")));
        }
        let mut v = vec![0; k];
        v[..digits.len()].copy_from_slice(digits);
        Ok(Self { p, digits: v, prec: k })
    }

    /// Parses a decimal integer (`-12`) or an explicit digit list (`d0,d1,...`).
    pub fn parse(p: u32, k: usize, s: &str) -> Result<Self> {
        check_prime(p)?;
        let s = s.trim();
        if s.contains(',') {
            let digits = s
                .split(',')
                .map(|d| d.trim().parse::<u32>().map_err(|e| Error::Parse(format!("digit `{d}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            Self::from_digits(p, k, &digits)
        } else {
            let n: i64 = s.parse().map_err(|e| Error::Parse(format!("p-adic integer `{s}`: {e}")))?;
            Ok(Self::from_i64(p, k, n))
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Number of digits carried (K).
    pub fn capacity(&self) -> usize {
        self.digits.len()
    }

    /// Number of significant digits.
    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    fn same_ring(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixed primes");
        assert_eq!(self.digits.len(), o.digits.len(), "mixed capacities");
    }

    fn masked(mut self, prec: usize) -> Self {
        for d in &mut self.digits[prec..] {
            *d = 0;
        }
        self.prec = prec;
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_ring(o);
        let p = self.p as u64;
        let mut carry = 0u64;
        let digits = self
            .digits
            .iter()
            .zip(&o.digits)
            .map(|(&a, &b)| {
                let s = a as u64 + b as u64 + carry;
                carry = s / p;
                (s % p) as u32
            })
            .collect();
        Self { p: self.p, digits, prec: self.prec }.masked(self.prec.min(o.prec))
    }

    pub fn neg(&self) -> Self {
        // −x = (p^K − 1 − x) + 1 digitwise
        let comp = Self {
            p: self.p,
            digits: self.digits.iter().map(|&d| self.p - 1 - d).collect(),
            prec: self.digits.len(),
        };
        comp.add(&Self::one(self.p, self.digits.len())).masked(self.prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Product truncated to K digits (schoolbook).
    pub fn mul(&self, o: &Self) -> Self {
        self.same_ring(o);
        let k = self.digits.len();
        let p = self.p as u64;
        let mut acc = vec![0u64; k];
        for (i, &a) in self.digits.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let mut carry = 0u64;
            for j in 0..k - i {
                let cur = acc[i + j] + a as u64 * o.digits[j] as u64 + carry;
                acc[i + j] = cur % p;
                carry = cur / p;
            }
        }
        let digits = acc.into_iter().map(|d| d as u32).collect();
        Self { p: self.p, digits, prec: k }.masked(self.prec.min(o.prec))
    }

    /// Index of the first nonzero significant digit; `None` below precision.
    pub fn valuation(&self) -> Option<usize> {
        self.digits[..self.prec].iter().position(|&d| d != 0)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn norm(&self) -> PadicNorm {
        match self.valuation() {
            Some(v) => PadicNorm::Exact { p: self.p, v },
            None => PadicNorm::BelowPrecision { p: self.p, prec: self.prec },
        }
    }

    /// Divides by p^v, losing the top v digits of precision.
    pub fn shift_down(&self, v: usize) -> Self {
        let k = self.digits.len();
        let mut digits = vec![0; k];
        if v < k {
            digits[..k - v].copy_from_slice(&self.digits[v..]);
        }
        Self { p: self.p, digits, prec: self.prec.saturating_sub(v) }.masked(self.prec.saturating_sub(v))
    }

    /// x mod p^m as an ordinary integer.
    pub fn residue(&self, m: usize) -> u64 {
        self.digits[..m].iter().rev().fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }
}

/// A p-adic absolute value p^{−v}, or "≤ p^{−prec}" when the argument is zero
/// to the available precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadicNorm {
    Exact { p: u32, v: usize },
    BelowPrecision { p: u32, prec: usize },
}

impl PadicNorm {
    /// Lower bound on the valuation.
    pub fn valuation_bound(&self) -> usize {
        match *self {
            PadicNorm::Exact { v, .. } => v,
            PadicNorm::BelowPrecision { prec, .. } => prec,
        }
    }

    pub fn is_below_precision(&self) -> bool {
        matches!(self, PadicNorm::BelowPrecision { .. })
    }

    /// p^{−v}; the distinguished below-precision outcome maps to 0, which is
    /// the metric on Z/p^K Z.
    pub fn as_f64(&self) -> f64 {
        match *self {
            PadicNorm::Exact { p, v } => (p as f64).powi(-(v as i32)),
            PadicNorm::BelowPrecision { .. } => 0.0,
        }
    }

    /// Whether self ≤ other is certain. A below-precision left side is
    /// accepted whenever its bound is not contradicted.
    pub fn certainly_le(&self, other: &Self) -> bool {
        match (self, other) {
            (_, PadicNorm::BelowPrecision { prec, .. }) => self.is_below_precision() || self.valuation_bound() >= *prec,
            (PadicNorm::BelowPrecision { .. }, PadicNorm::Exact { .. }) => true,
            (PadicNorm::Exact { v: a, .. }, PadicNorm::Exact { v: b, .. }) => a >= b,
        }
    }
}

impl fmt::Display for PadicNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PadicNorm::Exact { p, v: 0 } => write!(f, "1 (p={p})"),
            PadicNorm::Exact { p, v } => write!(f, "{p}^-{v}"),
            PadicNorm::BelowPrecision { p, prec } => write!(f, "below precision (<= {p}^-{prec})"),
        }
    }
}

pub fn padic_norm(x: &PadicInt) -> PadicNorm {
    x.norm()
}

pub fn padic_dist(x: &PadicInt, y: &PadicInt) -> PadicNorm {
    x.sub(y).norm()
}

/// A polynomial with Z_p coefficients, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct PadicPoly {
    coeffs: Vec<PadicInt>,
}

impl PadicPoly {
    pub fn new(coeffs: Vec<PadicInt>) -> Result<Self> {
        let first = coeffs.first().ok_or_else(|| Error::InvalidArgument("empty polynomial".into()))?;
        if coeffs.iter().any(|c| c.p != first.p || c.capacity() != first.capacity()) {
            return Err(Error::InvalidArgument("coefficients over different rings".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(p: u32, k: usize, coeffs: &[i64]) -> Result<Self> {
        check_prime(p)?;
        Self::new(coeffs.iter().map(|&c| PadicInt::from_i64(p, k, c)).collect())
    }

    pub fn prime(&self) -> u32 {
        self.coeffs[0].p
    }

    pub fn capacity(&self) -> usize {
        self.coeffs[0].capacity()
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation, exact mod p^K.
    pub fn eval(&self, x: &PadicInt) -> PadicInt {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Homogenized evaluation Σ a_i x^i y^{d−i} at degree `d`.
    fn eval_homogeneous(&self, x: &PadicInt, y: &PadicInt, d: usize) -> PadicInt {
        let (p, k) = (self.prime(), self.capacity());
        let mut acc = PadicInt::zero(p, k);
        let mut xp = PadicInt::one(p, k);
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut yp = PadicInt::one(p, k);
            for _ in i..d {
                yp = yp.mul(y);
            }
            acc = acc.add(&c.mul(&xp).mul(&yp));
            xp = xp.mul(x);
        }
        acc
    }
}

/// x ↦ P(x) on Z_p with the metric |x − y|_p.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFlow {
    poly: PadicPoly,
}

impl PolyFlow {
    pub fn poly(&self) -> &PadicPoly {
        &self.poly
    }
}

pub fn poly_flow(poly: PadicPoly) -> PolyFlow {
    PolyFlow { poly }
}

impl Flow for PolyFlow {
    type Point = PadicInt;

    fn name(&self) -> String {
        let c: Vec<String> = self.poly.coeffs.iter().map(|c| c.residue(c.precision().min(8)).to_string()).collect();
        format!("padic_poly(p={},coeffs=[{}])", self.poly.prime(), c.join(","))
    }

    fn step(&self, x: &PadicInt) -> PadicInt {
        self.poly.eval(x)
    }

    fn dist(&self, x: &PadicInt, y: &PadicInt) -> f64 {
        padic_dist(x, y).as_f64()
    }

    fn class(&self) -> FlowClass {
        FlowClass::OneLipschitz
    }
}

/// The adding machine x ↦ x + 1 on Z_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddingMachine {
    pub p: u32,
    pub k: usize,
}

impl Flow for AddingMachine {
    type Point = PadicInt;

    fn name(&self) -> String {
        format!("adding_machine(p={})", self.p)
    }

    fn step(&self, x: &PadicInt) -> PadicInt {
        x.add(&PadicInt::one(self.p, self.k))
    }

    fn dist(&self, x: &PadicInt, y: &PadicInt) -> f64 {
        padic_dist(x, y).as_f64()
    }

    fn class(&self) -> FlowClass {
        FlowClass::Isometric
    }
}

/// A point [x : y] of P¹(Q_p), normalized so max(|x|_p, |y|_p) = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjPoint {
    x: PadicInt,
    y: PadicInt,
}

impl ProjPoint {
    /// Normalizes a homogeneous pair by removing the common power of p.
    pub fn new(x: PadicInt, y: PadicInt) -> Result<Self> {
        x.same_ring(&y);
        let v = match (x.valuation(), y.valuation()) {
            (None, None) => return Err(Error::ZeroProjectivePoint),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        if v == 0 {
            return Ok(Self { x, y });
        }
        Ok(Self { x: x.shift_down(v), y: y.shift_down(v) })
    }

    /// z ∈ Z_p as [z : 1].
    pub fn from_int(z: PadicInt) -> Self {
        let one = PadicInt::one(z.p, z.capacity());
        Self { x: z, y: one }
    }

    /// ∞ = [1 : 0].
    pub fn infinity(p: u32, k: usize) -> Self {
        Self { x: PadicInt::one(p, k), y: PadicInt::zero(p, k) }
    }

    pub fn coords(&self) -> (&PadicInt, &PadicInt) {
        (&self.x, &self.y)
    }

    /// The affine coordinate x/y when it lies in Z_p.
    pub fn as_int(&self) -> Option<PadicInt> {
        if !self.y.is_unit() {
            return None;
        }
        Some(self.x.mul(&inverse_unit(&self.y)))
    }

    pub fn renormalize(&self) -> Result<Self> {
        Self::new(self.x.clone(), self.y.clone())
    }

    /// Projective equality: x1 y2 = x2 y1 to the available precision.
    pub fn same_point(&self, o: &Self) -> bool {
        spherical_dist(self, o).is_below_precision()
    }
}

/// Inverse of a unit by Newton iteration u ← u(2 − a u).
fn inverse_unit(a: &PadicInt) -> PadicInt {
    assert!(a.is_unit(), "inverse of a non-unit");
    let (p, k) = (a.p, a.capacity());
    // d0^{-1} mod p by Fermat
    let d0 = a.digits[0] as u64;
    let mut inv0 = 1u64;
    let (mut base, mut e) = (d0, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            inv0 = inv0 * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    let two = PadicInt::from_u64(p, k, 2);
    let mut u = PadicInt::from_u64(p, k, inv0);
    let mut good = 1;
    while good < k {
        u = u.mul(&two.sub(&a.mul(&u)));
        good *= 2;
    }
    u.masked(a.prec)
}

/// ρ(u, v) = |x₁y₂ − x₂y₁|_p / (max(|x₁|,|y₁|) max(|x₂|,|y₂|)); the
/// denominators are 1 for normalized points.
pub fn spherical_dist(u: &ProjPoint, v: &ProjPoint) -> PadicNorm {
    u.x.mul(&v.y).sub(&v.x.mul(&u.y)).norm()
}

/// A rational map z ↦ N(z)/D(z) acting on P¹(Q_p) in homogeneous form.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFlow {
    num: PadicPoly,
    den: PadicPoly,
    degree: usize,
}

impl RationalFlow {
    pub fn apply(&self, u: &ProjPoint) -> ProjPoint {
        let n = self.num.eval_homogeneous(&u.x, &u.y, self.degree);
        let d = self.den.eval_homogeneous(&u.x, &u.y, self.degree);
        ProjPoint::new(n, d).unwrap_or_else(|_| ProjPoint::infinity(u.x.p, u.x.capacity()))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// Builds the flow of N/D, declared to have good reduction, and validates the
/// declaration on `samples` pseudo-random pairs of P¹(Q_p): every pair must
/// satisfy ρ(Ru, Rv) ≤ ρ(u, v).
pub fn rational_flow(num: PadicPoly, den: PadicPoly, samples: usize, seed: u64) -> Result<RationalFlow> {
    if num.prime() != den.prime() || num.capacity() != den.capacity() {
        return Err(Error::InvalidArgument("numerator and denominator over different rings".into()));
    }
    let degree = num.degree().max(den.degree());
    let flow = RationalFlow { num, den, degree };
    let mut gen = ProjSampler::new(flow.num.prime(), flow.num.capacity(), seed);
    for i in 0..samples {
        let (u, v) = gen.close_pair();
        let before = spherical_dist(&u, &v);
        let after = spherical_dist(&flow.apply(&u), &flow.apply(&v));
        if !after.certainly_le(&before) {
            return Err(Error::NotLipschitz(format!("sample {i}: rho(Ru,Rv) = {after} > rho(u,v) = {before}")));
        }
    }
    Ok(flow)
}

impl Flow for RationalFlow {
    type Point = ProjPoint;

    fn name(&self) -> String {
        format!("padic_rational(p={},deg={})", self.num.prime(), self.degree)
    }

    fn step(&self, x: &ProjPoint) -> ProjPoint {
        self.apply(x)
    }

    fn dist(&self, x: &ProjPoint, y: &ProjPoint) -> f64 {
        spherical_dist(x, y).as_f64()
    }

    fn class(&self) -> FlowClass {
        FlowClass::OneLipschitz
    }
}

/// Deterministic sampler of p-adic integers and projective points, biased
/// towards close pairs so that Lipschitz checks see many valuations.
pub struct ProjSampler {
    p: u32,
    k: usize,
    rng: rand_chacha::ChaCha8Rng,
}

impl ProjSampler {
    pub fn new(p: u32, k: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        Self { p, k, rng: rand_chacha::ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn int(&mut self) -> PadicInt {
        use rand::Rng;
        let digits: Vec<u32> = (0..self.k).map(|_| self.rng.gen_range(0..self.p)).collect();
        PadicInt::from_digits(self.p, self.k, &digits).expect("digits in range")
    }

    /// y agreeing with x in a random number of leading digits.
    pub fn int_pair(&mut self) -> (PadicInt, PadicInt) {
        use rand::Rng;
        let x = self.int();
        let agree = self.rng.gen_range(0..=self.k);
        let mut y = self.int();
        y.digits[..agree].copy_from_slice(&x.digits[..agree]);
        (x, y)
    }

    pub fn point(&mut self) -> ProjPoint {
        use rand::Rng;
        let z = self.int();
        if self.rng.gen_bool(0.5) {
            ProjPoint::from_int(z)
        } else {
            // 1/(p z') lies outside Z_p: [1 : p z']
            let pz = PadicInt::from_u64(self.p, self.k, self.p as u64).mul(&z);
            ProjPoint::new(PadicInt::one(self.p, self.k), pz).expect("nonzero")
        }
    }

    pub fn close_pair(&mut self) -> (ProjPoint, ProjPoint) {
        use rand::Rng;
        let (a, b) = self.int_pair();
        match self.rng.gen_range(0..3) {
            0 => (ProjPoint::from_int(a), ProjPoint::from_int(b)),
            1 => {
                let p = PadicInt::from_u64(self.p, self.k, self.p as u64);
                let u = ProjPoint::new(PadicInt::one(self.p, self.k), p.mul(&a)).expect("nonzero");
                let v = ProjPoint::new(PadicInt::one(self.p, self.k), p.mul(&b)).expect("nonzero");
                (u, v)
            }
            _ => (self.point(), self.point()),
        }
    }
}

/// Orbit residues mod p^m and whether the probe saw the whole eventual cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityProbe {
    pub modulus: u64,
    /// counts[r] = #{0 ≤ n < N : Tⁿx ≡ r mod p^m}
    pub counts: Vec<u64>,
    /// Preperiod and period of the orbit mod p^m.
    pub tail: usize,
    pub period: usize,
    /// All residues of the eventual cycle were visited within N steps.
    pub covers_component: bool,
}

impl MinimalityProbe {
    pub fn support(&self) -> Vec<u64> {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(r, _)| r as u64).collect()
    }
}

/// Visit histogram of the orbit of x over residues mod p^m.
pub fn empirical_minimality<F>(flow: &F, x: &PadicInt, n: usize, m: usize) -> Result<MinimalityProbe>
where
    F: Flow<Point = PadicInt>,
{
    if m > x.precision() {
        return Err(Error::InvalidArgument(format!("resolution {m} exceeds precision {}", x.precision())));
    }
    let modulus = (x.prime() as u64).checked_pow(m as u32).ok_or_else(|| Error::InvalidArgument("p^m overflows".into()))?;
    if modulus > 1 << 26 {
        return Err(Error::InvalidArgument(format!("p^m = {modulus} too large for a histogram")));
    }
    let mut counts = vec![0u64; modulus as usize];
    let mut first_seen = vec![usize::MAX; modulus as usize];
    let mut cur = x.clone();
    let mut step = 0;
    // the orbit mod p^m is eventually periodic; keep going past N until the
    // cycle closes so that its residues are known
    let (tail, period) = loop {
        let r = cur.residue(m) as usize;
        if step < n {
            counts[r] += 1;
        }
        if first_seen[r] != usize::MAX {
            let tail = first_seen[r];
            break (tail, step - tail);
        }
        first_seen[r] = step;
        cur = flow.step(&cur);
        step += 1;
    };
    for _ in step + 1..n {
        cur = flow.step(&cur);
        counts[cur.residue(m) as usize] += 1;
    }
    let covers = first_seen
        .iter()
        .zip(&counts)
        .all(|(&s, &c)| s == usize::MAX || s < tail || c > 0);
    Ok(MinimalityProbe { modulus, counts, tail, period, covers_component: covers })
}

impl PartialOrd for PadicNorm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (PadicNorm::Exact { v: a, .. }, PadicNorm::Exact { v: b, .. }) => Some(b.cmp(a)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{check_metric_axioms, class_defect, orbit};
    use rand::{Rng, SeedableRng};

    #[test]
    fn norms() {
        assert_eq!(PadicInt::from_i64(2, 8, 12).norm(), PadicNorm::Exact { p: 2, v: 2 });
        assert_eq!(PadicInt::from_i64(2, 8, 12).norm().as_f64(), 0.25);
        assert_eq!(PadicInt::from_i64(3, 8, 1).norm().as_f64(), 1.0);
        let z = PadicInt::zero(5, 8).norm();
        assert_eq!(z, PadicNorm::BelowPrecision { p: 5, prec: 8 });
        assert_eq!(z.to_string(), "below precision (<= 5^-8)");
    }

    #[test]
    fn arithmetic_matches_integers_mod_pk() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &p in &[2u32, 3, 5, 7] {
            let k = 12;
            let m = (p as i128).pow(k as u32);
            for _ in 0..500 {
                let a: i64 = rng.gen_range(-1_000_000..1_000_000);
                let b: i64 = rng.gen_range(-1_000_000..1_000_000);
                let (x, y) = (PadicInt::from_i64(p, k, a), PadicInt::from_i64(p, k, b));
                let red = |v: i128| v.rem_euclid(m) as u64;
                assert_eq!(x.add(&y).residue(k), red(a as i128 + b as i128));
                assert_eq!(x.sub(&y).residue(k), red(a as i128 - b as i128));
                assert_eq!(x.mul(&y).residue(k), red(a as i128 * b as i128));
            }
        }
    }

    #[test]
    fn parse_forms() {
        let a = PadicInt::parse(3, 6, "10").unwrap();
        let b = PadicInt::parse(3, 6, "1,0,1").unwrap();
        assert_eq!(a, b);
        assert_eq!(PadicInt::parse(2, 8, "-1").unwrap().digits(), &[1; 8]);
        assert!(PadicInt::parse(3, 4, "1,3").is_err());
        assert!(PadicInt::parse(4, 4, "1").is_err());
        assert!(PadicInt::parse(3, 2, "1,1,1").is_err());
    }

    #[test]
    fn unit_inverse() {
        let a = PadicInt::from_i64(5, 16, 7);
        assert_eq!(a.mul(&inverse_unit(&a)), PadicInt::one(5, 16));
    }

    #[test]
    fn adding_machine_period() {
        let k = 10;
        let flow = AddingMachine { p: 2, k };
        let o = orbit(&flow, PadicInt::zero(2, k), 1 << k);
        let mut seen: Vec<u64> = o.points[..1 << k].iter().map(|x| x.residue(k)).collect();
        seen.sort();
        assert_eq!(seen, (0..1 << k).collect::<Vec<_>>());
        assert_eq!(o.points[1 << k], PadicInt::zero(2, k));
        let poly = poly_flow(PadicPoly::from_i64(2, k, &[1, 1]).unwrap());
        assert_eq!(orbit(&poly, PadicInt::zero(2, k), 1 << k).points, o.points);
    }

    #[test]
    fn square_fixes_zero() {
        let f = poly_flow(PadicPoly::from_i64(2, 16, &[0, 0, 1]).unwrap());
        assert_eq!(f.step(&PadicInt::zero(2, 16)), PadicInt::zero(2, 16));
    }

    #[test]
    fn random_polys_are_one_lipschitz() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for &p in &[2u32, 3, 5] {
            let mut s = ProjSampler::new(p, DEFAULT_PRECISION, p as u64);
            for _ in 0..200 {
                let deg = rng.gen_range(0..=5);
                let poly = PadicPoly::new((0..=deg).map(|_| s.int()).collect()).unwrap();
                for _ in 0..5 {
                    let (x, y) = s.int_pair();
                    let before = padic_dist(&x, &y);
                    let after = padic_dist(&poly.eval(&x), &poly.eval(&y));
                    assert!(after.certainly_le(&before), "{after} > {before}");
                }
            }
        }
    }

    #[test]
    fn metric_axioms_and_isometry() {
        let mut s = ProjSampler::new(3, 16, 1);
        let flow = AddingMachine { p: 3, k: 16 };
        assert!(check_metric_axioms(&flow, || s.int(), 1000, 0.0).is_ok());
        let mut s = ProjSampler::new(3, 16, 2);
        assert_eq!(class_defect(&flow, || s.int_pair().0, 100, 100), 0.0);
    }

    #[test]
    fn spherical_examples() {
        let (p, k) = (3, 16);
        let z = ProjPoint::from_int(PadicInt::from_i64(p, k, 0));
        let w = ProjPoint::from_int(PadicInt::from_i64(p, k, 3));
        assert!(spherical_dist(&z, &z).is_below_precision());
        assert_eq!(spherical_dist(&z, &w).as_f64(), 1.0 / 3.0);
        let inf = ProjPoint::infinity(p, k);
        for n in [0, 1, 5, -7] {
            let u = ProjPoint::from_int(PadicInt::from_i64(p, k, n));
            assert_eq!(spherical_dist(&u, &inf).as_f64(), 1.0);
        }
    }

    #[test]
    fn spherical_restricts_to_padic_metric() {
        let mut s = ProjSampler::new(5, DEFAULT_PRECISION, 4);
        for _ in 0..1000 {
            let (x, y) = s.int_pair();
            let rho = spherical_dist(&ProjPoint::from_int(x.clone()), &ProjPoint::from_int(y.clone()));
            assert_eq!(rho, padic_dist(&x, &y));
        }
    }

    #[test]
    fn normalization_is_idempotent_and_scale_invariant() {
        let (p, k) = (2, 16);
        let x = PadicInt::from_i64(p, k, 12);
        let y = PadicInt::from_i64(p, k, 40);
        let u = ProjPoint::new(x.clone(), y.clone()).unwrap();
        assert_eq!(u.renormalize().unwrap(), u);
        let lam = PadicInt::from_i64(p, k, 8);
        let v = ProjPoint::new(x.mul(&lam), y.mul(&lam)).unwrap();
        assert!(u.same_point(&v));
        assert!(ProjPoint::new(PadicInt::zero(p, k), PadicInt::zero(p, k)).is_err());
    }

    #[test]
    fn rational_examples() {
        let (p, k) = (3, DEFAULT_PRECISION);
        // z + 1 = [x + y : y]
        let shift = rational_flow(PadicPoly::from_i64(p, k, &[1, 1]).unwrap(), PadicPoly::from_i64(p, k, &[1]).unwrap(), 500, 1).unwrap();
        let mut s = ProjSampler::new(p, k, 8);
        for _ in 0..500 {
            let (u, v) = s.close_pair();
            assert_eq!(spherical_dist(&shift.apply(&u), &shift.apply(&v)), spherical_dist(&u, &v));
        }
        let sq = rational_flow(PadicPoly::from_i64(p, k, &[0, 0, 1]).unwrap(), PadicPoly::from_i64(p, k, &[1]).unwrap(), 1000, 2);
        assert!(sq.is_ok());
        // 1/z = [y : x]
        let inv = rational_flow(PadicPoly::from_i64(p, k, &[1]).unwrap(), PadicPoly::from_i64(p, k, &[0, 1]).unwrap(), 500, 3).unwrap();
        let zero = ProjPoint::from_int(PadicInt::zero(p, k));
        assert!(inv.apply(&zero).same_point(&ProjPoint::infinity(p, k)));
        assert!(inv.apply(&ProjPoint::infinity(p, k)).same_point(&zero));
        for _ in 0..500 {
            let (u, v) = s.close_pair();
            assert_eq!(spherical_dist(&inv.apply(&u), &inv.apply(&v)), spherical_dist(&u, &v));
        }
    }

    #[test]
    fn bad_reduction_is_rejected() {
        // z/3 has bad reduction at 3 and expands distances near 0
        let (p, k) = (3, 16);
        let r = rational_flow(PadicPoly::from_i64(p, k, &[0, 1]).unwrap(), PadicPoly::from_i64(p, k, &[3]).unwrap(), 2000, 5);
        assert!(matches!(r, Err(Error::NotLipschitz(_))));
    }

    #[test]
    fn minimality_probe_examples() {
        let k = 16;
        let add = AddingMachine { p: 2, k };
        let probe = empirical_minimality(&add, &PadicInt::zero(2, k), 64, 6).unwrap();
        assert!(probe.counts.iter().all(|&c| c == 1));
        assert_eq!(probe.period, 64);
        let sq = poly_flow(PadicPoly::from_i64(2, k, &[0, 0, 1]).unwrap());
        let probe = empirical_minimality(&sq, &PadicInt::one(2, k), 50, 6).unwrap();
        assert_eq!(probe.counts[1], 50);
        assert_eq!(probe.support(), vec![1]);
        assert_eq!(probe.period, 1);
    }

    #[test]
    fn minimality_probe_matches_enumeration() {
        let k = 16;
        let f = poly_flow(PadicPoly::from_i64(2, k, &[0, 1, 1]).unwrap());
        let n = 200;
        let probe = empirical_minimality(&f, &PadicInt::one(2, k), n, 6).unwrap();
        let mut counts = vec![0u64; 64];
        let mut x = 1u64;
        for _ in 0..n {
            counts[x as usize] += 1;
            x = (x + x * x) % 64;
        }
        assert_eq!(probe.counts, counts);
        assert!(probe.covers_component);
    }
}
