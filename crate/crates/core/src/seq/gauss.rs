//! Exact spectra of the quadratic-phase sequences e(n²p/q).
//!
//! The amplitude at t = r/s (s | q) is the normalized Gauss-type sum
//! (1/q) Σ_k e(k²p/q − kr/s). Every term is a q-th root of unity, so the sum
//! lives in Z[ζ_q] and its vanishing is decided by reducing the integer
//! polynomial Σ n_j x^j modulo the cyclotomic polynomial Φ_q.

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;
use std::collections::HashMap;

/// Integer polynomial, coefficients lowest degree first.
type Poly = Vec<i128>;

fn trim(p: &mut Poly) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

/// Remainder of `a` modulo a monic `m`.
fn rem_monic(a: &[i128], m: &[i128]) -> Poly {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm && !r.is_empty() {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] -= lead * c;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    trim(&mut r);
    r
}

/// Exact quotient of `a` by a monic `m` (caller guarantees divisibility).
fn div_monic(a: &[i128], m: &[i128]) -> Poly {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let mut q = vec![0i128; a.len().saturating_sub(dm)];
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        q[shift] = lead;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] -= lead * c;
        }
        r.pop();
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    trim(&mut q);
    q
}

/// Cyclotomic polynomials, memoized.
#[derive(Default)]
pub struct CyclotomicTable {
    cache: HashMap<u64, Poly>,
}

impl CyclotomicTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Φ_m from x^m − 1 = Π_{d | m} Φ_d.
    pub fn phi(&mut self, m: u64) -> Poly {
        if let Some(p) = self.cache.get(&m) {
            return p.clone();
        }
        let mut num = vec![0i128; m as usize + 1];
        num[0] = -1;
        num[m as usize] = 1;
        for d in 1..m {
            if m.is_multiple_of(d) {
                let phi_d = self.phi(d);
                num = div_monic(&num, &phi_d);
            }
        }
        self.cache.insert(m, num.clone());
        num
    }
}

/// An element Σ_j coeffs[j] ζ_m^j of Z[ζ_m], stored reduced mod Φ_m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInt {
    pub order: u64,
    pub coeffs: Vec<i128>,
}

impl CyclotomicInt {
    /// Builds Σ counts[j] ζ^j and reduces it modulo Φ_order.
    pub fn from_exponent_counts(order: u64, counts: &[i128], table: &mut CyclotomicTable) -> Self {
        let phi = table.phi(order);
        Self {
            order,
            coeffs: rem_monic(counts, &phi),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut acc = crate::numeric::KahanSum::new();
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let z = crate::numeric::e(j as f64 / self.order as f64);
                acc.add(z * c as f64);
            }
        }
        acc.value()
    }
}

/// A point r/s of the spectrum with its exact and numerical amplitude.
#[derive(Debug, Clone)]
pub struct SpectralAtom {
    pub r: u64,
    pub s: u64,
    /// q · amplitude as an exact element of Z[ζ_q].
    pub exact: CyclotomicInt,
    /// lim σ_N(r/s).
    pub amplitude: Complex64,
}

impl SpectralAtom {
    pub fn t(&self) -> f64 {
        self.r as f64 / self.s as f64
    }
}

/// Exact spectrum of c_n = e(n² p/q): every r/s with s | q, gcd(r, s) = 1 and
/// nonvanishing Σ_{k=0}^{q−1} e(k²p/q − kr/s). Atoms are ordered by r/s.
pub fn quadratic_rational_spectrum(p: u64, q: u64) -> Result<Vec<SpectralAtom>> {
    if q == 0 || p >= q {
        return Err(Error::InvalidArgument(format!("need 0 <= p < q, got p={p}, q={q}")));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::NotCoprime(p as i64, q as i64));
    }
    let mut table = CyclotomicTable::new();
    let mut atoms = Vec::new();
    for s in (1..=q).filter(|s| q.is_multiple_of(*s)) {
        let scale = q / s;
        for r in (0..s).filter(|&r| r.gcd(&s) == 1) {
            let mut counts = vec![0i128; q as usize];
            for k in 0..q {
                let k2 = (k as u128 * k as u128 % q as u128) as u64;
                let quad = (k2 as u128 * p as u128 % q as u128) as u64;
                let lin = (k as u128 * r as u128 * scale as u128 % q as u128) as u64;
                let j = (quad + q - lin) % q;
                counts[j as usize] += 1;
            }
            let exact = CyclotomicInt::from_exponent_counts(q, &counts, &mut table);
            if !exact.is_zero() {
                let amplitude = exact.to_complex() / q as f64;
                atoms.push(SpectralAtom { r, s, exact, amplitude });
            }
        }
    }
    atoms.sort_by(|a, b| (a.r * b.s).cmp(&(b.r * a.s)));
    Ok(atoms)
}

/// Streaming Cesàro mean (1/N) Σ_{n≤N} e(n²p/q − n r/s) with exact residue
/// arithmetic for the phases; the brute-force side of the spectrum check.
pub fn quadratic_rational_cesaro(p: u64, q: u64, r: u64, s: u64, n: u64) -> Complex64 {
    let m = q * s;
    let mut counts = vec![0u64; m as usize];
    // phase numerator mod q*s: n²p s − n r q
    for k in 1..=n {
        let k = k % m;
        let a = (k * k % m) * (p * s % m) % m;
        let b = k * (r * q % m) % m;
        counts[((a + m - b) % m) as usize] += 1;
    }
    let mut acc = crate::numeric::KahanSum::new();
    for (j, &c) in counts.iter().enumerate() {
        if c > 0 {
            acc.add(crate::numeric::e(j as f64 / m as f64) * c as f64);
        }
    }
    acc.value() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(atoms: &[SpectralAtom]) -> Vec<(u64, u64)> {
        atoms.iter().map(|a| (a.r, a.s)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        let mut t = CyclotomicTable::new();
        assert_eq!(t.phi(1), vec![-1, 1]);
        assert_eq!(t.phi(2), vec![1, 1]);
        assert_eq!(t.phi(4), vec![1, 0, 1]);
        assert_eq!(t.phi(6), vec![1, -1, 1]);
        assert_eq!(t.phi(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2
        assert!(t.phi(105).contains(&-2));
    }

    #[test]
    fn sum_of_all_roots_vanishes_exactly() {
        let mut t = CyclotomicTable::new();
        for m in 2..40u64 {
            let counts = vec![1i128; m as usize];
            assert!(CyclotomicInt::from_exponent_counts(m, &counts, &mut t).is_zero(), "m = {m}");
        }
    }

    #[test]
    fn listed_spectra() {
        assert_eq!(ts(&quadratic_rational_spectrum(1, 2).unwrap()), vec![(1, 2)]);
        assert_eq!(ts(&quadratic_rational_spectrum(1, 3).unwrap()), vec![(0, 1), (1, 3), (2, 3)]);
        assert_eq!(ts(&quadratic_rational_spectrum(2, 3).unwrap()), vec![(0, 1), (1, 3), (2, 3)]);
        assert_eq!(ts(&quadratic_rational_spectrum(1, 4).unwrap()), vec![(0, 1), (1, 2)]);
        assert_eq!(ts(&quadratic_rational_spectrum(3, 4).unwrap()), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn rejects_non_coprime() {
        assert_eq!(quadratic_rational_spectrum(2, 4).unwrap_err(), Error::NotCoprime(2, 4));
    }

    #[test]
    fn p_zero_is_point_mass_at_zero() {
        let atoms = quadratic_rational_spectrum(0, 1).unwrap();
        assert_eq!(ts(&atoms), vec![(0, 1)]);
        assert!((atoms[0].amplitude - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn brute_force_agrees_with_exact_for_small_q() {
        for q in 1..=12u64 {
            for p in (0..q).filter(|p| p.gcd(&q) == 1) {
                let atoms = quadratic_rational_spectrum(p, q).unwrap();
                for s in (1..=q).filter(|s| q % s == 0) {
                    for r in (0..s).filter(|r| r.gcd(&s) == 1) {
                        let brute = quadratic_rational_cesaro(p, q, r, s, 1_000_000 * q);
                        let exact = atoms
                            .iter()
                            .find(|a| a.r == r && a.s == s)
                            .map(|a| a.amplitude)
                            .unwrap_or_default();
                        assert!((brute - exact).norm() < 1e-3, "p/q={p}/{q}, t={r}/{s}");
                    }
                }
            }
        }
    }
}
