//! Arithmetic weights: the Möbius and Liouville functions from a linear
//! sieve, and the Daboussi–Delange partial-sum diagnostic.

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;

/// Smallest prime factor table for `0..=n` together with the prime list.
pub struct LinearSieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
    mu: Vec<i8>,
}

impl LinearSieve {
    pub fn new(n: usize) -> Self {
        let mut spf = vec![0u32; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut primes = Vec::new();
        if n >= 1 {
            mu[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                primes.push(i as u32);
            }
            for &p in &primes {
                let m = i * p as usize;
                if p > spf[i] || m > n {
                    break;
                }
                spf[m] = p;
                mu[m] = if i % p as usize == 0 { 0 } else { -mu[i] };
            }
        }
        Self { spf, primes, mu }
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    /// Ω(n): number of prime factors counted with multiplicity.
    pub fn big_omega(&self, mut n: usize) -> u32 {
        let mut k = 0;
        while n > 1 {
            n /= self.spf[n] as usize;
            k += 1;
        }
        k
    }
}

/// μ(1), …, μ(N).
pub fn mobius(n: usize) -> Vec<i8> {
    assert!(n >= 1, "mobius needs N >= 1");
    LinearSieve::new(n).mu[1..].to_vec()
}

/// l(1), …, l(N) with l(n) = (−1)^Ω(n).
pub fn liouville(n: usize) -> Vec<i8> {
    assert!(n >= 1, "liouville needs N >= 1");
    let sieve = LinearSieve::new(n);
    let mut out = vec![1i8; n];
    // Ω(m) = Ω(m / spf(m)) + 1 lets us fill the table in one pass
    let mut omega = vec![0u32; n + 1];
    for m in 2..=n {
        omega[m] = omega[m / sieve.spf[m] as usize] + 1;
        out[m - 1] = if omega[m].is_multiple_of(2) { 1 } else { -1 };
    }
    out
}

/// A Dirichlet character modulo `q`, given by its value table on `0..q`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: usize,
    values: Vec<Complex64>,
}

impl DirichletCharacter {
    /// Validates the table: χ(a) = 0 iff gcd(a, q) > 1, unimodular on units,
    /// χ(1) = 1 and multiplicative mod q.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let q = values.len();
        if q == 0 {
            return Err(Error::NotACharacter("empty table".into()));
        }
        const TOL: f64 = 1e-9;
        for (a, v) in values.iter().enumerate() {
            let unit = (a as u64).gcd(&(q as u64)) == 1 || q == 1;
            if unit && (v.norm() - 1.0).abs() > TOL {
                return Err(Error::NotACharacter(format!("|chi({a})| != 1")));
            }
            if !unit && v.norm() > TOL {
                return Err(Error::NotACharacter(format!("chi({a}) != 0 although gcd({a},{q}) > 1")));
            }
        }
        if q > 1 && (values[1] - Complex64::new(1.0, 0.0)).norm() > TOL {
            return Err(Error::NotACharacter("chi(1) != 1".into()));
        }
        for a in 0..q {
            for b in 0..q {
                let lhs = values[(a * b) % q];
                let rhs = values[a] * values[b];
                if (lhs - rhs).norm() > TOL {
                    return Err(Error::NotACharacter(format!("chi({a}*{b}) != chi({a})chi({b})")));
                }
            }
        }
        Ok(Self { modulus: q, values })
    }

    pub fn trivial() -> Self {
        Self {
            modulus: 1,
            values: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus as u64) as usize]
    }
}

/// Partial sum over primes p ≤ `prime_cutoff` of
/// (1/p)(1 − Re(χ(p) f(p) p^{−iu})); `f[n - 1]` holds f(n).
///
/// Divergence of the full series cannot be decided from a partial sum; this
/// is a diagnostic only.
pub fn daboussi_delange_diagnostic(
    f: &[Complex64],
    chi: &DirichletCharacter,
    u: f64,
    prime_cutoff: usize,
) -> Result<f64> {
    if prime_cutoff > f.len() {
        return Err(Error::LengthExceeded {
            requested: prime_cutoff,
            stored: f.len(),
        });
    }
    if let Some(bad) = f.iter().position(|z| z.norm() > 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("|f({})| > 1", bad + 1)));
    }
    let sieve = LinearSieve::new(prime_cutoff);
    let mut acc = crate::numeric::KahanReal::default();
    for &p in sieve.primes() {
        let p = p as u64;
        let twist = Complex64::from_polar(1.0, -u * (p as f64).ln());
        let z = chi.eval(p) * f[p as usize - 1] * twist;
        acc.add((1.0 - z.re) / p as f64);
    }
    Ok(acc.value())
}
