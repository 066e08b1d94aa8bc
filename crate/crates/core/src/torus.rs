//! Affine maps and automorphisms of the 2-torus: entropy classification,
//! the equicontinuity constant for finite-order matrices, the modular
//! normal form of parabolic matrices and the quadratic-phase counterexample.

use crate::error::{Error, Result};
use crate::flow::{Flow, FlowClass};
use crate::numeric::{circle_dist, e, frac, frac_mul, KahanSum};
use num_complex::Complex64;
use num_integer::Integer;
use std::fmt;
use std::str::FromStr;

/// A 2×2 integer matrix with determinant ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl ModularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det.abs() != 1 {
            return Err(Error::NotModular(det));
        }
        Ok(Self { a, b, c, d })
    }

    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };

    /// T_t = [[1, t], [0, 1]].
    pub fn shear(t: i64) -> Self {
        Self { a: 1, b: t, c: 0, d: 1 }
    }

    pub fn det(&self) -> i64 {
        (self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128) as i64
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = |x: i64, y: i64, z: i64, w: i64| -> i64 {
            let v = x as i128 * y as i128 + z as i128 * w as i128;
            i64::try_from(v).expect("modular matrix entry overflow")
        };
        Self {
            a: m(self.a, o.a, self.b, o.c),
            b: m(self.a, o.b, self.b, o.d),
            c: m(self.c, o.a, self.d, o.c),
            d: m(self.c, o.b, self.d, o.d),
        }
    }

    /// Exact inverse; for det = ±1 it is det·adj.
    pub fn inverse(&self) -> Self {
        let s = self.det();
        Self {
            a: s * self.d,
            b: -s * self.b,
            c: -s * self.c,
            d: s * self.a,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.a as f64 * x[0] + self.b as f64 * x[1],
            self.c as f64 * x[0] + self.d as f64 * x[1],
        ]
    }
}

impl fmt::Display for ModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

/// Parses `a,b;c,d`.
impl FromStr for ModularMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(Error::Parse(format!("matrix `{s}`: expected `a,b;c,d`")));
        }
        let mut v = Vec::with_capacity(4);
        for row in rows {
            for x in row.split(',') {
                v.push(
                    x.trim()
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("matrix `{s}`: {e}")))?,
                );
            }
        }
        if v.len() != 4 {
            return Err(Error::Parse(format!("matrix `{s}`: expected four entries")));
        }
        Self::new(v[0], v[1], v[2], v[3])
    }
}

/// Topological entropy of x ↦ Ax on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entropy {
    Zero,
    /// log of the spectral radius
    Positive(f64),
}

pub fn classify_entropy(m: &ModularMatrix) -> Entropy {
    let tr = m.trace() as f64;
    let det = m.det();
    if (det == 1 && m.trace().abs() <= 2) || (det == -1 && m.trace() == 0) {
        return Entropy::Zero;
    }
    let disc = tr * tr - 4.0 * det as f64;
    Entropy::Positive(((tr.abs() + disc.sqrt()) / 2.0).ln())
}

/// Eigenvalues of a 2×2 integer matrix from the characteristic polynomial.
pub fn eigenvalues(m: &ModularMatrix) -> [Complex64; 2] {
    let tr = m.trace() as f64;
    let disc = Complex64::new(tr * tr - 4.0 * m.det() as f64, 0.0).sqrt();
    [(tr + disc) / 2.0, (tr - disc) / 2.0]
}

/// C = ‖P‖‖P⁻¹‖ for a unit-column eigenbasis P of a zero-entropy
/// diagonalizable A, so that ‖Aⁿx‖ ≤ C‖x‖ for all n.
pub fn diag_bound(m: &ModularMatrix) -> Result<f64> {
    if classify_entropy(m) != Entropy::Zero {
        return Err(Error::InvalidArgument(format!("{m} has positive entropy")));
    }
    if m.b == 0 && m.c == 0 {
        // diagonal with entries ±1
        return Ok(1.0);
    }
    let tr2 = m.trace() * m.trace() - 4 * m.det();
    if tr2 == 0 {
        return Err(Error::NotDiagonalizable);
    }
    let [l1, l2] = eigenvalues(m);
    let eigvec = |l: Complex64| -> [Complex64; 2] {
        let v = if m.b != 0 {
            [Complex64::new(m.b as f64, 0.0), l - m.a as f64]
        } else {
            [l - m.d as f64, Complex64::new(m.c as f64, 0.0)]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    let (u, v) = (eigvec(l1), eigvec(l2));
    // singular values of P = [u v] from the Hermitian Gram matrix P*P
    let p = u[0].norm_sqr() + u[1].norm_sqr();
    let r = v[0].norm_sqr() + v[1].norm_sqr();
    let q = u[0].conj() * v[0] + u[1].conj() * v[1];
    let mid = (p + r) / 2.0;
    let rad = (((p - r) / 2.0).powi(2) + q.norm_sqr()).sqrt();
    let (smax2, smin2) = (mid + rad, mid - rad);
    Ok((smax2 / smin2).sqrt())
}

/// P⁻¹MP = sign·T_t with det P = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalForm {
    pub p: ModularMatrix,
    pub t: i64,
    pub sign: i8,
}

impl NormalForm {
    /// Checks the identity in exact integer arithmetic.
    pub fn verify(&self, m: &ModularMatrix) -> bool {
        let lhs = self.p.inverse().mul(m).mul(&self.p);
        let shear = ModularMatrix::shear(self.t);
        let rhs = if self.sign < 0 { shear.neg() } else { shear };
        self.p.det() == 1 && lhs == rhs
    }
}

/// Normal form of a matrix with a double eigenvalue ±1, constructed from the
/// integer eigenvector and a Bézout generalized eigenvector.
pub fn normal_form(m: &ModularMatrix) -> Result<NormalForm> {
    if m.det() != 1 || m.trace().abs() != 2 {
        return Err(Error::NotParabolic);
    }
    let (sign, n) = if m.trace() == -2 { (-1i8, m.neg()) } else { (1i8, *m) };
    let (a, b, c) = (n.a, n.b, n.c);
    let nf = if b == 0 {
        if c == 0 {
            NormalForm { p: ModularMatrix::IDENTITY, t: 0, sign }
        } else {
            let p = ModularMatrix { a: 0, b: 1, c: -1, d: 0 };
            NormalForm { p, t: -c, sign }
        }
    } else {
        let am1 = a - 1;
        let g = am1.gcd(&b);
        let t = (g as i128 * g as i128 / b as i128) as i64;
        let (x1, x2) = (b / g, -am1 / g);
        // (a−1)/g · y1 + b/g · y2 = 1
        let eg = (am1 / g).extended_gcd(&(b / g));
        let s = eg.gcd.signum();
        let (mut y1, mut y2) = (eg.x * s, eg.y * s);
        // shift along the eigenvector to the smallest nonnegative y1
        if x1 != 0 {
            let k = Integer::div_floor(&y1, &x1);
            y1 -= k * x1;
            y2 -= k * x2;
        }
        NormalForm {
            p: ModularMatrix { a: x1, b: y1, c: x2, d: y2 },
            t,
            sign,
        }
    };
    debug_assert!(nf.verify(m), "normal form identity failed for {m}");
    if !nf.verify(m) {
        return Err(Error::NotParabolic);
    }
    Ok(nf)
}

/// Whether t/t′ is the square of an integer (t = 0 pairs only with t′ = 0).
pub fn conjugacy_equivalent(t: i64, t_prime: i64) -> bool {
    if t == 0 || t_prime == 0 {
        return t == t_prime;
    }
    if t % t_prime != 0 {
        return false;
    }
    let r = t / t_prime;
    if r <= 0 {
        return false;
    }
    let s = (r as f64).sqrt().round() as i64;
    (s - 1..=s + 1).any(|k| k >= 0 && k * k == r)
}

/// Brute-force search for an integer P with det P = 1 and T_t P = P T_{t′},
/// entries bounded by `bound`.
pub fn find_integral_conjugator(t: i64, t_prime: i64, bound: i64) -> Option<ModularMatrix> {
    let (l, r) = (ModularMatrix::shear(t), ModularMatrix::shear(t_prime));
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    if a * d - b * c != 1 {
                        continue;
                    }
                    let p = ModularMatrix { a, b, c, d };
                    if l.mul(&p) == p.mul(&r) {
                        return Some(p);
                    }
                }
            }
        }
    }
    None
}

/// Quotient distance on T² = R²/Z² for points stored in [0, 1)².
pub fn torus_dist(x: &[f64; 2], y: &[f64; 2]) -> f64 {
    circle_dist(x[0], y[0]).hypot(circle_dist(x[1], y[1]))
}

/// ‖x‖_{T²} = inf over integer translates of the Euclidean norm.
pub fn torus_norm(x: &[f64; 2]) -> f64 {
    torus_dist(x, &[0.0, 0.0])
}

/// x ↦ Ax + b mod 1 on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusAffine {
    pub matrix: ModularMatrix,
    pub shift: [f64; 2],
}

impl TorusAffine {
    pub fn new(matrix: ModularMatrix, shift: [f64; 2]) -> Self {
        Self {
            matrix,
            shift: [frac(shift[0]), frac(shift[1])],
        }
    }

    pub fn automorphism(matrix: ModularMatrix) -> Self {
        Self::new(matrix, [0.0, 0.0])
    }
}

impl Flow for TorusAffine {
    type Point = [f64; 2];

    fn name(&self) -> String {
        if self.shift == [0.0, 0.0] {
            format!("torus_auto({})", self.matrix)
        } else {
            format!("torus_affine({};{:?},{:?})", self.matrix, self.shift[0], self.shift[1])
        }
    }

    fn step(&self, x: &[f64; 2]) -> [f64; 2] {
        let y = self.matrix.apply(*x);
        [frac(y[0] + self.shift[0]), frac(y[1] + self.shift[1])]
    }

    fn dist(&self, x: &[f64; 2], y: &[f64; 2]) -> f64 {
        torus_dist(x, y)
    }
}

/// Closed orbit of T(x, y) = (x + α, x + y): Tⁿ(x, y) = (x + nα, n(n−1)α/2 + nx + y).
pub fn counterexample_orbit_point(alpha: f64, start: [f64; 2], n: u64) -> [f64; 2] {
    let nf = n as f64;
    let tri = (n as u128 * (n as u128).saturating_sub(1) / 2) as f64;
    [
        frac(start[0] + frac_mul(nf, alpha)),
        frac(frac_mul(tri, alpha) + frac_mul(nf, start[0]) + start[1]),
    ]
}

/// The affine map with A = [[1,0],[1,1]], b = (α, 0).
pub fn counterexample_flow(alpha: f64) -> TorusAffine {
    TorusAffine::new(ModularMatrix { a: 1, b: 0, c: 1, d: 1 }, [alpha, 0.0])
}

/// (1/N) Σ e(−n²α/2) f(Tⁿ(α/2, 0)) with f(x, y) = e(y), evaluated through the
/// closed orbit formula. The second coordinate of Tⁿ(α/2, 0) is n²α/2, so the
/// terms cancel and the mean is identically 1.
pub fn counterexample_average(alpha: f64, n: u64) -> Complex64 {
    let start = [alpha / 2.0, 0.0];
    let mut acc = KahanSum::new();
    for k in 1..=n {
        let weight = e(-frac_mul((k * k) as f64, alpha / 2.0));
        let p = counterexample_orbit_point(alpha, start, k);
        acc.add(weight * e(p[1]));
    }
    acc.value() / n as f64
}

/// Same mean, iterating the affine map directly instead of using the closed
/// orbit.
pub fn counterexample_average_iterated(alpha: f64, n: u64) -> Complex64 {
    let flow = counterexample_flow(alpha);
    let mut x = [alpha / 2.0, 0.0];
    let mut acc = KahanSum::new();
    for k in 1..=n {
        x = flow.step(&x);
        let weight = e(-frac_mul((k * k) as f64, alpha / 2.0));
        acc.add(weight * e(x[1]));
    }
    acc.value() / n as f64
}

/// The restriction of T_t to the fiber T × {y}: rotation by t·y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearFiber {
    pub t: i64,
    pub y: f64,
}

impl ShearFiber {
    pub fn rotation(&self) -> f64 {
        frac_mul(self.t as f64, self.y)
    }
}

impl Flow for ShearFiber {
    type Point = f64;

    fn name(&self) -> String {
        format!("shear_fiber(t={},y={:?})", self.t, self.y)
    }

    fn step(&self, x: &f64) -> f64 {
        frac(x + self.rotation())
    }

    fn dist(&self, x: &f64, y: &f64) -> f64 {
        circle_dist(*x, *y)
    }

    fn class(&self) -> FlowClass {
        FlowClass::Isometric
    }
}

pub fn shear_minimal_fiber(t: i64, y: f64) -> ShearFiber {
    ShearFiber { t, y: frac(y) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::orbit;
    use crate::numeric::star_discrepancy;
    use rand::{Rng, SeedableRng};

    const SQRT2M1: f64 = std::f64::consts::SQRT_2 - 1.0;

    fn mm(a: i64, b: i64, c: i64, d: i64) -> ModularMatrix {
        ModularMatrix::new(a, b, c, d).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let m: ModularMatrix = "-5,6;-6,7".parse().unwrap();
        assert_eq!(m, mm(-5, 6, -6, 7));
        assert_eq!(m.to_string(), "-5,6;-6,7");
        assert!("1,2;3,4".parse::<ModularMatrix>().is_err());
        assert!("1,2,3".parse::<ModularMatrix>().is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(classify_entropy(&mm(1, 6, 0, 1)), Entropy::Zero);
        assert_eq!(classify_entropy(&mm(0, 1, -1, 0)), Entropy::Zero);
        assert_eq!(classify_entropy(&mm(0, 1, 1, 0)), Entropy::Zero);
        match classify_entropy(&mm(2, 1, 1, 1)) {
            Entropy::Positive(h) => assert!((h - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-14),
            Entropy::Zero => panic!("cat map has positive entropy"),
        }
        // det −1, trace 1: eigenvalues (1 ± √5)/2
        match classify_entropy(&mm(1, 1, 1, 0)) {
            Entropy::Positive(h) => assert!((h - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-14),
            Entropy::Zero => panic!(),
        }
    }

    #[test]
    fn diag_bound_examples() {
        assert_eq!(diag_bound(&ModularMatrix::IDENTITY).unwrap(), 1.0);
        assert!((diag_bound(&mm(0, 1, -1, 0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(diag_bound(&mm(1, 1, 0, 1)).unwrap_err(), Error::NotDiagonalizable);
        assert!(diag_bound(&mm(2, 1, 1, 1)).is_err());
    }

    #[test]
    fn diag_bound_certificate_order_three() {
        let a = mm(0, 1, -1, -1);
        let c = diag_bound(&a).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let rep = [x[0] - x[0].round(), x[1] - x[1].round()];
            let nx = torus_norm(&x);
            for n in 0..=1000u64 {
                let y = a.pow(n % 3).apply(rep);
                assert!(torus_norm(&[frac(y[0]), frac(y[1])]) <= c * nx + 1e-12);
            }
        }
    }

    #[test]
    fn normal_form_examples() {
        let m = mm(-5, 6, -6, 7);
        let nf = normal_form(&m).unwrap();
        assert_eq!(nf.t, 6);
        assert_eq!(nf.sign, 1);
        assert_eq!(nf.p, mm(1, 0, 1, 1));
        for c in [-7, -1, 3, 12] {
            let nf = normal_form(&mm(1, 0, c, 1)).unwrap();
            assert_eq!(nf.t, -c);
            assert_eq!(nf.p, mm(0, 1, -1, 0));
        }
        let id = normal_form(&ModularMatrix::IDENTITY).unwrap();
        assert_eq!((id.p, id.t), (ModularMatrix::IDENTITY, 0));
        let neg = normal_form(&mm(-1, -3, 0, -1)).unwrap();
        assert_eq!((neg.t, neg.sign), (3, -1));
        assert_eq!(normal_form(&mm(2, 1, 1, 1)).unwrap_err(), Error::NotParabolic);
    }

    #[test]
    fn conjugacy_criterion() {
        assert!(conjugacy_equivalent(6, 6));
        assert!(!conjugacy_equivalent(2, 1));
        assert!(conjugacy_equivalent(8, 2));
        assert!(!conjugacy_equivalent(2, 8));
        assert!(!conjugacy_equivalent(-4, 1));
        assert!(conjugacy_equivalent(0, 0));
        assert!(!conjugacy_equivalent(0, 3));
    }

    #[test]
    fn conjugator_search() {
        assert!(find_integral_conjugator(6, 6, 2).is_some());
        assert!(find_integral_conjugator(2, 1, 4).is_none());
        // T_8 P = P T_2 holds for P = diag(2, 1/2), which is rational, not integral
        assert!(find_integral_conjugator(8, 2, 6).is_none());
    }

    #[test]
    fn counterexample_identity() {
        assert!((counterexample_average(0.3, 1) - 1.0).norm() < 1e-12);
        let closed = counterexample_average(SQRT2M1, 10_000);
        assert!((closed - 1.0).norm() < 1e-9);
        let raw = counterexample_average_iterated(SQRT2M1, 10_000);
        assert!((raw - closed).norm() < 1e-6);
    }

    #[test]
    fn closed_orbit_matches_iteration() {
        let flow = counterexample_flow(SQRT2M1);
        let o = orbit(&flow, [0.2, 0.7], 500);
        for (n, p) in o.points.iter().enumerate() {
            let q = counterexample_orbit_point(SQRT2M1, [0.2, 0.7], n as u64);
            assert!(torus_dist(p, &q) < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn shear_fibers() {
        let f = shear_minimal_fiber(1, 0.0);
        assert_eq!(f.step(&0.3), 0.3);
        let g = shear_minimal_fiber(2, 0.25);
        assert!(circle_dist(orbit(&g, 0.1, 2).points[2], 0.1) < 1e-15);
        assert!((g.step(&0.1) - 0.6).abs() < 1e-15);
        let h = shear_minimal_fiber(1, SQRT2M1);
        let pts = orbit(&h, 0.0, 9_999).points;
        assert!(star_discrepancy(&pts) < 0.02);
    }

    #[test]
    fn shear_is_fiber_isometric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for t in [-3i64, 1, 4] {
            let flow = TorusAffine::automorphism(ModularMatrix::shear(t));
            for _ in 0..1000 {
                let y = rng.gen::<f64>();
                let (p, q) = ([rng.gen::<f64>(), y], [rng.gen::<f64>(), y]);
                let (fp, fq) = (flow.step(&p), flow.step(&q));
                assert!((torus_dist(&fp, &fq) - torus_dist(&p, &q)).abs() < 1e-12);
            }
        }
    }
}
