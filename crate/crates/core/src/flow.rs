//! The flow abstraction (X, T, d) shared by every concrete system, with
//! streaming orbits and metric sanity checks.

use num_complex::Complex64;

/// What a flow promises about its metric, used by property checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowClass {
    General,
    /// d(Tx, Ty) ≤ d(x, y)
    OneLipschitz,
    /// d(Tx, Ty) = d(x, y)
    Isometric,
}

/// A dynamical system: a metric space with a self-map.
pub trait Flow {
    type Point: Clone;

    fn name(&self) -> String;

    /// The map T.
    fn step(&self, x: &Self::Point) -> Self::Point;

    /// The metric d.
    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn class(&self) -> FlowClass {
        FlowClass::General
    }
}

impl<F: Flow + ?Sized> Flow for &F {
    type Point = F::Point;

    fn name(&self) -> String {
        (**self).name()
    }

    fn step(&self, x: &Self::Point) -> Self::Point {
        (**self).step(x)
    }

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        (**self).dist(x, y)
    }

    fn class(&self) -> FlowClass {
        (**self).class()
    }
}

/// A complex-valued function on the state space.
pub trait Observable<P> {
    fn name(&self) -> String;
    fn eval(&self, x: &P) -> Complex64;
}

/// Observable backed by a closure.
pub struct FnObservable<F> {
    name: String,
    f: F,
}

impl<F> FnObservable<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<P, F: Fn(&P) -> Complex64> Observable<P> for FnObservable<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, x: &P) -> Complex64 {
        (self.f)(x)
    }
}

/// The constant observable f ≡ 1.
pub struct ConstantOne;

impl<P> Observable<P> for ConstantOne {
    fn name(&self) -> String {
        "one".into()
    }

    fn eval(&self, _: &P) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
}

/// Lazily produced orbit x, Tx, T²x, …
pub struct OrbitIter<'a, F: Flow> {
    flow: &'a F,
    next: Option<F::Point>,
}

impl<'a, F: Flow> Iterator for OrbitIter<'a, F> {
    type Item = F::Point;

    fn next(&mut self) -> Option<F::Point> {
        let cur = self.next.take()?;
        self.next = Some(self.flow.step(&cur));
        Some(cur)
    }
}

/// Infinite orbit starting at T⁰x = x.
pub fn orbit_iter<F: Flow>(flow: &F, x: F::Point) -> OrbitIter<'_, F> {
    OrbitIter { flow, next: Some(x) }
}

/// A materialized orbit T⁰x..T^N x.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit<P> {
    pub start: P,
    pub points: Vec<P>,
}

impl<P> Orbit<P> {
    /// Number of steps N (the orbit holds N + 1 points).
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }
}

pub fn orbit<F: Flow>(flow: &F, x: F::Point, n: usize) -> Orbit<F::Point> {
    let points = orbit_iter(flow, x.clone()).take(n + 1).collect();
    Orbit { start: x, points }
}

/// d(Tⁿx, Tⁿz) for n = 1..N along synchronized orbits.
pub fn orbit_distance_trace<F: Flow>(flow: &F, x: F::Point, z: F::Point, n: usize) -> Vec<f64> {
    let mut a = x;
    let mut b = z;
    (0..n)
        .map(|_| {
            a = flow.step(&a);
            b = flow.step(&b);
            flow.dist(&a, &b)
        })
        .collect()
}

/// Samples triples and checks d(x,x) = 0, symmetry and the triangle
/// inequality to `tol`. Returns a description of the first violation.
pub fn check_metric_axioms<F: Flow>(
    flow: &F,
    mut sample: impl FnMut() -> F::Point,
    trials: usize,
    tol: f64,
) -> std::result::Result<(), String> {
    for i in 0..trials {
        let (x, y, z) = (sample(), sample(), sample());
        let dxy = flow.dist(&x, &y);
        if !(dxy >= 0.0) || flow.dist(&x, &x) > tol {
            return Err(format!("trial {i}: nonnegativity/identity"));
        }
        if (dxy - flow.dist(&y, &x)).abs() > tol {
            return Err(format!("trial {i}: symmetry"));
        }
        if flow.dist(&x, &z) > dxy + flow.dist(&y, &z) + tol {
            return Err(format!("trial {i}: triangle inequality"));
        }
    }
    Ok(())
}

/// Largest excess d(Tⁿx,Tⁿy) − d(x,y) (Lipschitz) or |d(Tⁿx,Tⁿy) − d(x,y)|
/// (isometric) over sampled pairs and n ≤ `horizon`.
pub fn class_defect<F: Flow>(
    flow: &F,
    mut sample: impl FnMut() -> F::Point,
    pairs: usize,
    horizon: usize,
) -> f64 {
    let class = flow.class();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let (mut x, mut y) = (sample(), sample());
        let d0 = flow.dist(&x, &y);
        let mut prev = d0;
        for _ in 0..horizon {
            x = flow.step(&x);
            y = flow.step(&y);
            let d = flow.dist(&x, &y);
            let defect = match class {
                FlowClass::Isometric => (d - d0).abs(),
                FlowClass::OneLipschitz => d - prev,
                FlowClass::General => 0.0,
            };
            worst = worst.max(defect);
            prev = d;
        }
    }
    worst
}

/// T = id on the circle R/Z.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityFlow;

impl Flow for IdentityFlow {
    type Point = f64;

    fn name(&self) -> String {
        "identity".into()
    }

    fn step(&self, x: &f64) -> f64 {
        *x
    }

    fn dist(&self, x: &f64, y: &f64) -> f64 {
        crate::numeric::circle_dist(*x, *y)
    }

    fn class(&self) -> FlowClass {
        FlowClass::Isometric
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Shift(f64);

    impl Flow for Shift {
        type Point = f64;
        fn name(&self) -> String {
            "shift".into()
        }
        fn step(&self, x: &f64) -> f64 {
            crate::numeric::frac(x + self.0)
        }
        fn dist(&self, x: &f64, y: &f64) -> f64 {
            crate::numeric::circle_dist(*x, *y)
        }
        fn class(&self) -> FlowClass {
            FlowClass::Isometric
        }
    }

    struct Square;

    impl Flow for Square {
        type Point = f64;
        fn name(&self) -> String {
            "minus-square".into()
        }
        fn step(&self, x: &f64) -> f64 {
            -x * x
        }
        fn dist(&self, x: &f64, y: &f64) -> f64 {
            (x - y).abs()
        }
    }

    #[test]
    fn identity_orbit_is_constant() {
        let o = orbit(&IdentityFlow, 0.3, 5);
        assert_eq!(o.points, vec![0.3; 6]);
        assert_eq!(o.steps(), 5);
    }

    #[test]
    fn quarter_rotation_has_period_four() {
        let o = orbit(&Shift(0.25), 0.0, 4);
        assert_eq!(o.points, vec![0.0, 0.25, 0.5, 0.75, 0.0]);
    }

    #[test]
    fn orbit_points_follow_step() {
        let f = Shift(0.1234);
        let o = orbit(&f, 0.9, 50);
        for w in o.points.windows(2) {
            assert_eq!(w[1], f.step(&w[0]));
        }
    }

    #[test]
    fn distance_traces() {
        assert!(orbit_distance_trace(&Square, 0.4, 0.4, 10).iter().all(|&d| d == 0.0));
        let iso = orbit_distance_trace(&Shift(0.37), 0.1, 0.25, 100);
        assert!(iso.iter().all(|&d| (d - 0.15).abs() < 1e-12));
        let tr = orbit_distance_trace(&Square, 0.5, 0.0, 1000);
        assert!(tr.last().copied().unwrap() < 1e-100);
        let mean = tr.iter().sum::<f64>() / tr.len() as f64;
        assert!(mean < 1e-3);
    }

    #[test]
    fn metric_checks() {
        let mut k = 0u64;
        let mut sample = || {
            k += 1;
            crate::numeric::frac(k as f64 * 0.618_033_988_75)
        };
        assert!(check_metric_axioms(&Shift(0.2), &mut sample, 1000, 1e-12).is_ok());
        assert!(class_defect(&Shift(0.2), &mut sample, 1000, 1000) < 1e-12);
    }
}
