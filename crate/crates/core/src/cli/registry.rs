//! Named sequences, flows and observables available to configs.

use super::config::Component;
use crate::circle::{build_denjoy, rotation_flow};
use crate::error::{Error, Result};
use crate::flow::{ConstantOne, Flow, FnObservable, IdentityFlow, Observable};
use crate::interval::QuadraticMap;
use crate::numeric::e;
use crate::padic::{poly_flow, rational_flow, AddingMachine, PadicInt, PadicPoly, ProjPoint, DEFAULT_PRECISION};
use crate::seq::{liouville_sequence, mobius_sequence, phase_sequence, subnormal_sequence, PhaseKind, WeightSequence};
use crate::torus::{ModularMatrix, TorusAffine};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Sequence,
    Flow,
    Observable,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::Sequence => "sequence",
            Kind::Flow => "flow",
            Kind::Observable => "observable",
        }
    }
}

/// State spaces that observables are defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Circle,
    Torus,
    Interval,
    Padic,
    Projective,
    Any,
}

impl Space {
    fn label(self) -> &'static str {
        match self {
            Space::Circle => "circle",
            Space::Torus => "torus",
            Space::Interval => "interval",
            Space::Padic => "Z_p",
            Space::Projective => "P1(Q_p)",
            Space::Any => "any",
        }
    }
}

pub struct Param {
    pub key: &'static str,
    pub ty: &'static str,
    pub required: bool,
}

const fn req(key: &'static str, ty: &'static str) -> Param {
    Param { key, ty, required: true }
}

const fn opt(key: &'static str, ty: &'static str) -> Param {
    Param { key, ty, required: false }
}

pub struct Entry {
    pub kind: Kind,
    pub name: &'static str,
    pub space: Space,
    pub params: &'static [Param],
    pub about: &'static str,
}

pub const REGISTRY: &[Entry] = &[
    Entry { kind: Kind::Sequence, name: "mobius", space: Space::Any, params: &[req("n", "int")], about: "Möbius function mu(n)" },
    Entry { kind: Kind::Sequence, name: "liouville", space: Space::Any, params: &[req("n", "int")], about: "Liouville function" },
    Entry { kind: Kind::Sequence, name: "quadratic_phase", space: Space::Any, params: &[req("n", "int"), req("alpha", "float")], about: "e(n^2 alpha)" },
    Entry { kind: Kind::Sequence, name: "n_log_n", space: Space::Any, params: &[req("n", "int"), req("c", "float")], about: "e(c n log n)" },
    Entry { kind: Kind::Sequence, name: "polynomial_phase", space: Space::Any, params: &[req("n", "int"), req("coeffs", "[float]")], about: "e(sum coeffs[k] n^k)" },
    Entry { kind: Kind::Sequence, name: "exponential", space: Space::Any, params: &[req("n", "int"), req("alpha", "float")], about: "e(n alpha)" },
    Entry { kind: Kind::Sequence, name: "subnormal", space: Space::Any, params: &[req("n", "int"), req("tau", "float"), opt("seed", "int")], about: "Rademacher signs times n^(-tau); seed mandatory here or globally" },
    Entry { kind: Kind::Flow, name: "identity", space: Space::Circle, params: &[], about: "identity on the circle" },
    Entry { kind: Kind::Flow, name: "rotation", space: Space::Circle, params: &[req("rho", "float")], about: "x -> x + rho mod 1" },
    Entry { kind: Kind::Flow, name: "denjoy", space: Space::Circle, params: &[req("rho", "float"), opt("trunc", "int")], about: "Denjoy map with gaps c/(n^2+2), default trunc 10000" },
    Entry { kind: Kind::Flow, name: "torus_affine", space: Space::Torus, params: &[req("matrix", "\"a,b;c,d\""), req("shift", "[float, float]")], about: "x -> Ax + b on T^2" },
    Entry { kind: Kind::Flow, name: "torus_auto", space: Space::Torus, params: &[req("matrix", "\"a,b;c,d\"")], about: "x -> Ax on T^2" },
    Entry { kind: Kind::Flow, name: "padic_poly", space: Space::Padic, params: &[req("p", "int"), req("coeffs", "[int]"), opt("precision", "int")], about: "x -> P(x) on Z_p" },
    Entry { kind: Kind::Flow, name: "padic_rational", space: Space::Projective, params: &[req("p", "int"), req("num", "[int]"), req("den", "[int]"), opt("precision", "int")], about: "z -> N(z)/D(z) on P1(Q_p), good reduction checked on samples" },
    Entry { kind: Kind::Flow, name: "quadratic_family", space: Space::Interval, params: &[req("t", "float")], about: "x -> t - (1+t) x^2 on [-1, 1]" },
    Entry { kind: Kind::Flow, name: "adding_machine", space: Space::Padic, params: &[req("p", "int"), opt("precision", "int")], about: "x -> x + 1 on Z_p" },
    Entry { kind: Kind::Observable, name: "constant", space: Space::Any, params: &[], about: "f = 1" },
    Entry { kind: Kind::Observable, name: "character", space: Space::Circle, params: &[req("k", "int")], about: "e(k x)" },
    Entry { kind: Kind::Observable, name: "trig_poly", space: Space::Circle, params: &[req("coeffs", "[float]")], about: "sum a_m e(m x), m = -M..M" },
    Entry { kind: Kind::Observable, name: "fiber_character", space: Space::Torus, params: &[req("k1", "int"), req("k2", "int")], about: "e(k1 x + k2 y)" },
    Entry { kind: Kind::Observable, name: "coordinate", space: Space::Interval, params: &[], about: "f(x) = x" },
    Entry { kind: Kind::Observable, name: "padic_character", space: Space::Padic, params: &[req("m", "int")], about: "e(x mod p^m / p^m); 1 off Z_p on P1" },
];

fn lookup(kind: Kind, name: &str) -> Option<&'static Entry> {
    REGISTRY.iter().find(|e| e.kind == kind && e.name == name)
}

/// Name and parameter keys must match a registry schema.
pub fn check_component(kind: Kind, c: &Component) -> std::result::Result<(), String> {
    let entry = lookup(kind, &c.name).ok_or_else(|| format!("unknown {} `{}` (see `oscillate list`)", kind.label(), c.name))?;
    for key in c.params.keys() {
        if !entry.params.iter().any(|p| p.key == key) {
            return Err(format!("{} `{}` has no parameter `{key}`", kind.label(), c.name));
        }
    }
    for p in entry.params.iter().filter(|p| p.required) {
        if !c.params.contains_key(p.key) {
            return Err(format!("{} `{}` needs parameter `{}` ({})", kind.label(), c.name, p.key, p.ty));
        }
    }
    Ok(())
}

pub fn check_observable_fits(flow: &str, observable: &str) -> std::result::Result<(), String> {
    let (Some(f), Some(o)) = (lookup(Kind::Flow, flow), lookup(Kind::Observable, observable)) else {
        return Ok(());
    };
    let fits = o.space == Space::Any || o.space == f.space || (o.space == Space::Padic && f.space == Space::Projective);
    if fits {
        Ok(())
    } else {
        Err(format!("observable `{observable}` lives on {}, flow `{flow}` on {}", o.space.label(), f.space.label()))
    }
}

/// The registry as an aligned text table, in registration order.
pub fn list_registry() -> String {
    let rows: Vec<[String; 4]> = REGISTRY
        .iter()
        .map(|e| {
            let params = e
                .params
                .iter()
                .map(|p| if p.required { format!("{}: {}", p.key, p.ty) } else { format!("[{}: {}]", p.key, p.ty) })
                .collect::<Vec<_>>()
                .join(", ");
            let params = if params.is_empty() { "-".to_string() } else { params };
            [e.kind.label().to_string(), e.name.to_string(), e.space.label().to_string(), format!("{params}  {}", e.about)]
        })
        .collect();
    let w0 = rows.iter().map(|r| r[0].len()).max().unwrap_or(0).max(4);
    let w1 = rows.iter().map(|r| r[1].len()).max().unwrap_or(0);
    let w2 = rows.iter().map(|r| r[2].chars().count()).max().unwrap_or(0).max(5);
    let mut out = format!("{:w0$}  {:w1$}  {:w2$}  parameters\n", "kind", "name", "space");
    for r in rows {
        out.push_str(&format!("{:w0$}  {:w1$}  {:w2$}  {}\n", r[0], r[1], r[2], r[3]));
    }
    out
}

fn param<'a>(c: &'a Component, key: &str) -> Result<&'a toml::Value> {
    c.params.get(key).ok_or_else(|| Error::InvalidArgument(format!("`{}` needs `{key}`", c.name)))
}

pub fn float(v: &toml::Value, what: &str) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::InvalidArgument(format!("`{what}` must be a number"))),
    }
}

fn int(v: &toml::Value, what: &str) -> Result<i64> {
    v.as_integer().ok_or_else(|| Error::InvalidArgument(format!("`{what}` must be an integer")))
}

fn uint(v: &toml::Value, what: &str) -> Result<usize> {
    usize::try_from(int(v, what)?).map_err(|_| Error::InvalidArgument(format!("`{what}` must be nonnegative")))
}

fn floats(v: &toml::Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidArgument(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| float(x, what))
        .collect()
}

fn ints(v: &toml::Value, what: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidArgument(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| int(x, what))
        .collect()
}

fn f(c: &Component, key: &str) -> Result<f64> {
    float(param(c, key)?, key)
}

fn u(c: &Component, key: &str) -> Result<usize> {
    uint(param(c, key)?, key)
}

fn prime_and_precision(c: &Component) -> Result<(u32, usize)> {
    let p = u32::try_from(u(c, "p")?).map_err(|_| Error::InvalidArgument("p too large".into()))?;
    let k = match c.params.get("precision") {
        Some(v) => uint(v, "precision")?,
        None => DEFAULT_PRECISION,
    };
    Ok((p, k))
}

/// Builds a weight sequence; `seed` is the fallback for stochastic entries.
pub fn build_sequence(c: &Component, seed: Option<u64>) -> Result<WeightSequence> {
    let n = u(c, "n")?;
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length n must be positive".into()));
    }
    Ok(match c.name.as_str() {
        "mobius" => mobius_sequence(n),
        "liouville" => liouville_sequence(n),
        "quadratic_phase" => phase_sequence(&PhaseKind::Quadratic { alpha: f(c, "alpha")? }, n),
        "n_log_n" => phase_sequence(&PhaseKind::NLogN { c: f(c, "c")? }, n),
        "polynomial_phase" => phase_sequence(&PhaseKind::Polynomial { coeffs: floats(param(c, "coeffs")?, "coeffs")? }, n),
        "exponential" => phase_sequence(&PhaseKind::Polynomial { coeffs: vec![0.0, f(c, "alpha")?] }, n),
        "subnormal" => {
            let s = match c.params.get("seed") {
                Some(v) => Some(uint(v, "seed")? as u64),
                None => seed,
            };
            let s = s.ok_or_else(|| Error::InvalidArgument("subnormal needs a seed (sequence, experiment, config or --seed)".into()))?;
            subnormal_sequence(f(c, "tau")?, n, s)?
        }
        other => return Err(Error::InvalidArgument(format!("unknown sequence `{other}`"))),
    })
}

pub type Obs<P> = Box<dyn Observable<P> + Send + Sync>;

/// A flow with its observable, typed by state space.
pub enum System {
    Circle(Box<dyn Flow<Point = f64> + Send + Sync>, Obs<f64>),
    Torus(Box<dyn Flow<Point = [f64; 2]> + Send + Sync>, Obs<[f64; 2]>),
    Interval(Box<dyn Flow<Point = f64> + Send + Sync>, Obs<f64>),
    Padic(Box<dyn Flow<Point = PadicInt> + Send + Sync>, Obs<PadicInt>, u32, usize),
    Projective(Box<dyn Flow<Point = ProjPoint> + Send + Sync>, Obs<ProjPoint>, u32, usize),
}

fn constant<P>() -> Obs<P> {
    Box::new(ConstantOne)
}

fn circle_observable(c: &Component) -> Result<Obs<f64>> {
    Ok(match c.name.as_str() {
        "constant" => constant(),
        "character" => {
            let k = int(param(c, "k")?, "k")? as f64;
            Box::new(FnObservable::new(format!("character(k={k})"), move |x: &f64| e(k * x)))
        }
        "trig_poly" => {
            let a = floats(param(c, "coeffs")?, "coeffs")?;
            if a.len() % 2 == 0 {
                return Err(Error::InvalidArgument("trig_poly needs 2M+1 coefficients".into()));
            }
            let m = (a.len() / 2) as i64;
            let name = format!("trig_poly({a:?})");
            Box::new(FnObservable::new(name, move |x: &f64| {
                a.iter().enumerate().map(|(i, &ai)| ai * e((i as i64 - m) as f64 * x)).sum::<Complex64>()
            }))
        }
        other => return Err(Error::InvalidArgument(format!("observable `{other}` does not act on the circle"))),
    })
}

fn padic_character(c: &Component, p: u32, k: usize) -> Result<(usize, f64)> {
    let m = u(c, "m")?;
    if m == 0 || m > k || (p as f64).powi(m as i32) > 2f64.powi(53) {
        return Err(Error::InvalidArgument(format!("padic_character m = {m} outside 1..=min(precision, 53 bits)")));
    }
    Ok((m, (p as f64).powi(m as i32)))
}

pub fn build_system(flow: &Component, obs: &Component) -> Result<System> {
    Ok(match flow.name.as_str() {
        "identity" => System::Circle(Box::new(IdentityFlow), circle_observable(obs)?),
        "rotation" => System::Circle(Box::new(rotation_flow(f(flow, "rho")?)?), circle_observable(obs)?),
        "denjoy" => {
            let trunc = match flow.params.get("trunc") {
                Some(v) => uint(v, "trunc")?,
                None => 10_000,
            };
            System::Circle(Box::new(build_denjoy(f(flow, "rho")?, trunc)?), circle_observable(obs)?)
        }
        "torus_affine" | "torus_auto" => {
            let text = param(flow, "matrix")?.as_str().ok_or_else(|| Error::InvalidArgument("`matrix` must be a string".into()))?;
            let m: ModularMatrix = text.parse()?;
            let map = if flow.name == "torus_auto" {
                TorusAffine::automorphism(m)
            } else {
                let s = floats(param(flow, "shift")?, "shift")?;
                if s.len() != 2 {
                    return Err(Error::InvalidArgument("`shift` needs two entries".into()));
                }
                TorusAffine::new(m, [s[0], s[1]])
            };
            let o: Obs<[f64; 2]> = match obs.name.as_str() {
                "constant" => constant(),
                "fiber_character" => {
                    let (k1, k2) = (int(param(obs, "k1")?, "k1")? as f64, int(param(obs, "k2")?, "k2")? as f64);
                    Box::new(FnObservable::new(format!("fiber_character(k1={k1},k2={k2})"), move |p: &[f64; 2]| {
                        e(k1 * p[0] + k2 * p[1])
                    }))
                }
                other => return Err(Error::InvalidArgument(format!("observable `{other}` does not act on the torus"))),
            };
            System::Torus(Box::new(map), o)
        }
        "quadratic_family" => {
            let o: Obs<f64> = match obs.name.as_str() {
                "constant" => constant(),
                "coordinate" => Box::new(FnObservable::new("coordinate", |x: &f64| Complex64::new(*x, 0.0))),
                other => return Err(Error::InvalidArgument(format!("observable `{other}` does not act on the interval"))),
            };
            System::Interval(Box::new(QuadraticMap::new(f(flow, "t")?)?), o)
        }
        "padic_poly" | "adding_machine" => {
            let (p, k) = prime_and_precision(flow)?;
            let map: Box<dyn Flow<Point = PadicInt> + Send + Sync> = if flow.name == "adding_machine" {
                PadicInt::parse(p, k, "0")?;
                Box::new(AddingMachine { p, k })
            } else {
                Box::new(poly_flow(PadicPoly::from_i64(p, k, &ints(param(flow, "coeffs")?, "coeffs")?)?))
            };
            let o: Obs<PadicInt> = match obs.name.as_str() {
                "constant" => constant(),
                "padic_character" => {
                    let (m, pm) = padic_character(obs, p, k)?;
                    Box::new(FnObservable::new(format!("padic_character(m={m})"), move |x: &PadicInt| {
                        e(x.residue(m) as f64 / pm)
                    }))
                }
                other => return Err(Error::InvalidArgument(format!("observable `{other}` does not act on Z_p"))),
            };
            System::Padic(map, o, p, k)
        }
        "padic_rational" => {
            let (p, k) = prime_and_precision(flow)?;
            let num = PadicPoly::from_i64(p, k, &ints(param(flow, "num")?, "num")?)?;
            let den = PadicPoly::from_i64(p, k, &ints(param(flow, "den")?, "den")?)?;
            let map = rational_flow(num, den, 2000, 0)?;
            let o: Obs<ProjPoint> = match obs.name.as_str() {
                "constant" => constant(),
                "padic_character" => {
                    let (m, pm) = padic_character(obs, p, k)?;
                    Box::new(FnObservable::new(format!("padic_character(m={m})"), move |z: &ProjPoint| match z.as_int() {
                        Some(x) => e(x.residue(m) as f64 / pm),
                        None => Complex64::new(1.0, 0.0),
                    }))
                }
                other => return Err(Error::InvalidArgument(format!("observable `{other}` does not act on P1(Q_p)"))),
            };
            System::Projective(Box::new(map), o, p, k)
        }
        other => return Err(Error::InvalidArgument(format!("unknown flow `{other}`"))),
    })
}

fn start_float(v: &toml::Value) -> Result<f64> {
    float(v, "start")
}

/// Parses `start` for the state space of `sys`.
pub enum Start {
    Real(f64),
    Pair([f64; 2]),
    Padic(PadicInt),
    Proj(ProjPoint),
}

pub fn parse_start(sys: &System, v: &toml::Value) -> Result<Start> {
    Ok(match sys {
        System::Circle(..) => {
            let x = start_float(v)?;
            if !(0.0..1.0).contains(&x) {
                return Err(Error::InvalidArgument(format!("circle start {x} outside [0, 1)")));
            }
            Start::Real(x)
        }
        System::Interval(..) => {
            let x = start_float(v)?;
            if !(-1.0..=1.0).contains(&x) {
                return Err(Error::InvalidArgument(format!("interval start {x} outside [-1, 1]")));
            }
            Start::Real(x)
        }
        System::Torus(..) => {
            let s = floats(v, "start")?;
            if s.len() != 2 {
                return Err(Error::InvalidArgument("torus start needs two coordinates".into()));
            }
            Start::Pair([s[0], s[1]])
        }
        System::Padic(_, _, p, k) => Start::Padic(padic_start(v, *p, *k)?),
        System::Projective(_, _, p, k) => match v.as_str() {
            Some("inf") => Start::Proj(ProjPoint::infinity(*p, *k)),
            _ => Start::Proj(ProjPoint::from_int(padic_start(v, *p, *k)?)),
        },
    })
}

fn padic_start(v: &toml::Value, p: u32, k: usize) -> Result<PadicInt> {
    match v {
        toml::Value::Integer(i) => Ok(PadicInt::from_i64(p, k, *i)),
        toml::Value::String(s) => PadicInt::parse(p, k, s),
        _ => Err(Error::InvalidArgument("p-adic start must be an integer or a digit string".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_contract() {
        let names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
        for n in [
            "mobius", "liouville", "quadratic_phase", "subnormal", "rotation", "denjoy", "torus_affine", "torus_auto", "padic_poly",
            "padic_rational", "quadratic_family", "adding_machine",
        ] {
            assert!(names.contains(&n), "{n}");
        }
        let table = list_registry();
        assert_eq!(table, list_registry());
        assert!(table.lines().count() == REGISTRY.len() + 1);
    }
}
