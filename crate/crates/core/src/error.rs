use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("requested length {requested} exceeds stored length {stored}")]
    LengthExceeded { requested: usize, stored: usize },
    #[error("{0} and {1} are not coprime")]
    NotCoprime(i64, i64),
    #[error("matrix is not modular: determinant {0}")]
    NotModular(i128),
    #[error("matrix is not diagonalizable over C")]
    NotDiagonalizable,
    #[error("matrix does not have a double eigenvalue +1 or -1")]
    NotParabolic,
    #[error("not a Dirichlet character table: {0}")]
    NotACharacter(String),
    #[error("no cycle of period {period} found at t = {t}")]
    NoCycle { t: f64, period: usize },
    #[error("bisection failed: {0}")]
    BisectionFailed(String),
    #[error("map has no positive fixed point in (0, 1)")]
    NoPositiveFixedPoint,
    #[error("Schwarzian undefined at critical point x = {0}")]
    CriticalPoint(f64),
    #[error("ambiguous nesting at tolerance {0}")]
    AmbiguousNesting(f64),
    #[error("orbit did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("accuracy {requested:e} below truncation tail bound {tail:e}")]
    AccuracyBelowTail { requested: f64, tail: f64 },
    #[error("index {index} outside truncation |n| <= {trunc}")]
    OutsideTruncation { index: i64, trunc: i64 },
    #[error("non-monotone circle map lift detected near x = {0}")]
    NonMonotone(f64),
    #[error("1-Lipschitz check failed: {0}")]
    NotLipschitz(String),
    #[error("projective point has both coordinates zero")]
    ZeroProjectivePoint,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
