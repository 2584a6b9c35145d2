use thiserror::Error;

/// Errors raised by window arithmetic, symbol handling, operator builders and certifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty or inverted window (b_min={b_min}, b_max={b_max}, a_max={a_max})")]
    EmptyWindow { b_min: i64, b_max: i64, a_max: i64 },

    #[error("empty safe window: margin {margin} exhausts the window")]
    EmptySafeWindow { margin: i64 },

    #[error("index ({a},{b}) is not canonical: need a > b")]
    NonCanonicalIndex { a: i64, b: i64 },

    #[error("index ({a},{b}) lies outside the window")]
    IndexOutsideWindow { a: i64, b: i64 },

    #[error("window mismatch: {0}")]
    WindowMismatch(String),

    #[error("asymmetric symbol: coefficient at ({m},{n}) differs from ({n},{m})")]
    AsymmetricSymbol { m: i64, n: i64 },

    #[error("aliasing risk: grid {grid} is smaller than 2*bandwidth+1 = {required}")]
    AliasingRisk { grid: usize, required: usize },

    #[error("not analytic: polynomial contains conjugate variables")]
    NotAnalytic,

    #[error("radius {0} outside the open interval (0,1)")]
    RadiusOutOfRange(f64),

    #[error("grid {grid} too small for degree {degree} (need at least {required})")]
    GridTooSmall {
        grid: usize,
        degree: usize,
        required: usize,
    },

    #[error("point (s={s}, p={p}) is not in the open symmetrized bidisc")]
    PointOutsideDomain { s: String, p: String },

    #[error("kernel singularity: denominator modulus {0:e}")]
    KernelSingularity(f64),

    #[error("window too small for bandwidth {beta} at size {size}")]
    WindowTooSmall { beta: i64, size: i64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
