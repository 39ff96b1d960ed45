//! Monte Carlo toolkit for one-dimensional Brownian trees.
//!
//! The crate simulates the Brownian snake driven by excursion-type lifetime
//! processes, the re-rooting transform at the spatial minimum, rejection and
//! spine-decomposition samplers for snakes conditioned to stay positive, and
//! a set of estimators that verify the classical constants attached to these
//! objects (hitting constants, positivity probabilities, limit constants).
//!
//! Core path types and samplers are generic over the floating-point scalar
//! through [`Scalar`]; the concrete aliases below pin the default `f64`
//! instantiation used by the estimators and the CLI.

pub mod conditional;
pub mod discrete;
pub mod path;
pub mod pathgen;
pub mod quad;
pub mod report;
pub mod reroot;
pub mod rng;
pub mod scalar;
pub mod snake;
pub mod stats;
pub mod verify;

pub use path::{ExcursionGrid, PathGrid};
pub use report::{EstimateReport, Verdict};
pub use rng::RandomStream;
pub use scalar::{cst, real, Scalar};

/// Default scalar for estimation work.
pub type Real = f64;
/// `PathGrid` at the default scalar.
pub type Path = PathGrid<Real>;
/// `ExcursionGrid` at the default scalar.
pub type Excursion = ExcursionGrid<Real>;
/// Snake sample at the default scalar.
pub type Snake = snake::SnakeSample<Real>;
/// Re-rooted snake sample at the default scalar.
pub type Rerooted = reroot::RerootedSample<Real>;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {why}")]
    Parameter { name: &'static str, why: String },
    #[error("excursion contract violated: {0}")]
    ExcursionContract(String),
    #[error("histogram edges do not cover the {side} end of the head range: {detail}")]
    Coverage { side: &'static str, detail: String },
    #[error("quadrature did not converge (residual {residual:e})")]
    Quadrature { residual: f64 },
    #[error("table does not cover requested argument: {0}")]
    TableRange(String),
    #[error("cached table key mismatch: {0}")]
    CacheKey(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err(name: &'static str, why: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        why: why.into(),
    }
}
