use crate::expr::{EvalError, ParseError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation failed at ({t}, {x}): {source}")]
    Eval {
        t: f64,
        x: f64,
        #[source]
        source: EvalError,
    },
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
    #[error("tangent vectors have different base points")]
    MismatchedBase,
    #[error("metric is not Lorentzian at ({t}, {x}) (det = {det})")]
    NotLorentzian { t: f64, x: f64, det: f64 },
    #[error("vector is not timelike at ({t}, {x}) (g(V,V) = {norm2})")]
    NotTimelike { t: f64, x: f64, norm2: f64 },
    #[error("metric is not degenerate at ({t}, {x}) (det = {det})")]
    NotDegenerate { t: f64, x: f64, det: f64 },
    #[error("metric is degenerate at ({t}, {x}) (det = {det})")]
    Degenerate { t: f64, x: f64, det: f64 },
    #[error("metric components vanish at ({t}, {x}); radical is not one-dimensional")]
    ZeroMatrix { t: f64, x: f64 },
    #[error("point ({t}, {x}) cannot be brought into the fundamental domain: {reason}")]
    OutsideDomain { t: f64, x: f64, reason: &'static str },
    #[error("singular point at x = {x}: {reason}")]
    Singular { x: f64, reason: &'static str },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
