//! Signature-changing semi-Riemannian metrics in two dimensions.
//!
//! The crate evaluates metric fields such as the rotating Minkowski metric
//! and the crosscap quadratic metric, builds transformed metrics
//! `g + f · V♭ ⊗ V♭`, extracts and analyses their degeneracy loci, integrates
//! geodesics, and runs causal-trapping experiments. Quotient topologies
//! (Möbius strips, the projective-plane square) are handled through a chart
//! atlas with explicit deck maps.

pub mod atlas;
pub mod causal;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod locus;
pub mod ode;
pub mod prescription;

pub use error::{Error, Result};
pub use geometry::{
    complete_orthonormal_frame, eval_metric, inner, lower_index, parse_field_expr, rotating_metric,
    ChartPoint, Covector, MetricSample, MetricSpec, ScalarField, SignatureClass, Sym2,
    TangentVector, VectorField, Window,
};
