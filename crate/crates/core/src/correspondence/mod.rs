//! The moduli-space correspondence `X ∘ Y^-1` for four marked points, presented by a
//! rational g-map on `P^1 \ {0, 1, ∞}`.

pub mod branch;
pub mod ends;
pub mod model;
pub mod orbit;
pub mod pcf;

use thiserror::Error;

use crate::lambda::LambdaError;
use crate::numeric::NumericError;

pub use branch::{inverse_branch, Tracker};
pub use ends::{end_dynamics, EndEntry, EndReport, EndSummary, EndVerdict};
pub use model::{
    build_constant_model, build_isometric_model, build_model, constant_model_report, x_properness, ConstantReport, End,
    GMapModel, GMapSpec, ModelKind, Properness,
};
pub use orbit::{orbit_verify, synthesize_orbit, systole_proxy, ModuliOrbit};
pub use pcf::{euclidean_expansion_certificate, pcf_hyperbolic_check, ExpansionCertificate, PcfReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
    #[error("g-map must have degree >= 2, got {0}")]
    DegreeTooLow(usize),
    #[error("critical value {0} of g is not one of 0, 1, ∞; Y is not a covering over the moduli space")]
    NotACovering(String),
    #[error("g does not map the ends {{0, 1, ∞}} into themselves (end {0} escapes)")]
    EndsNotInvariant(String),
    #[error("g has no fixed point off {{0, 1, ∞}}")]
    NoInteriorFixedPoint,
    #[error("operation requires a {expected} model")]
    WrongKind { expected: &'static str },
    #[error("inverse branch collides with another preimage near {0}")]
    BranchCollision(String),
    #[error("no repelling fixed end to synthesize orbits from")]
    NoRepellingEnd,
    #[error("point lies on an end of the moduli space")]
    AtEnd,
    #[error("orbifold is not Euclidean (euler characteristic {0})")]
    NotEuclidean(String),
    #[error("orbit synthesis exceeded {0} steps in one phase")]
    StepLimit(usize),
    #[error("continuation stalled near {0}")]
    Stall(String),
}
