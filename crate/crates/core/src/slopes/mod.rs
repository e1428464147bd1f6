//! The virtual endomorphism on the pure mapping class group and the induced map on slopes.

pub mod endo;
pub mod oracle;
pub mod plugin;
pub mod search;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::correspondence::CorrError;
use crate::curve::{CurveError, FreeWord};
use crate::monodromy::MonodromyError;
use crate::numeric::NumericError;
use crate::Slope;

pub use endo::{contraction_ratio_of, NielsenSection, SectionOrbit, VirtualEndo};
pub use oracle::{geometric_oracle, DynamicsSpec};
pub use plugin::PluginSlopeMap;
pub use search::{
    fga_search, kernel_search, obstructed_twist_search, AttractorReport, AttractorVerdict, KernelWitness,
    ObstructionReport, TwistWitness, GROWTH_ALLOWANCE,
};

#[derive(Debug, Error)]
pub enum SlopeError {
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Corr(#[from] CorrError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("{word} is outside the domain; its power {k} lies inside")]
    NotInDomain { word: FreeWord, k: usize },
    #[error("image of a twist power is not parabolic: {0}")]
    InternalNonParabolic(String),
    #[error("the trivial class has no pullback")]
    TrivialSource,
    #[error("degenerate curve representative: {0}")]
    RepresentativeDegenerate(String),
    #[error("no section: {0}")]
    NoSection(String),
    #[error("slope map: {0}")]
    Plugin(String),
}

/// `φ(T_s^k) = T_{s'}^{k'}`, with `k` minimal; a trivial image has `k' = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopePullbackResult {
    pub source: Slope,
    pub k: usize,
    pub image: Slope,
    #[serde(serialize_with = "as_string")]
    pub power: BigInt,
    #[serde(serialize_with = "as_string")]
    pub multiplier: BigRational,
}

fn as_string<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl SlopePullbackResult {
    pub fn trivial(source: Slope, k: usize) -> Self {
        SlopePullbackResult {
            source,
            k,
            image: Slope::Trivial,
            power: BigInt::from(0),
            multiplier: BigRational::from_integer(BigInt::from(0)),
        }
    }
}

/// Anything that pulls slopes back: the virtual endomorphism of a g-map, or a declared table.
pub trait SlopeMap: Sync {
    fn pullback(&self, s: &Slope) -> Result<SlopePullbackResult, SlopeError>;
}
