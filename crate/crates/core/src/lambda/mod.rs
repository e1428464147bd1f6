//! Thurston linear transformation: construction, spectral radius, orbifold data.

pub mod orbifold;
pub mod poly;
pub mod spec;
pub mod spectral;

use thiserror::Error;

pub use orbifold::{orbifold_signature, Nu, OrbifoldSignature, Portrait};
pub use spec::{
    build_lambda, invariance_check, kernel_columns, Component, InvarianceStatus, LambdaMatrix, PullbackSpec,
};
pub use spectral::{spectral_radius, thurston_verdict, SpectralRadius, Verdict};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LambdaError {
    #[error("malformed pullback spec: {0}")]
    MalformedSpec(String),
    #[error("malformed portrait: {0}")]
    MalformedPortrait(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("orbifold is not hyperbolic (euler characteristic {euler}); the spectral criterion does not apply")]
    EuclideanOrbifold { euler: String },
    #[error("spectral radius interval [{lo}, {hi}] straddles 1")]
    Undecided { lo: f64, hi: f64 },
    #[error("input error: {0}")]
    Input(String),
}
