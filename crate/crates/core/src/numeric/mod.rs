//! Floating-point kernels: complex polynomials, rational maps on the sphere,
//! extended-exponent arithmetic.

pub mod cpoly;
pub mod ext;
pub mod gauss;
pub mod rmap;

use thiserror::Error;

pub use cpoly::{CPoly, RootOptions};
pub use ext::ExtComplex;
pub use gauss::GaussRat;
pub use rmap::{RationalMap, SPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("root residual {residual:e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },
    #[error("iteration did not converge after {iters} steps")]
    NoConvergence { iters: usize },
}

/// Tolerances shared by the numerical modules (exposed as CLI flags).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumOptions {
    /// Residual / backward-error bound for roots and Newton corrections.
    pub tol_res: f64,
    /// Chordal distance below which two points are identified.
    pub tol_sep: f64,
    pub max_iter: usize,
}

impl Default for NumOptions {
    fn default() -> Self {
        NumOptions { tol_res: 1e-12, tol_sep: rmap::DEFAULT_TOL_SEP, max_iter: 500 }
    }
}

impl NumOptions {
    pub fn root_options(&self) -> RootOptions<f64> {
        RootOptions { tol_res: self.tol_res, max_iter: self.max_iter }
    }
}

/// Compact, stable label for a point of the sphere (`inf`, `2`, `-0.754878`, `0+2i`).
pub fn point_label(p: &SPoint<f64>) -> String {
    let fmt = |x: f64| {
        let r = (x * 1e6).round() / 1e6;
        let r = if r == 0.0 { 0.0 } else { r };
        format!("{r}")
    };
    match p {
        SPoint::Inf => "inf".into(),
        SPoint::Fin(z) if (z.im * 1e6).round() == 0.0 => fmt(z.re),
        SPoint::Fin(z) => {
            let sign = if z.im < 0.0 { "-" } else { "+" };
            format!("{}{}{}i", fmt(z.re), sign, fmt(z.im.abs()))
        }
    }
}
