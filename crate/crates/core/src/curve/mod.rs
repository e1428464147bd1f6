//! Curves on the four-marked sphere, Γ(2) twist matrices and free-group words.

pub mod matrix;
pub mod slope;
pub mod word;

use thiserror::Error;

pub use matrix::{
    act, act_matrix, classify_parabolic, matrix_of_word, normalizer, twist_matrix, word_of_matrix, Parabolic,
    TwistMatrix,
};
pub use slope::{intersection, slopes_up_to_height, ParityClass, Slope};
pub use word::{FreeWord, Letter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("operation undefined on the trivial curve class")]
    TrivialCurve,
    #[error("twist power must be nonzero")]
    ZeroPower,
    #[error("matrix is not in Γ(2)")]
    NotInGammaTwo,
    #[error("(0, 0) does not define a slope")]
    DegenerateSlope,
    #[error("parse error: {0}")]
    Parse(String),
}
