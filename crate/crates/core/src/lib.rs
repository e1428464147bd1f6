//! Thurston-style obstruction machinery for degree-two maps and correspondences
//! on the four-marked sphere.

pub mod correspondence;
pub mod curve;
pub mod fixtures;
pub mod lambda;
pub mod monodromy;
pub mod numeric;
pub mod scalar;
pub mod slopes;

use num_bigint::BigInt;

/// Slope with unbounded integer entries.
pub type Slope = curve::Slope<BigInt>;
/// Γ(2) matrix with unbounded integer entries.
pub type TwistMatrix = curve::TwistMatrix<BigInt>;
