//! Scalar abstractions shared by the exact and floating-point kernels.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Integer type usable for slopes and Γ(2) matrices.
///
/// `i64`/`i128` are fast but overflow on long words; `BigInt` never does.
pub trait IntScalar:
    Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + std::hash::Hash + Send + Sync
{
    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer conversion")
    }

    fn is_odd_int(&self) -> bool {
        self.is_odd()
    }
}

impl IntScalar for i64 {}
impl IntScalar for i128 {}
impl IntScalar for BigInt {}

/// Exact or approximate field used by the linear-algebra kernels.
pub trait FieldScalar: Clone + Debug + PartialOrd + NumAssign + Signed + ToPrimitive + Send + Sync {
    /// `true` when arithmetic is exact (rational), enabling Sturm isolation.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Nearby field element; exact for dyadic inputs on the rational types.
    fn from_f64_approx(v: f64) -> Self;

    /// `"num/den"` for exact types, decimal otherwise.
    fn to_exact_string(&self) -> String;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl FieldScalar for Ratio<BigInt> {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64_approx(v: f64) -> Self {
        Ratio::from_float(v).expect("finite float")
    }

    fn to_exact_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl FieldScalar for Ratio<i64> {
    // Machine-word rationals overflow under bisection; treat as approximate.
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn from_f64_approx(v: f64) -> Self {
        Ratio::approximate_float(v).expect("representable float")
    }

    fn to_exact_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl FieldScalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_approx(v: f64) -> Self {
        v
    }

    fn to_exact_string(&self) -> String {
        self.to_string()
    }
}

impl FieldScalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn from_f64_approx(v: f64) -> Self {
        v as f32
    }

    fn to_exact_string(&self) -> String {
        self.to_string()
    }
}

/// Floating-point real used by the numerical kernels (root finding, path lifting).
pub trait RealScalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("float literal")
    }

    /// Working residual tolerance appropriate for the precision.
    fn residual_tol() -> Self;
}

impl RealScalar for f64 {
    fn residual_tol() -> Self {
        1e-12
    }
}

impl RealScalar for f32 {
    fn residual_tol() -> Self {
        1e-5
    }
}

pub type C<F> = Complex<F>;
