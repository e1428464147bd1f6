//! Complex numbers with an unbounded binary exponent, for points extremely close to a puncture.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// `mantissa · 2^exp` with `max(|re|, |im|)` of the mantissa in `[0.5, 1)` (or exactly zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtComplex {
    mantissa: Complex64,
    exp: i64,
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex { mantissa: Complex64::new(0.0, 0.0), exp: 0 };

    pub fn new(mantissa: Complex64, exp: i64) -> Self {
        ExtComplex { mantissa, exp }.normalized()
    }

    pub fn from_c64(z: Complex64) -> Self {
        ExtComplex::new(z, 0)
    }

    fn normalized(self) -> Self {
        let big = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if big == 0.0 || !big.is_finite() {
            return ExtComplex { mantissa: self.mantissa, exp: 0 };
        }
        let (_, e) = frexp(big);
        ExtComplex { mantissa: self.mantissa * 2f64.powi(-e as i32), exp: self.exp + e }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// Nearest `Complex64`; flushes to zero or overflows to infinity out of range.
    pub fn to_c64(&self) -> Complex64 {
        if self.exp > 1100 {
            return self.mantissa * f64::INFINITY;
        }
        if self.exp < -1100 {
            return Complex64::new(0.0, 0.0);
        }
        let half = self.exp / 2;
        self.mantissa * 2f64.powi(half as i32) * 2f64.powi((self.exp - half) as i32)
    }

    /// `ln |z|`, finite for every nonzero value.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn inv(&self) -> Self {
        ExtComplex::new(1.0 / self.mantissa, -self.exp)
    }

    /// The positive real `e^l`, for any finite `l`.
    pub fn from_ln_abs(l: f64) -> Self {
        let b = l / std::f64::consts::LN_2;
        let k = b.floor();
        ExtComplex::new(Complex64::new((b - k).exp2(), 0.0), k as i64)
    }

    /// `z / |z|` (zero stays zero).
    pub fn direction(&self) -> Complex64 {
        if self.is_zero() {
            self.mantissa
        } else {
            self.mantissa / self.mantissa.norm()
        }
    }

    /// Scale by `2^k`.
    pub fn ldexp(&self, k: i64) -> Self {
        ExtComplex { mantissa: self.mantissa, exp: self.exp + k }
    }
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 {
        return (0.0, 0);
    }
    let e = x.abs().log2().floor() as i64 + 1;
    let m = x * 2f64.powi(-e as i32);
    // Guard the rounding of log2 at exact powers of two.
    if m.abs() >= 1.0 {
        (m / 2.0, e + 1)
    } else if m.abs() < 0.5 {
        (m * 2.0, e - 1)
    } else {
        (m, e)
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::from_c64(z)
    }
}

impl Add for ExtComplex {
    type Output = ExtComplex;

    fn add(self, o: ExtComplex) -> ExtComplex {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let shift = big.exp - small.exp;
        if shift > 120 {
            return big;
        }
        ExtComplex::new(big.mantissa + small.mantissa * 2f64.powi(-shift as i32), big.exp)
    }
}

impl Neg for ExtComplex {
    type Output = ExtComplex;

    fn neg(self) -> ExtComplex {
        ExtComplex { mantissa: -self.mantissa, exp: self.exp }
    }
}

impl Sub for ExtComplex {
    type Output = ExtComplex;

    fn sub(self, o: ExtComplex) -> ExtComplex {
        self + (-o)
    }
}

impl Mul for ExtComplex {
    type Output = ExtComplex;

    fn mul(self, o: ExtComplex) -> ExtComplex {
        ExtComplex::new(self.mantissa * o.mantissa, self.exp + o.exp)
    }
}

impl Div for ExtComplex {
    type Output = ExtComplex;

    fn div(self, o: ExtComplex) -> ExtComplex {
        ExtComplex::new(self.mantissa / o.mantissa, self.exp - o.exp)
    }
}

impl Mul<Complex64> for ExtComplex {
    type Output = ExtComplex;

    fn mul(self, o: Complex64) -> ExtComplex {
        ExtComplex::new(self.mantissa * o, self.exp)
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.abs() < 900 {
            let z = self.to_c64();
            return write!(f, "({:e}{:+e}i)", z.re, z.im);
        }
        let log10 = self.exp as f64 * std::f64::consts::LOG10_2;
        let k = log10.floor();
        let m = self.mantissa * 10f64.powf(log10 - k);
        write!(f, "({}{:+}i)e{}", m.re, m.im, k as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survives_far_below_f64_range() {
        let mut z = ExtComplex::from_c64(Complex64::new(0.1, 0.0));
        for _ in 0..1000 {
            z = z * Complex64::new(0.25, 0.0);
        }
        let expected = 0.1f64.ln() + 1000.0 * 0.25f64.ln();
        assert!((z.ln_abs() - expected).abs() < 1e-9);
        assert_eq!(z.to_c64(), Complex64::new(0.0, 0.0));
        let back = (z * z.inv()).to_c64();
        assert!((back - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn arithmetic_matches_f64_in_range() {
        let a = Complex64::new(1.5, -2.0);
        let b = Complex64::new(-0.25, 3.0);
        let (ea, eb) = (ExtComplex::from(a), ExtComplex::from(b));
        assert!(((ea + eb).to_c64() - (a + b)).norm() < 1e-15);
        assert!(((ea - eb).to_c64() - (a - b)).norm() < 1e-15);
        assert!(((ea * eb).to_c64() - a * b).norm() < 1e-14);
        assert!(((ea / eb).to_c64() - a / b).norm() < 1e-15);
    }
}
