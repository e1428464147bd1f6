//! Exact Gaussian rationals `a/b + c/d i`, the input format for map coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::NumericError;
use crate::scalar::RealScalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_complex<T: RealScalar>(&self) -> Complex<T> {
        let f = |q: &BigRational| T::lit(q.to_f64().unwrap_or(f64::NAN));
        Complex::new(f(&self.re), f(&self.im))
    }
}

fn parse_rational(t: &str) -> Result<BigRational, NumericError> {
    let bad = || NumericError::Parse(format!("bad rational `{t}`"));
    if t.contains('.') {
        let v: f64 = t.parse().map_err(|_| bad())?;
        return BigRational::from_float(v).ok_or_else(bad);
    }
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Signed coefficient of `i`; a bare sign means unit magnitude.
fn parse_imag(t: &str) -> Result<BigRational, NumericError> {
    match t {
        "" | "+" => Ok(BigRational::one()),
        "-" => Ok(-BigRational::one()),
        _ => parse_rational(t.strip_prefix('+').unwrap_or(t)),
    }
}

impl FromStr for GaussRat {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(NumericError::Parse("empty coefficient".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussRat::new(parse_rational(t.strip_prefix('+').unwrap_or(&t))?, BigRational::zero()));
        };
        let split = body.char_indices().filter(|&(k, c)| k > 0 && (c == '+' || c == '-')).map(|(k, _)| k).next_back();
        match split {
            Some(k) => {
                let re = &body[..k];
                Ok(GaussRat::new(parse_rational(re.strip_prefix('+').unwrap_or(re))?, parse_imag(&body[k..])?))
            }
            None => Ok(GaussRat::new(BigRational::zero(), parse_imag(body)?)),
        }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}i", self.re, sign, self.im.abs())
    }
}

impl Serialize for GaussRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_forms() {
        assert_eq!("1/2+3/4 i".parse::<GaussRat>().unwrap(), GaussRat::new(q(1, 2), q(3, 4)));
        assert_eq!("-2".parse::<GaussRat>().unwrap(), GaussRat::new(q(-2, 1), q(0, 1)));
        assert_eq!("i".parse::<GaussRat>().unwrap(), GaussRat::new(q(0, 1), q(1, 1)));
        assert_eq!("-i".parse::<GaussRat>().unwrap(), GaussRat::new(q(0, 1), q(-1, 1)));
        assert_eq!("1 - i".parse::<GaussRat>().unwrap(), GaussRat::new(q(1, 1), q(-1, 1)));
        assert_eq!("-1/3i".parse::<GaussRat>().unwrap(), GaussRat::new(q(0, 1), q(-1, 3)));
        assert_eq!("0.5".parse::<GaussRat>().unwrap(), GaussRat::new(q(1, 2), q(0, 1)));
        assert!("1/0".parse::<GaussRat>().is_err());
        assert!("x".parse::<GaussRat>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["1/2+3/4i", "-2", "0+1i", "5-1/7i"] {
            let g: GaussRat = s.parse().unwrap();
            assert_eq!(g.to_string().parse::<GaussRat>().unwrap(), g);
        }
    }
}
