use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CurveError;
use crate::scalar::IntScalar;

/// Isotopy class of a simple closed curve on the four-marked sphere.
///
/// Essential curves are reduced fractions `p/q` with `q >= 0` (and `p = 1`
/// when `q = 0`). Inessential and peripheral classes collapse to `Trivial`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope<I: IntScalar> {
    Trivial,
    Curve { p: I, q: I },
}

/// Residue of `(p, q)` mod 2; the cusp class of a slope under Γ(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParityClass {
    /// `(1, 0)`: slopes in the orbit of `1/0`.
    E0,
    /// `(0, 1)`: slopes in the orbit of `0/1`.
    E1,
    /// `(1, 1)`: slopes in the orbit of `1/1`.
    EInf,
}

impl<I: IntScalar> Slope<I> {
    /// Reduce `(p, q)` to a normalized slope. `(0, 0)` has no slope.
    pub fn new(p: I, q: I) -> Result<Self, CurveError> {
        if p.is_zero() && q.is_zero() {
            return Err(CurveError::DegenerateSlope);
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g.clone(), q / g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(Slope::Curve { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Self, CurveError> {
        Self::new(I::int(p), I::int(q))
    }

    pub fn infinity() -> Self {
        Slope::Curve { p: I::one(), q: I::zero() }
    }

    pub fn zero() -> Self {
        Slope::Curve { p: I::zero(), q: I::one() }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Slope::Trivial)
    }

    /// `(p, q)` of an essential slope.
    pub fn pq(&self) -> Result<(&I, &I), CurveError> {
        match self {
            Slope::Trivial => Err(CurveError::TrivialCurve),
            Slope::Curve { p, q } => Ok((p, q)),
        }
    }

    pub fn parity(&self) -> Result<ParityClass, CurveError> {
        let (p, q) = self.pq()?;
        Ok(match (p.is_odd(), q.is_odd()) {
            (true, false) => ParityClass::E0,
            (false, true) => ParityClass::E1,
            (true, true) => ParityClass::EInf,
            (false, false) => unreachable!("reduced slope with both entries even"),
        })
    }

    /// Farey height `max(|p|, |q|)`; zero for the trivial class.
    pub fn height(&self) -> I {
        match self {
            Slope::Trivial => I::zero(),
            Slope::Curve { p, q } => {
                let (a, b) = (p.abs(), q.abs());
                if a > b {
                    a
                } else {
                    b
                }
            }
        }
    }

    pub fn convert<J: IntScalar>(&self) -> Slope<J> {
        match self {
            Slope::Trivial => Slope::Trivial,
            Slope::Curve { p, q } => Slope::Curve {
                p: J::from_i128(p.to_i128().expect("slope fits in i128")).unwrap(),
                q: J::from_i128(q.to_i128().expect("slope fits in i128")).unwrap(),
            },
        }
    }
}

/// Geometric intersection number `2|p1 q2 - p2 q1|`.
pub fn intersection<I: IntScalar>(s1: &Slope<I>, s2: &Slope<I>) -> Result<I, CurveError> {
    let (p1, q1) = s1.pq()?;
    let (p2, q2) = s2.pq()?;
    let det = p1.clone() * q2.clone() - p2.clone() * q1.clone();
    Ok(det.abs() * I::int(2))
}

/// All essential slopes with Farey height `1..=max_height`, in a fixed order.
pub fn slopes_up_to_height(max_height: i64) -> Vec<Slope<i64>> {
    let mut out = vec![Slope::infinity(), Slope::zero()];
    for q in 1..=max_height {
        for p in -max_height..=max_height {
            if p != 0 && p.gcd(&q) == 1 {
                out.push(Slope::Curve { p, q });
            }
        }
    }
    out.sort_by_key(|s| (s.height(), s.clone()));
    out
}

impl<I: IntScalar> fmt::Display for Slope<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Trivial => write!(f, "o"),
            Slope::Curve { p, q } => write!(f, "{p}/{q}"),
        }
    }
}

impl<I: IntScalar> FromStr for Slope<I> {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "o" {
            return Ok(Slope::Trivial);
        }
        let (p, q) =
            s.split_once('/').ok_or_else(|| CurveError::Parse(format!("slope `{s}` is not of the form p/q")))?;
        let parse = |t: &str| {
            I::from_str_radix(t.trim(), 10).map_err(|_| CurveError::Parse(format!("bad integer `{t}` in slope")))
        };
        Slope::new(parse(p)?, parse(q)?)
    }
}

impl<I: IntScalar> Serialize for Slope<I> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de, I: IntScalar> Deserialize<'de> for Slope<I> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
