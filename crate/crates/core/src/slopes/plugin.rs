//! Slope maps declared by table, for maps that are not given by a g-map.
//!
//! ```toml
//! name = "blowup-lattes"
//! [[entries]]
//! source = "1/0"
//! image = "1/0"
//! multiplier = "1"
//! [affine]
//! twist = "1/0"   # the map commutes with this twist power
//! power = 2
//! ```
//!
//! A slope is reduced modulo the affine twist to a table entry; the image is carried back by the
//! same twist power. Slopes outside every table orbit map to the trivial class.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;

use super::{SlopeError, SlopeMap, SlopePullbackResult};
use crate::curve::{act_matrix, twist_matrix};
use crate::Slope;

#[derive(Clone, Debug, Deserialize)]
struct Entry {
    source: Slope,
    image: Slope,
    multiplier: String,
}

#[derive(Clone, Debug, Deserialize)]
struct Affine {
    twist: Slope,
    power: i64,
}

#[derive(Clone, Debug, Deserialize)]
struct PluginFile {
    name: String,
    #[serde(default)]
    entries: Vec<Entry>,
    affine: Option<Affine>,
}

#[derive(Clone, Debug)]
pub struct PluginSlopeMap {
    pub name: String,
    table: BTreeMap<Slope, (Slope, BigRational)>,
    affine: Option<(Slope, i64)>,
}

fn parse_ratio(s: &str) -> Result<BigRational, SlopeError> {
    let bad = || SlopeError::Plugin(format!("bad multiplier {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (BigInt, BigInt) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl PluginSlopeMap {
    pub fn from_toml(text: &str) -> Result<Self, SlopeError> {
        let f: PluginFile = toml::from_str(text).map_err(|e| SlopeError::Plugin(e.to_string()))?;
        let affine = match f.affine {
            Some(a) if a.power == 0 || a.twist.is_trivial() => {
                return Err(SlopeError::Plugin("affine rule needs a curve and a nonzero power".into()))
            }
            Some(a) => Some((a.twist, a.power)),
            None => None,
        };
        let mut map = PluginSlopeMap { name: f.name, table: BTreeMap::new(), affine };
        for e in f.entries {
            if e.source.is_trivial() {
                return Err(SlopeError::Plugin("table source must be a curve".into()));
            }
            // Store against the reduced representative, carrying the image along.
            let (key, n) = map.reduce(&e.source)?;
            let image = map.shift(&e.image, &-n)?;
            map.table.insert(key, (image, parse_ratio(&e.multiplier)?));
        }
        Ok(map)
    }

    /// Representative of `s` modulo the affine twist, and the exponent `n` with `T^{n·power}(rep) = s`.
    fn reduce(&self, s: &Slope) -> Result<(Slope, BigInt), SlopeError> {
        let Some((t, power)) = &self.affine else { return Ok((s.clone(), BigInt::zero())) };
        let ((tp, tq), (p, q)) = (t.pq()?, s.pq()?);
        // A = [[tp, u], [tq, v]] in SL2(Z) carries 1/0 to t; in its frame the twist shifts a by 2mc.
        let e = tp.extended_gcd(tq);
        let (u, v) = (-e.y * e.gcd.signum(), e.x * e.gcd.signum());
        let a = &v * p - &u * q;
        let c = tp * q - tq * p;
        if c.is_zero() {
            return Ok((s.clone(), BigInt::zero()));
        }
        let period = BigInt::from(2 * power) * &c;
        let n = a.div_floor(&period.abs()) * period.signum();
        let rep_a = &a - &n * &period;
        let rep = Slope::new(tp * &rep_a + &u * &c, tq * &rep_a + &v * &c)?;
        Ok((rep, n))
    }

    /// Apply the `n`-th power of the affine twist.
    fn shift(&self, s: &Slope, n: &BigInt) -> Result<Slope, SlopeError> {
        match &self.affine {
            Some((t, power)) if !s.is_trivial() && !n.is_zero() => {
                Ok(act_matrix(&twist_matrix(t, &(BigInt::from(*power) * n))?, s)?)
            }
            _ => Ok(s.clone()),
        }
    }
}

impl SlopeMap for PluginSlopeMap {
    fn pullback(&self, s: &Slope) -> Result<SlopePullbackResult, SlopeError> {
        if s.is_trivial() {
            return Err(SlopeError::TrivialSource);
        }
        let (rep, n) = self.reduce(s)?;
        let Some((img, mult)) = self.table.get(&rep) else { return Ok(SlopePullbackResult::trivial(s.clone(), 1)) };
        let image = self.shift(img, &n)?;
        let k = mult.denom().clone();
        let power = mult.numer().clone();
        let k = usize::try_from(&k).map_err(|_| SlopeError::Plugin("multiplier denominator too large".into()))?;
        if image.is_trivial() {
            return Ok(SlopePullbackResult::trivial(s.clone(), k));
        }
        Ok(SlopePullbackResult { source: s.clone(), k, image, power, multiplier: mult.clone() })
    }
}
