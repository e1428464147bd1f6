use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use super::LambdaError;

/// Marked points of a branched cover with their images, local degrees and the
/// local degrees of unmarked critical points that land on each marked point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Portrait {
    #[serde(default)]
    pub degree: Option<u32>,
    pub points: Vec<String>,
    pub map: BTreeMap<String, String>,
    /// Missing entries default to 1.
    #[serde(default)]
    pub local_degree: BTreeMap<String, u32>,
    #[serde(default)]
    pub extra_critical: BTreeMap<String, Vec<u32>>,
}

impl Portrait {
    pub fn from_toml(text: &str) -> Result<Self, LambdaError> {
        let p: Portrait = toml::from_str(text).map_err(|e| LambdaError::Input(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn local_deg(&self, point: &str) -> u32 {
        self.local_degree.get(point).copied().unwrap_or(1)
    }

    fn index(&self) -> BTreeMap<&str, usize> {
        self.points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect()
    }

    pub fn validate(&self) -> Result<(), LambdaError> {
        let bad = |m: String| Err(LambdaError::MalformedPortrait(m));
        let idx = self.index();
        if idx.len() != self.points.len() {
            return bad("duplicate point".into());
        }
        for p in &self.points {
            match self.map.get(p) {
                None => return bad(format!("no image for `{p}`")),
                Some(t) if !idx.contains_key(t.as_str()) => return bad(format!("image `{t}` of `{p}` is unmarked")),
                _ => {}
            }
        }
        let keys = self.map.keys().chain(self.local_degree.keys()).chain(self.extra_critical.keys());
        for k in keys {
            if !idx.contains_key(k.as_str()) {
                return bad(format!("unknown point `{k}`"));
            }
        }
        if self.local_degree.values().chain(self.extra_critical.values().flatten()).any(|&d| d == 0) {
            return bad("local degrees must be >= 1".into());
        }
        if let Some(d) = self.degree {
            for x in &self.points {
                let marked: u32 = self.points.iter().filter(|y| self.map[*y] == *x).map(|y| self.local_deg(y)).sum();
                let extra: u32 = self.extra_critical.get(x).map_or(0, |v| v.iter().sum());
                if marked + extra > d {
                    return bad(format!("fiber over `{x}` has total degree {} > {d}", marked + extra));
                }
            }
        }
        Ok(())
    }
}

/// Orbifold weight of a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nu {
    Finite(u64),
    Infinite,
}

impl Nu {
    /// `1 - 1/ν`.
    pub fn defect(&self) -> BigRational {
        match self {
            Nu::Finite(n) => BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(*n)),
            Nu::Infinite => BigRational::one(),
        }
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nu::Finite(n) => write!(f, "{n}"),
            Nu::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Nu {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Nu::Finite(n) => serializer.serialize_u64(*n),
            Nu::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbifoldSignature {
    pub points: Vec<String>,
    pub nu: Vec<Nu>,
    pub euler: BigRational,
}

impl OrbifoldSignature {
    pub fn is_hyperbolic(&self) -> bool {
        self.euler.is_negative()
    }

    pub fn euler_string(&self) -> String {
        format!("{}/{}", self.euler.numer(), self.euler.denom())
    }

    /// Sorted weights greater than one, e.g. `[2, 4, 4]`.
    pub fn signature_type(&self) -> Vec<Nu> {
        let mut v: Vec<Nu> = self.nu.iter().copied().filter(|n| *n != Nu::Finite(1)).collect();
        v.sort();
        v
    }

    pub fn nu_of(&self, point: &str) -> Option<Nu> {
        self.points.iter().position(|p| p == point).map(|i| self.nu[i])
    }
}

impl Serialize for OrbifoldSignature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            nu: BTreeMap<&'a str, Nu>,
            signature: Vec<Nu>,
            euler: String,
            hyperbolic: bool,
        }
        Repr {
            nu: self.points.iter().map(String::as_str).zip(self.nu.iter().copied()).collect(),
            signature: self.signature_type(),
            euler: self.euler_string(),
            hyperbolic: self.is_hyperbolic(),
        }
        .serialize(serializer)
    }
}

/// Every divisibility constraint `ν(y)·deg(f, y) | ν(x)` (and extra critical degrees) holds.
pub fn is_admissible(p: &Portrait, nu: &[Nu]) -> bool {
    let idx = p.index();
    let divides = |a: Nu, b: Nu| match (a, b) {
        (_, Nu::Infinite) => true,
        (Nu::Infinite, Nu::Finite(_)) => false,
        (Nu::Finite(a), Nu::Finite(b)) => b % a == 0,
    };
    let scaled = |n: Nu, d: u32| match n {
        Nu::Finite(v) => Nu::Finite(v * u64::from(d)),
        Nu::Infinite => Nu::Infinite,
    };
    p.points.iter().enumerate().all(|(i, y)| divides(scaled(nu[i], p.local_deg(y)), nu[idx[p.map[y].as_str()]]))
        && p.extra_critical
            .iter()
            .all(|(x, ds)| ds.iter().all(|&d| divides(Nu::Finite(u64::from(d)), nu[idx[x.as_str()]])))
}

/// Least admissible `ν` and `χ = 2 - Σ (1 - 1/ν)`.
pub fn orbifold_signature(p: &Portrait) -> Result<OrbifoldSignature, LambdaError> {
    p.validate()?;
    let n = p.points.len();
    let idx = p.index();
    let image: Vec<usize> = p.points.iter().map(|y| idx[p.map[y].as_str()]).collect();
    let deg: Vec<u64> = p.points.iter().map(|y| u64::from(p.local_deg(y))).collect();

    // Periodic cycles through a critical point carry ν = ∞, as does everything they map to.
    let mut infinite = vec![false; n];
    for start in 0..n {
        let mut x = image[start];
        let mut steps = 0;
        while x != start && steps < n {
            x = image[x];
            steps += 1;
        }
        if x == start {
            let mut cyc = vec![start];
            let mut y = image[start];
            while y != start {
                cyc.push(y);
                y = image[y];
            }
            if cyc.iter().any(|&c| deg[c] > 1) {
                let mut z = start;
                while !infinite[z] {
                    infinite[z] = true;
                    z = image[z];
                }
            }
        }
    }
    for _ in 0..n {
        for y in 0..n {
            if infinite[y] {
                infinite[image[y]] = true;
            }
        }
    }

    let mut nu: Vec<u64> = vec![1; n];
    for (x, ds) in &p.extra_critical {
        let i = idx[x.as_str()];
        nu[i] = ds.iter().fold(nu[i], |acc, &d| acc.lcm(&u64::from(d)));
    }
    let mut seen = BTreeSet::new();
    loop {
        let mut changed = false;
        for y in 0..n {
            let x = image[y];
            if infinite[x] {
                continue;
            }
            let want = nu[y]
                .checked_mul(deg[y])
                .map(|v| nu[x].lcm(&v))
                .ok_or_else(|| LambdaError::MalformedPortrait("orbifold weight overflow".into()))?;
            if want != nu[x] {
                nu[x] = want;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if !seen.insert(nu.clone()) {
            return Err(LambdaError::MalformedPortrait("orbifold weights failed to stabilise".into()));
        }
    }

    let weights: Vec<Nu> = (0..n).map(|i| if infinite[i] { Nu::Infinite } else { Nu::Finite(nu[i]) }).collect();
    let defect = weights.iter().fold(BigRational::zero(), |acc, w| acc + w.defect());
    let euler = BigRational::from_integer(BigInt::from(2)) - defect;
    Ok(OrbifoldSignature { points: p.points.clone(), nu: weights, euler })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LATTES_LIKE: &str = r#"
        degree = 2
        points = ["0", "1", "2", "inf"]
        map = { "0" = "inf", "1" = "1", "2" = "0", "inf" = "1" }
        local_degree = { "0" = 2, "2" = 2 }
    "#;

    const RABBIT_LIKE: &str = r#"
        degree = 2
        points = ["i", "i-1", "-i", "inf"]
        map = { "i" = "i-1", "i-1" = "-i", "-i" = "i-1", "inf" = "inf" }
        local_degree = { "inf" = 2 }
        extra_critical = { "i" = [2] }
    "#;

    #[test]
    fn euclidean_244() {
        let sig = orbifold_signature(&Portrait::from_toml(LATTES_LIKE).unwrap()).unwrap();
        assert_eq!(sig.signature_type(), vec![Nu::Finite(2), Nu::Finite(4), Nu::Finite(4)]);
        assert!(sig.euler.is_zero());
        assert!(!sig.is_hyperbolic());
    }

    #[test]
    fn z_squared_plus_i_is_hyperbolic() {
        let sig = orbifold_signature(&Portrait::from_toml(RABBIT_LIKE).unwrap()).unwrap();
        assert_eq!(sig.nu_of("inf"), Some(Nu::Infinite));
        assert_eq!(sig.nu_of("i"), Some(Nu::Finite(2)));
        assert_eq!(sig.nu_of("-i"), Some(Nu::Finite(2)));
        assert_eq!(sig.euler, BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn unramified_is_sphere() {
        let p = Portrait::from_toml(
            r#"points = ["a", "b"]
            map = { a = "b", b = "a" }"#,
        )
        .unwrap();
        let sig = orbifold_signature(&p).unwrap();
        assert_eq!(sig.nu, vec![Nu::Finite(1); 2]);
        assert_eq!(sig.euler, BigRational::from_integer(2.into()));
    }

    #[test]
    fn rejects_overfull_fiber() {
        let p = r#"degree = 2
            points = ["a"]
            map = { a = "a" }
            local_degree = { a = 2 }
            extra_critical = { a = [2] }"#;
        assert!(matches!(Portrait::from_toml(p), Err(LambdaError::MalformedPortrait(_))));
    }
}
