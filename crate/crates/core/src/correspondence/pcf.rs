use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::CorrError;
use crate::lambda::{orbifold_signature, OrbifoldSignature, Portrait};
use crate::numeric::{point_label, RationalMap, SPoint};

/// Default number of forward iterates tried per critical point.
pub const DEFAULT_PCF_BOUND: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum PcfStatus {
    Pcf,
    NotPcfWithin { bound: usize },
}

/// Certificate for a nonempty compact invariant set of the correspondence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InvariantSetVerdict {
    /// Hyperbolic and postcritically finite: the Julia set works.
    JuliaSetIsCompactInvariant,
    /// Not certified; this is not a proof that no such set exists.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcfReport {
    pub status: PcfStatus,
    pub hyperbolic: bool,
    pub verdict: InvariantSetVerdict,
    /// Critical points and their forward orbits (empty unless PCF).
    #[serde(skip)]
    pub points: Vec<SPoint<f64>>,
    #[serde(skip)]
    pub image: Vec<usize>,
    pub portrait: Option<Portrait>,
}

/// Iterate every critical point up to `bound` times, identifying points closer than `tol_sep`.
pub fn pcf_hyperbolic_check(g: &RationalMap<f64>, bound: usize, tol_sep: f64) -> Result<PcfReport, CorrError> {
    let crit = g.critical_points(tol_sep)?;
    let mut points: Vec<SPoint<f64>> = Vec::new();
    let mut image: Vec<Option<usize>> = Vec::new();
    let find = |pts: &[SPoint<f64>], p: &SPoint<f64>| pts.iter().position(|q| q.chordal(p) <= tol_sep);

    let not_pcf = PcfReport {
        status: PcfStatus::NotPcfWithin { bound },
        hyperbolic: false,
        verdict: InvariantSetVerdict::Unknown,
        points: vec![],
        image: vec![],
        portrait: None,
    };
    for (c, _) in &crit {
        let mut cur = match find(&points, c) {
            Some(i) => i,
            None => {
                points.push(*c);
                image.push(None);
                points.len() - 1
            }
        };
        let mut closed = false;
        for _ in 0..bound {
            if image[cur].is_some() {
                closed = true;
                break;
            }
            let next = g.eval(&points[cur]);
            let j = match find(&points, &next) {
                Some(j) => j,
                None => {
                    points.push(next);
                    image.push(None);
                    points.len() - 1
                }
            };
            image[cur] = Some(j);
            cur = j;
        }
        if !closed && image[cur].is_none() {
            return Ok(not_pcf);
        }
    }
    let image: Vec<usize> = image.into_iter().map(|i| i.expect("orbit closed")).collect();
    let degree_of = |p: &SPoint<f64>| crit.iter().find(|(c, _)| c.chordal(p) <= tol_sep).map_or(1, |(_, k)| *k);

    // Every periodic cycle in the portrait must contain a critical point.
    let n = points.len();
    let mut hyperbolic = true;
    for start in 0..n {
        let mut x = image[start];
        let mut steps = 0;
        while x != start && steps < n {
            x = image[x];
            steps += 1;
        }
        if x == start {
            let mut has_crit = degree_of(&points[start]) > 1;
            let mut y = image[start];
            while y != start {
                has_crit |= degree_of(&points[y]) > 1;
                y = image[y];
            }
            hyperbolic &= has_crit;
        }
    }

    let labels: Vec<String> = points.iter().map(point_label).collect();
    let portrait = Portrait {
        degree: Some(g.degree() as u32),
        points: labels.clone(),
        map: (0..n).map(|i| (labels[i].clone(), labels[image[i]].clone())).collect(),
        local_degree: (0..n)
            .filter(|&i| degree_of(&points[i]) > 1)
            .map(|i| (labels[i].clone(), degree_of(&points[i]) as u32))
            .collect(),
        extra_critical: BTreeMap::new(),
    };
    let verdict =
        if hyperbolic { InvariantSetVerdict::JuliaSetIsCompactInvariant } else { InvariantSetVerdict::Unknown };
    Ok(PcfReport { status: PcfStatus::Pcf, hyperbolic, verdict, points, image, portrait: Some(portrait) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionCertificate {
    /// Uniform expansion factor of the flat orbifold metric.
    pub factor: f64,
    pub signature: OrbifoldSignature,
}

/// A postcritically finite map with Euclidean orbifold expands the flat metric by `sqrt(deg)`.
pub fn euclidean_expansion_certificate(g: &RationalMap<f64>, tol_sep: f64) -> Result<ExpansionCertificate, CorrError> {
    let report = pcf_hyperbolic_check(g, DEFAULT_PCF_BOUND, tol_sep)?;
    let portrait =
        report.portrait.ok_or_else(|| CorrError::NotEuclidean("undefined (not postcritically finite)".into()))?;
    let signature = orbifold_signature(&portrait)?;
    if !signature.euler.is_zero() {
        return Err(CorrError::NotEuclidean(signature.euler_string()));
    }
    Ok(ExpansionCertificate { factor: (g.degree() as f64).sqrt(), signature })
}
