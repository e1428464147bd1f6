use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::endo::VirtualEndo;
use super::{SlopeError, SlopeMap};
use crate::correspondence::ends::{EndReport, EndSummary, EndVerdict};
use crate::correspondence::End;
use crate::curve::{matrix_of_word, slopes_up_to_height, FreeWord, Letter, ParityClass};
use crate::Slope;

/// Orbits may climb to `GROWTH_ALLOWANCE · H` before the search gives up on them; attractor
/// members above `H / GROWTH_ALLOWANCE` count as evidence that the attractor grows with `H`.
pub const GROWTH_ALLOWANCE: i64 = 4;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum AttractorVerdict {
    Finite { attractor: Vec<Slope> },
    Horizon { reason: String, frontier: Vec<Slope> },
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractorReport {
    pub height_bound: i64,
    pub depth_bound: usize,
    /// Distinct slopes whose image was computed.
    pub explored: usize,
    #[serde(serialize_with = "big_str")]
    pub max_height: BigInt,
    pub steps: usize,
    #[serde(flatten)]
    pub verdict: AttractorVerdict,
    /// Every attractor member maps back into the attractor.
    pub closure_certified: bool,
}

fn big_str<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl AttractorReport {
    pub fn is_finite(&self) -> bool {
        matches!(self.verdict, AttractorVerdict::Finite { .. })
    }
}

/// Forward closure of all slopes of height `<= h` under the slope map.
pub fn fga_search(map: &dyn SlopeMap, h: i64, depth: usize) -> Result<AttractorReport, SlopeError> {
    let ceiling = BigInt::from(GROWTH_ALLOWANCE * h);
    let mut image: BTreeMap<Slope, Slope> = BTreeMap::new();
    let mut frontier: BTreeSet<Slope> = slopes_up_to_height(h).iter().map(|s| s.convert()).collect();
    let mut escaped: BTreeSet<Slope> = BTreeSet::new();
    let mut steps = 0;
    while !frontier.is_empty() && steps < depth {
        steps += 1;
        let batch: Vec<Slope> = frontier.iter().cloned().collect();
        let images: Vec<Slope> =
            batch.par_iter().map(|s| map.pullback(s).map(|r| r.image)).collect::<Result<_, _>>()?;
        let mut next = BTreeSet::new();
        for (s, t) in batch.into_iter().zip(images) {
            if !t.is_trivial() && !image.contains_key(&t) && !frontier.contains(&t) {
                if t.height() > ceiling {
                    escaped.insert(t.clone());
                } else {
                    next.insert(t.clone());
                }
            }
            image.insert(s, t);
        }
        next.retain(|s| !image.contains_key(s));
        frontier = next;
    }
    let max_height = image.keys().map(|s| s.height()).max().unwrap_or_default();
    let mut report = AttractorReport {
        height_bound: h,
        depth_bound: depth,
        explored: image.len(),
        max_height,
        steps,
        verdict: AttractorVerdict::Finite { attractor: Vec::new() },
        closure_certified: false,
    };
    if !escaped.is_empty() {
        report.verdict = AttractorVerdict::Horizon {
            reason: format!("orbits leave height {ceiling}"),
            frontier: escaped.into_iter().collect(),
        };
        return Ok(report);
    }
    if !frontier.is_empty() {
        report.verdict = AttractorVerdict::Horizon {
            reason: format!("orbits not closed after {depth} steps"),
            frontier: frontier.into_iter().collect(),
        };
        return Ok(report);
    }
    let attractor = recurrent(&image);
    let big: Vec<Slope> =
        attractor.iter().filter(|s| s.height() * BigInt::from(GROWTH_ALLOWANCE) > BigInt::from(h)).cloned().collect();
    if !big.is_empty() {
        report.verdict =
            AttractorVerdict::Horizon { reason: "periodic slopes grow with the height bound".into(), frontier: big };
        return Ok(report);
    }
    let set: BTreeSet<&Slope> = attractor.iter().collect();
    report.closure_certified = attractor
        .iter()
        .filter(|s| !s.is_trivial())
        .map(|s| map.pullback(s).map(|r| set.contains(&r.image)))
        .collect::<Result<Vec<bool>, _>>()?
        .into_iter()
        .all(|b| b);
    report.verdict = AttractorVerdict::Finite { attractor };
    Ok(report)
}

/// Slopes on cycles of a closed functional graph; the trivial class is a fixed point.
fn recurrent(image: &BTreeMap<Slope, Slope>) -> Vec<Slope> {
    let mut out: BTreeSet<Slope> = BTreeSet::new();
    let mut done: BTreeSet<Slope> = BTreeSet::new();
    for start in image.keys() {
        let mut path: Vec<Slope> = Vec::new();
        let mut cur = start.clone();
        loop {
            if cur.is_trivial() {
                out.insert(Slope::Trivial);
                break;
            }
            if done.contains(&cur) {
                break;
            }
            if let Some(i) = path.iter().position(|s| *s == cur) {
                out.extend(path[i..].iter().cloned());
                break;
            }
            path.push(cur.clone());
            cur = image[&cur].clone();
        }
        done.extend(path);
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistWitness {
    pub source: Slope,
    pub image: Slope,
    #[serde(serialize_with = "ratio_str")]
    pub multiplier: BigRational,
    pub parity: ParityClass,
}

fn ratio_str<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionReport {
    pub height_bound: i64,
    /// Multiplier exactly 1, image in the same parity class.
    pub witnesses: Vec<TwistWitness>,
    /// Multiplier above 1, same parity; reported, not interpreted.
    pub super_obstructions: Vec<TwistWitness>,
    /// End analysis summary it was compared against, if any.
    pub end_summary: Option<EndSummary>,
    pub consistent: Option<bool>,
}

pub fn obstructed_twist_search(map: &dyn SlopeMap, h: i64) -> Result<ObstructionReport, SlopeError> {
    let slopes: Vec<Slope> = slopes_up_to_height(h).iter().map(|s| s.convert()).collect();
    let results = slopes.par_iter().map(|s| map.pullback(s)).collect::<Result<Vec<_>, _>>()?;
    let one = BigRational::one();
    let mut witnesses = Vec::new();
    let mut super_obstructions = Vec::new();
    for r in results {
        if r.image.is_trivial() || r.source.parity()? != r.image.parity()? {
            continue;
        }
        let w = TwistWitness { parity: r.source.parity()?, source: r.source, image: r.image, multiplier: r.multiplier };
        if w.multiplier == one {
            witnesses.push(w);
        } else if w.multiplier > one {
            super_obstructions.push(w);
        }
    }
    Ok(ObstructionReport { height_bound: h, witnesses, super_obstructions, end_summary: None, consistent: None })
}

/// End whose peripheral twist has the given parity class (`x, y, z` twist about `1/0, 0/1, 1/1`).
pub fn parity_end(generator_ends: &[End; 3], p: ParityClass) -> End {
    match p {
        ParityClass::E0 => generator_ends[0],
        ParityClass::E1 => generator_ends[1],
        ParityClass::EInf => generator_ends[2],
    }
}

impl ObstructionReport {
    /// Witnesses exist iff the end analysis finds an obstructed twist family, at an end of matching parity.
    pub fn cross_validate(&mut self, ends: &EndReport, generator_ends: &[End; 3]) {
        let family: Vec<End> = ends
            .entries
            .iter()
            .filter(|e| e.fixed && e.verdict == EndVerdict::ObstructedTwistFamily)
            .map(|e| e.end)
            .collect();
        let ok = if self.witnesses.is_empty() {
            family.is_empty()
        } else {
            !family.is_empty()
                && family.iter().all(|e| self.witnesses.iter().any(|w| parity_end(generator_ends, w.parity) == *e))
        };
        self.end_summary = Some(ends.summary);
        self.consistent = Some(ok);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelWitness {
    pub word: FreeWord,
    #[serde(serialize_with = "big_str")]
    pub trace: BigInt,
    /// `"parabolic"` or `"pseudo-Anosov"`.
    pub class: &'static str,
}

/// Nonempty reduced words of length `<= bound` in the domain with trivial image.
pub const KERNEL_BOUND_MAX: usize = 16;

pub fn kernel_search(ve: &VirtualEndo, bound: usize) -> Vec<KernelWitness> {
    let bound = bound.min(KERNEL_BOUND_MAX);
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(bound);
    dfs(ve, bound, ve.basepoint_sheet(), &FreeWord::identity(), &mut word, &mut out);
    out
}

fn dfs(
    ve: &VirtualEndo,
    bound: usize,
    sheet: usize,
    acc: &FreeWord,
    word: &mut Vec<Letter>,
    out: &mut Vec<KernelWitness>,
) {
    if !word.is_empty() && sheet == ve.basepoint_sheet() && acc.is_empty() {
        let w = FreeWord::from_letters(word.iter().copied());
        let trace = matrix_of_word::<BigInt>(&w).trace();
        let class = if trace.abs().to_i64() == Some(2) { "parabolic" } else { "pseudo-Anosov" };
        out.push(KernelWitness { word: w, trace, class });
    }
    if word.len() == bound {
        return;
    }
    for l in Letter::ALL {
        if word.last() == Some(&l.inverse()) {
            continue;
        }
        let (next, r) = ve.step(l, sheet);
        let acc2 = acc.mul(r);
        word.push(l);
        dfs(ve, bound, next, &acc2, word, out);
        word.pop();
    }
}
