//! Paths in the disc obtained by cutting the sphere along a star, drawn parallel to its boundary.
//!
//! The boundary of the cut disc is walked once, starting and ending at the arc to `∞`, and every
//! position gets a monotone key. A chord between two keys drawn at depth `k` follows the boundary
//! at distance `k · unit`; chords whose key intervals are nested or disjoint never meet when the
//! outer ones are drawn deeper.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use super::star::CutStar;
use super::MonodromyError;

type C64 = Complex64;

const TIP_SAMPLES: usize = 24;
const CORNER_SAMPLES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Part {
    Side {
        arc: usize,
        left: bool,
    },
    Tip {
        arc: usize,
    },
    /// Counterclockwise sector from `from` to `to` at the center.
    Corner {
        from: usize,
        to: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Walk<'a> {
    star: &'a CutStar,
    parts: Vec<(Part, f64, f64)>,
    /// Length of the `∞` sides that is walked.
    pub s_far: f64,
    /// Offset per unit of depth.
    pub unit: f64,
    /// Longest finite arc.
    pub l_ref: f64,
}

impl<'a> Walk<'a> {
    /// Layout for chords up to depth `max_depth`; the star must contain an arc to `∞`.
    pub fn new(star: &'a CutStar, max_depth: usize) -> Result<Walk<'a>, MonodromyError> {
        let n = star.arcs.len();
        let inf = star
            .arcs
            .iter()
            .position(|a| a.is_ray())
            .ok_or_else(|| MonodromyError::Star("offset walk needs an arc to ∞".into()))?;
        let l_ref =
            star.arcs.iter().filter(|a| !a.is_ray()).map(|a| a.length()).fold(0.0, f64::max).max(star.clearance);
        let s_far = 4.0 * l_ref;
        let mut parts = Vec::new();
        let mut key = 0.0;
        let mut add = |p: Part, w: f64, parts: &mut Vec<(Part, f64, f64)>| {
            parts.push((p, key, w));
            key += w;
        };
        add(Part::Side { arc: inf, left: true }, s_far, &mut parts);
        let mut prev = inf;
        for j in 1..n {
            let k = (inf + j) % n;
            let len = star.arcs[k].length();
            add(Part::Corner { from: prev, to: k }, 1.0, &mut parts);
            add(Part::Side { arc: k, left: false }, len, &mut parts);
            add(Part::Tip { arc: k }, 1.0, &mut parts);
            add(Part::Side { arc: k, left: true }, len, &mut parts);
            prev = k;
        }
        add(Part::Corner { from: prev, to: inf }, 1.0, &mut parts);
        add(Part::Side { arc: inf, left: false }, s_far, &mut parts);

        let mut walk = Walk { star, parts, s_far, unit: 0.0, l_ref };
        let first = star.arcs.iter().map(|a| a.pieces()[0].len.min(l_ref)).fold(f64::INFINITY, f64::min);
        let c_max = (0..n).map(|k| walk.corner_factor(k)).fold(0.0, f64::max);
        walk.unit = (0.25 * star.clearance).min(0.2 * first / c_max) / (max_depth as f64 + 1.0);
        Ok(walk)
    }

    fn sector(&self, from: usize) -> f64 {
        let n = self.star.arcs.len();
        let a = self.star.arcs[from].angle;
        let b = self.star.arcs[(from + 1) % n].angle;
        let s = (b - a).rem_euclid(TAU);
        if n == 1 || s == 0.0 {
            TAU
        } else {
            s
        }
    }

    /// Corner radius per unit offset, for the sector following arc `from`.
    fn corner_factor(&self, from: usize) -> f64 {
        4.0 / self.sector(from).min(FRAC_PI_2).sin()
    }

    /// Angular extent `(start, end)` of the corner arc, independent of depth.
    fn corner_angles(&self, from: usize) -> (f64, f64) {
        let margin = (1.0 / self.corner_factor(from)).asin();
        let a = self.star.arcs[from].angle;
        (a + margin, a + self.sector(from) - margin)
    }

    /// Key of a point at arclength `s` on one side of an arc.
    pub fn side_key(&self, arc: usize, left: bool, s: f64) -> f64 {
        let (_, start, w) = self.parts.iter().find(|(p, _, _)| *p == Part::Side { arc, left }).expect("side exists");
        let right_outward = !left;
        let is_inf_left = self.star.arcs[arc].is_ray() && left;
        if right_outward && !is_inf_left {
            start + s
        } else {
            start + w - s
        }
    }

    /// Key on the corner arc at angle `theta`, if it lies well inside that corner's extent.
    pub fn corner_key(&self, theta: f64) -> Option<f64> {
        for (p, start, _) in &self.parts {
            if let Part::Corner { from, .. } = *p {
                let (a0, a1) = self.corner_angles(from);
                let a = self.star.arcs[from].angle;
                let rel = (theta - a).rem_euclid(TAU);
                if rel <= self.sector(from) {
                    let f = (a + rel - a0) / (a1 - a0);
                    return (0.05..=0.95).contains(&f).then_some(start + f);
                }
            }
        }
        unreachable!("every angle lies in some sector")
    }

    fn locate(&self, key: f64) -> (usize, f64) {
        let i = self.parts.iter().rposition(|(_, s, _)| *s <= key).unwrap_or(0);
        (i, key - self.parts[i].1)
    }

    /// Point at `key`, offset by depth `d` (in units).
    pub fn point(&self, key: f64, depth: f64) -> C64 {
        let (i, local) = self.locate(key);
        self.part_point(i, local.clamp(0.0, self.parts[i].2), depth * self.unit)
    }

    fn side_s(&self, arc: usize, left: bool, local: f64, w: f64) -> f64 {
        let is_inf_left = self.star.arcs[arc].is_ray() && left;
        if !left && !is_inf_left {
            local
        } else {
            w - local
        }
    }

    fn part_point(&self, i: usize, local: f64, d: f64) -> C64 {
        let star = self.star;
        match self.parts[i].0 {
            Part::Side { arc, left } => {
                let s = self.side_s(arc, left, local, self.parts[i].2);
                self.side_point(arc, left, s, d)
            }
            Part::Tip { arc } => {
                let a = &star.arcs[arc];
                let e = a.puncture.point.to_c64().expect("finite tip");
                let th = a.last_dir().arg() - FRAC_PI_2 + PI * local;
                e + C64::from_polar(d, th)
            }
            Part::Corner { from, .. } => {
                let (a0, a1) = self.corner_angles(from);
                star.center + C64::from_polar(self.corner_factor(from) * d, a0 + (a1 - a0) * local)
            }
        }
    }

    fn side_point(&self, arc: usize, left: bool, s: f64, d: f64) -> C64 {
        let a = &self.star.arcs[arc];
        let from = if left { arc } else { (arc + self.star.arcs.len() - 1) % self.star.arcs.len() };
        let r = self.corner_factor(from) * d;
        let s_min = (r * r - d * d).sqrt();
        let (p, tau) = a.at(s.max(s_min));
        let n = if left { C64::i() * tau } else { -C64::i() * tau };
        p + n * d
    }

    /// Polyline between two keys at the given depth.
    pub fn path(&self, k1: f64, k2: f64, depth: f64) -> Vec<C64> {
        if k1 > k2 {
            let mut v = self.path(k2, k1, depth);
            v.reverse();
            return v;
        }
        let d = depth * self.unit;
        let mut out: Vec<C64> = Vec::new();
        for (i, (part, start, w)) in self.parts.iter().enumerate() {
            let lo = k1.max(*start);
            let hi = k2.min(start + w);
            if lo > hi || (lo == hi && out.last().is_some()) {
                continue;
            }
            let (la, lb) = (lo - start, hi - start);
            match *part {
                Part::Side { arc, left } => {
                    out.push(self.part_point(i, la, d));
                    // Pieces joints strictly inside, one point per adjacent piece.
                    let a = &self.star.arcs[arc];
                    let (sa, sb) = (self.side_s(arc, left, la, *w), self.side_s(arc, left, lb, *w));
                    let (smin, smax) = (sa.min(sb), sa.max(sb));
                    let mut joints = Vec::new();
                    let mut acc = 0.0;
                    for p in a.pieces().iter().take(a.pieces().len() - 1) {
                        acc += p.len;
                        if acc > smin && acc < smax {
                            joints.push(acc);
                        }
                    }
                    if sa > sb {
                        joints.reverse();
                    }
                    for s in joints {
                        let eps = 1e-9 * (1.0 + s);
                        let (first, second) = if sa < sb { (s - eps, s + eps) } else { (s + eps, s - eps) };
                        out.push(self.side_point(arc, left, first, d));
                        out.push(self.side_point(arc, left, second, d));
                    }
                    out.push(self.part_point(i, lb, d));
                }
                Part::Tip { .. } | Part::Corner { .. } => {
                    let m = if matches!(part, Part::Tip { .. }) { TIP_SAMPLES } else { CORNER_SAMPLES };
                    for j in 0..=m {
                        out.push(self.part_point(i, la + (lb - la) * j as f64 / m as f64, d));
                    }
                }
            }
        }
        out.dedup_by(|a, b| (*a - *b).norm() <= 1e-15 * (1.0 + a.norm()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::star::Puncture;
    use super::*;
    use crate::correspondence::End;

    #[test]
    fn chords_stay_off_the_star() {
        let ends: Vec<Puncture> = End::ALL.iter().map(|e| Puncture::end(*e)).collect();
        let star = CutStar::build(C64::new(0.0, 2.0), &ends, 0).unwrap();
        let walk = Walk::new(&star, 4).unwrap();
        let total = walk.parts.last().map(|(_, s, w)| s + w).unwrap();
        for depth in [1.0, 2.0, 4.0] {
            let path = walk.path(1.0, total - 1.0, depth);
            assert!(star.crossings(&path).unwrap().is_empty());
        }
    }
}
