use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::MonodromyError;
use crate::correspondence::End;
use crate::numeric::{point_label, SPoint};

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PunctureKind {
    End(End),
    /// Index into the model's extra punctures.
    Extra(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Puncture {
    pub kind: PunctureKind,
    pub point: SPoint<f64>,
}

impl Puncture {
    pub fn end(e: End) -> Self {
        Puncture { kind: PunctureKind::End(e), point: e.point() }
    }

    pub fn label(&self) -> String {
        match self.kind {
            PunctureKind::End(e) => e.label().to_string(),
            PunctureKind::Extra(_) => point_label(&self.point),
        }
    }
}

/// Piecewise-linear arc from the star's center to one puncture.
#[derive(Clone, Debug)]
pub struct StarArc {
    pub puncture: Puncture,
    /// Vertices starting at the center; for `∞` the last one is the origin of `ray`.
    pub vertices: Vec<C64>,
    pub ray: Option<C64>,
    /// Direction at the center, in `[0, 2π)`.
    pub angle: f64,
}

/// One straight piece: start, direction (unit), length (`∞` for a ray).
#[derive(Clone, Copy, Debug)]
pub struct Piece {
    pub start: C64,
    pub dir: C64,
    pub len: f64,
}

impl StarArc {
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out: Vec<Piece> = self
            .vertices
            .windows(2)
            .map(|w| {
                let v = w[1] - w[0];
                Piece { start: w[0], dir: v / v.norm(), len: v.norm() }
            })
            .collect();
        if let Some(d) = self.ray {
            out.push(Piece { start: *self.vertices.last().expect("nonempty"), dir: d, len: f64::INFINITY });
        }
        out
    }

    pub fn length(&self) -> f64 {
        self.pieces().iter().map(|p| p.len).sum()
    }

    pub fn is_ray(&self) -> bool {
        self.ray.is_some()
    }

    /// Point and unit tangent at arclength `s` from the center.
    pub fn at(&self, s: f64) -> (C64, C64) {
        let pieces = self.pieces();
        let mut rest = s;
        for (k, p) in pieces.iter().enumerate() {
            if rest <= p.len || k + 1 == pieces.len() {
                return (p.start + p.dir * rest.min(p.len), p.dir);
            }
            rest -= p.len;
        }
        unreachable!("arc has at least one piece")
    }

    pub fn first_dir(&self) -> C64 {
        self.pieces()[0].dir
    }

    pub fn last_dir(&self) -> C64 {
        self.pieces().last().expect("nonempty").dir
    }
}

/// Arcs from a basepoint to every puncture, pairwise disjoint away from the center.
#[derive(Clone, Debug)]
pub struct CutStar {
    pub center: C64,
    /// Sorted by strictly increasing angle at the center.
    pub arcs: Vec<StarArc>,
    /// Minimum distance kept between an arc and the punctures it does not end at.
    pub clearance: f64,
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Intersection parameters `(t, u)` of `a + t·(b - a)` with a piece, if any.
fn intersect(a: C64, b: C64, p: &Piece) -> Option<(f64, f64)> {
    let v = b - a;
    let denom = cross(v, p.dir);
    if denom.abs() <= 1e-300 {
        return None;
    }
    let w = p.start - a;
    let t = cross(w, p.dir) / denom;
    let u = cross(w, v) / denom;
    Some((t, u))
}

fn dist_to_piece(z: C64, p: &Piece) -> f64 {
    let u = ((z - p.start) * p.dir.conj()).re.clamp(0.0, p.len);
    (p.start + p.dir * u - z).norm()
}

fn angle_of(d: C64) -> f64 {
    d.arg().rem_euclid(TAU)
}

impl CutStar {
    /// Straight arcs where possible; otherwise one-bend detours on a deterministic schedule.
    pub fn build(center: C64, punctures: &[Puncture], seed: u64) -> Result<CutStar, MonodromyError> {
        let finite: Vec<C64> = punctures.iter().filter_map(|p| p.point.to_c64()).collect();
        let mut all = finite.clone();
        all.push(center);
        let mut mind = f64::INFINITY;
        for i in 0..all.len() {
            for j in 0..i {
                mind = mind.min((all[i] - all[j]).norm());
            }
        }
        if !(mind > 0.0) {
            return Err(MonodromyError::Star("coincident punctures".into()));
        }
        let mind = if mind.is_finite() { mind } else { 1.0 };
        let clearance = 0.2 * mind;
        let jitter = (seed % 11) as f64 * 0.013;
        let mut star = CutStar { center, arcs: Vec::new(), clearance };

        let mut order: Vec<usize> = (0..punctures.len()).filter(|&i| !punctures[i].point.is_inf()).collect();
        order.sort_by(|&a, &b| {
            let da = (finite_point(&punctures[a]) - center).norm();
            let db = (finite_point(&punctures[b]) - center).norm();
            da.total_cmp(&db)
        });
        for i in order {
            let p = finite_point(&punctures[i]);
            let mut placed = false;
            for h in [0.0, 0.2, -0.2, 0.4, -0.4, 0.6, -0.6, 0.9, -0.9, 1.3, -1.3] {
                let h = if h == 0.0 { 0.0 } else { h + jitter.copysign(h) };
                let mut vertices = vec![center];
                if h != 0.0 {
                    vertices.push((center + p) * 0.5 + C64::i() * (p - center) * h);
                }
                vertices.push(p);
                let arc = StarArc { puncture: punctures[i].clone(), vertices, ray: None, angle: 0.0 };
                if star.admissible(&arc, &finite) {
                    star.push(arc);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(MonodromyError::Star(format!("no clear arc to {}", punctures[i].label())));
            }
        }
        if let Some(inf) = punctures.iter().find(|p| p.point.is_inf()) {
            let mean = finite.iter().sum::<C64>() / (finite.len().max(1) as f64);
            let base = if (center - mean).norm() > 1e-9 { (center - mean) / (center - mean).norm() } else { C64::i() };
            let mut placed = false;
            for k in 0..25 {
                let theta = ((k + 1) / 2) as f64 * 0.25 * if k % 2 == 1 { 1.0 } else { -1.0 } + jitter;
                let arc = StarArc {
                    puncture: inf.clone(),
                    vertices: vec![center],
                    ray: Some(base * C64::from_polar(1.0, theta)),
                    angle: 0.0,
                };
                if star.admissible(&arc, &finite) {
                    star.push(arc);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(MonodromyError::Star("no clear ray to ∞".into()));
            }
        }
        star.arcs.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        Ok(star)
    }

    fn push(&mut self, mut arc: StarArc) {
        arc.angle = angle_of(arc.first_dir());
        self.arcs.push(arc);
    }

    fn admissible(&self, arc: &StarArc, finite: &[C64]) -> bool {
        let pieces = arc.pieces();
        let own = arc.puncture.point.to_c64();
        for z in finite {
            if Some(*z) == own {
                continue;
            }
            if pieces.iter().any(|p| dist_to_piece(*z, p) < self.clearance) {
                return false;
            }
        }
        // Later pieces must stay clear of the center too.
        if pieces.iter().skip(1).any(|p| dist_to_piece(self.center, p) < self.clearance) {
            return false;
        }
        let a0 = angle_of(arc.first_dir());
        for other in &self.arcs {
            let gap = (a0 - other.angle).rem_euclid(TAU);
            if gap.min(TAU - gap) < 0.05 {
                return false;
            }
            for p in &pieces {
                for q in other.pieces() {
                    let (a, b) = (p.start, p.start + p.dir * p.len.min(1e12));
                    if let Some((t, u)) = intersect(a, b, &q) {
                        let shared_center = t.abs() < 1e-9 && u.abs() < 1e-9 * q.len.min(1.0).max(1e-9);
                        if (0.0..=1.0).contains(&t) && u >= 0.0 && u <= q.len && !shared_center {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Keep only the arcs whose puncture satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(&Puncture) -> bool) -> CutStar {
        CutStar {
            center: self.center,
            arcs: self.arcs.iter().filter(|a| keep(&a.puncture)).cloned().collect(),
            clearance: self.clearance,
        }
    }

    /// Euclidean distance from `z` to the union of the arcs.
    pub fn distance(&self, z: C64) -> f64 {
        self.arcs.iter().flat_map(|a| a.pieces()).map(|p| dist_to_piece(z, &p)).fold(f64::INFINITY, f64::min)
    }

    pub fn arc_index(&self, kind: PunctureKind) -> Option<usize> {
        self.arcs.iter().position(|a| a.puncture.kind == kind)
    }

    /// Signed crossings `(arc, ±1)` of a polyline, in order along it.
    ///
    /// `+1` means crossing from the left of the arc to its right, i.e. positively around its puncture.
    pub fn crossings(&self, path: &[C64]) -> Result<Vec<(usize, i8)>, MonodromyError> {
        let tol = 1e-10 * (1.0 + self.center.norm()).max(self.clearance);
        let mut out = Vec::new();
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == b {
                continue;
            }
            let mut hits: Vec<(f64, usize, i8)> = Vec::new();
            for (k, arc) in self.arcs.iter().enumerate() {
                let pieces = arc.pieces();
                let last = pieces.len() - 1;
                for (j, p) in pieces.iter().enumerate() {
                    let Some((t, u)) = intersect(a, b, p) else { continue };
                    let u_hi_ok = if j == last { u <= p.len } else { u < p.len };
                    if !(0.0..1.0).contains(&t) || u < 0.0 || !u_hi_ok {
                        continue;
                    }
                    let at = a + (b - a) * t;
                    if (at - self.center).norm() < tol {
                        return Err(MonodromyError::CrossingAmbiguous("at the star center".into()));
                    }
                    if let Some(e) = arc.puncture.point.to_c64() {
                        if (at - e).norm() < tol {
                            return Err(MonodromyError::CrossingAmbiguous(arc.puncture.label()));
                        }
                    }
                    let sign = if (p.dir.conj() * (b - a)).im < 0.0 { 1 } else { -1 };
                    hits.push((t, k, sign));
                }
            }
            hits.sort_by(|x, y| x.0.total_cmp(&y.0));
            out.extend(hits.into_iter().map(|(_, k, s)| (k, s)));
        }
        Ok(out)
    }

    /// Crossings of a small positive circle around the center: the defining relator.
    pub fn relator(&self) -> Vec<(usize, i8)> {
        // Arcs in increasing angle, each crossed right-to-left by a counterclockwise circle.
        (0..self.arcs.len()).map(|k| (k, -1)).collect()
    }

    /// Middle angle of the widest gap between consecutive arcs, and the arc preceding it.
    pub fn widest_gap(&self) -> (f64, usize) {
        let n = self.arcs.len();
        let mut best = (0.0, 0.0, 0);
        for k in 0..n {
            let a = self.arcs[k].angle;
            let b = if k + 1 < n { self.arcs[k + 1].angle } else { self.arcs[0].angle + TAU };
            let gap = if n == 1 { TAU } else { b - a };
            if gap > best.0 {
                best = (gap, a + gap / 2.0, k);
            }
        }
        (best.1.rem_euclid(TAU), best.2)
    }

    /// Smallest angle between consecutive arcs at the center.
    pub fn min_sector(&self) -> f64 {
        let n = self.arcs.len();
        if n < 2 {
            return PI;
        }
        (0..n)
            .map(|k| {
                let b = if k + 1 < n { self.arcs[k + 1].angle } else { self.arcs[0].angle + TAU };
                b - self.arcs[k].angle
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn finite_point(p: &Puncture) -> C64 {
    p.point.to_c64().expect("finite puncture")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ends() -> Vec<Puncture> {
        End::ALL.iter().map(|e| Puncture::end(*e)).collect()
    }

    #[test]
    fn collinear_puncture_forces_a_bend() {
        let star = CutStar::build(C64::new(-0.75, 0.0), &ends(), 0).unwrap();
        assert_eq!(star.arcs.len(), 3);
        let one = star.arcs.iter().find(|a| a.puncture.kind == PunctureKind::End(End::One)).unwrap();
        assert_eq!(one.vertices.len(), 3);
        for w in star.arcs.windows(2) {
            assert!(w[0].angle < w[1].angle);
        }
    }

    #[test]
    fn small_circle_reads_the_relator() {
        let star = CutStar::build(C64::new(0.0, 2.0), &ends(), 0).unwrap();
        let circle: Vec<C64> =
            (0..=64).map(|k| C64::new(0.0, 2.0) + C64::from_polar(0.05, 0.01 + k as f64 * TAU / 64.0)).collect();
        let mut cr = star.crossings(&circle).unwrap();
        cr.sort();
        assert_eq!(cr, star.relator());
    }
}
