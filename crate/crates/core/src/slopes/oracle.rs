//! Independent check of the slope map: draw a curve of the given slope in the dynamical plane,
//! pull it back numerically under the polynomial, and read off the components.
//!
//! The plane is normalized so the marked points are `0, 1, ∞, m*`, and the cut star from `m*` to
//! the other three is matched with the pillowcase `R² / ⟨2Z², -1⟩`: the arcs to the `y`, `x` and
//! `z` ends are the legs from `(0, 0)` to `(1, 0)`, `(0, 1)` and `(1, 1)`. A slope `p/q` is the
//! line of direction `(q, p)`; it meets the three legs `|p|`, `|q|` and `|p - q|` times.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use super::{SlopeError, SlopePullbackResult, VirtualEndo};
use crate::correspondence::{End, GMapModel};
use crate::monodromy::{lift_closed, CutStar, MonodromyError, PunctureKind, Walk};
use crate::numeric::rmap::Mobius;
use crate::numeric::{CPoly, GaussRat, RationalMap, SPoint};
use crate::Slope;

type C64 = Complex64;

/// `f(z) = z² + c` with three of its marked points (the fourth is `∞`).
#[derive(Clone, Debug, Deserialize)]
pub struct DynamicsSpec {
    pub c: GaussRat,
    /// Sent to `0`, `1` and `m*` by the normalizing affine map.
    pub p0: GaussRat,
    pub p1: GaussRat,
    pub pmu: GaussRat,
}

#[derive(Deserialize)]
struct Wrapper {
    dynamics: Option<DynamicsSpec>,
}

impl DynamicsSpec {
    /// The `[dynamics]` table of a fixture file, if present.
    pub fn from_fixture(text: &str) -> Result<Option<Self>, SlopeError> {
        let w: Wrapper = toml::from_str(text).map_err(|e| SlopeError::Plugin(e.to_string()))?;
        Ok(w.dynamics)
    }

    /// The polynomial in normalized coordinates.
    pub fn normalized_map(&self, model: &GMapModel) -> Result<RationalMap<f64>, SlopeError> {
        let (c, p0, p1, pmu) = (
            self.c.to_complex::<f64>(),
            self.p0.to_complex::<f64>(),
            self.p1.to_complex::<f64>(),
            self.pmu.to_complex::<f64>(),
        );
        let a = Mobius::new(C64::new(1.0, 0.0), -p0, C64::zero(), p1 - p0);
        let m = a.apply(&SPoint::Fin(pmu)).to_c64().unwrap_or(C64::new(f64::INFINITY, 0.0));
        if (m - model.basepoint).norm() > 1e-9 * (1.0 + m.norm()) {
            return Err(SlopeError::RepresentativeDegenerate(format!("marked point lands at {m}, not at m*")));
        }
        let f = RationalMap::new(
            CPoly::new(vec![c, C64::zero(), C64::new(1.0, 0.0)]),
            CPoly::constant(C64::new(1.0, 0.0)),
        )?
        .with_root_options(*model.g.root_options());
        Ok(f.conjugate(&a)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Leg {
    E,
    N,
    D,
}

/// Crossings of the line `c + t(q, p)`, `t ∈ [0, 2)`, with the legs: `(leg, position in (0, 1), sign)`,
/// sign `+1` for left-to-right with respect to the leg's direction away from `(0, 0)`.
fn model_crossings(p: f64, q: f64) -> Vec<(f64, Leg, f64, i8)> {
    // 1/π and the Euler–Mascheroni constant: an offset no rational line passes through.
    const C: (f64, f64) = (std::f64::consts::FRAC_1_PI, 0.577_215_664_901_532_9);
    let mut out = Vec::new();
    // Each family: offset and rate of the coordinate hitting 2Z, the leg, and the cross product
    // of the leg direction with the velocity.
    let families = [(C.1, p, Leg::E, p), (C.0, q, Leg::N, -q), (C.0 - C.1, q - p, Leg::D, p - q)];
    for (c0, rate, leg, cross) in families {
        if rate == 0.0 {
            continue;
        }
        let (lo, hi) = if rate > 0.0 { (c0, c0 + 2.0 * rate) } else { (c0 + 2.0 * rate, c0) };
        let mut n = (lo / 2.0).ceil() as i64;
        while (2 * n) as f64 <= hi {
            let t = (2.0 * n as f64 - c0) / rate;
            if (0.0..2.0).contains(&t) {
                // Position along the leg from the other coordinate, folded by the negation.
                let other = match leg {
                    Leg::E => C.0 + t * q,
                    Leg::N | Leg::D => C.1 + t * p,
                };
                let u = other.rem_euclid(2.0);
                let (s, flip) = if u <= 1.0 { (u, false) } else { (2.0 - u, true) };
                let mut sign: i8 = if cross < 0.0 { 1 } else { -1 };
                if flip {
                    sign = -sign;
                }
                out.push((t, leg, s, sign));
            }
            n += 1;
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Slope of a closed curve from its reduced crossing counts with the `x`, `y`, `z` arcs.
pub fn slope_from_counts(nx: usize, ny: usize, nz: usize) -> Result<Slope, SlopeError> {
    if nx == 0 && ny == 0 {
        return Ok(Slope::Trivial);
    }
    let (q, p) = (nx as i64, ny as i64);
    let s = if nz as i64 == (p - q).abs() {
        Slope::new(BigInt::from(p), BigInt::from(q))?
    } else if nz as i64 == p + q {
        Slope::new(BigInt::from(-p), BigInt::from(q))?
    } else {
        // Peripheral, e.g. a loop around m* meets every arc once.
        return Ok(Slope::Trivial);
    };
    if p.gcd(&q) != 1 {
        return Err(SlopeError::RepresentativeDegenerate(format!("component meets the arcs ({nx}, {ny}, {nz}) times")));
    }
    Ok(s)
}

/// Cyclically and freely reduced crossing word in the free group on the three arcs.
pub fn reduce_cyclic(word: &[(usize, i8)]) -> Vec<(usize, i8)> {
    let mut v: Vec<(usize, i8)> = Vec::new();
    for &l in word {
        if v.last() == Some(&(l.0, -l.1)) {
            v.pop();
        } else {
            v.push(l);
        }
    }
    let (mut a, mut b) = (0, v.len());
    while b - a > 1 && v[a] == (v[b - 1].0, -v[b - 1].1) {
        a += 1;
        b -= 1;
    }
    v[a..b].to_vec()
}

/// Integer matrix acting on `(p, q)`.
type Mat = [[i64; 2]; 2];

fn pq_i64(s: &Slope) -> Option<(i64, i64)> {
    let (p, q) = s.pq().ok()?;
    Some((i64::try_from(p).ok()?, i64::try_from(q).ok()?))
}

fn act(m: &Mat, s: &Slope) -> Result<Slope, SlopeError> {
    let Some((p, q)) = pq_i64(s) else { return Ok(s.clone()) };
    let (a, b) = (m[0][0] * p + m[0][1] * q, m[1][0] * p + m[1][1] * q);
    Ok(Slope::new(BigInt::from(a), BigInt::from(b))?)
}

/// Crossing-count name of the curve `x`, `y` or `z` pushes `m*` along: the loop at the base,
/// closed by a counterclockwise circle around `m*`.
fn push_curve(star: &CutStar, legs: [usize; 3], lp: &[C64], m: C64, b: C64) -> Result<Slope, SlopeError> {
    let r = b - m;
    let mut path = lp.to_vec();
    path.extend((1..=64).map(|k| m + r * C64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 64.0)));
    let w = reduce_cyclic(&star.crossings(&path)?);
    let count = |a: usize| w.iter().filter(|l| l.0 == a).count();
    slope_from_counts(count(legs[0]), count(legs[1]), count(legs[2]))
}

/// Matrices between crossing-count names and the names in which `x, y, z` are the twists about
/// `1/0, 0/1, 1/1`. The three push curves must form a Farey triangle.
fn frame(ve: &VirtualEndo, star: &CutStar, legs: [usize; 3]) -> Result<(Mat, Mat), SlopeError> {
    let t = &ve.table;
    let names: Vec<(i64, i64)> = t
        .loops
        .iter()
        .map(|lp| {
            let s = push_curve(star, legs, lp, star.center, t.base)?;
            pq_i64(&s).ok_or_else(|| SlopeError::RepresentativeDegenerate(format!("generator pushes along {s}")))
        })
        .collect::<Result<_, _>>()?;
    let (a, b, c) = (names[0], names[1], names[2]);
    for (l, m) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let v = (l * a.0 + m * b.0, l * a.1 + m * b.1);
        if v == c || v == (-c.0, -c.1) {
            let to_leg: Mat = [[l * a.0, m * b.0], [l * a.1, m * b.1]];
            let det = to_leg[0][0] * to_leg[1][1] - to_leg[0][1] * to_leg[1][0];
            if det.abs() == 1 {
                let to_alg: Mat =
                    [[det * to_leg[1][1], -det * to_leg[0][1]], [-det * to_leg[1][0], det * to_leg[0][0]]];
                return Ok((to_leg, to_alg));
            }
        }
    }
    Err(SlopeError::RepresentativeDegenerate(format!("generator curves {names:?} are not a Farey triangle")))
}

/// Pull `s` back by lifting a drawn representative under the polynomial.
pub fn geometric_oracle(
    dyn_spec: &DynamicsSpec,
    model: &GMapModel,
    ve: &VirtualEndo,
    s: &Slope,
) -> Result<SlopePullbackResult, SlopeError> {
    let degenerate = |m: String| SlopeError::RepresentativeDegenerate(m);
    if s.is_trivial() {
        return Err(SlopeError::TrivialSource);
    }
    let f = dyn_spec.normalized_map(model)?;
    let star = ve.table.star.restrict(|p| matches!(p.kind, PunctureKind::End(_)));
    let arc = |e: End| star.arcs.iter().position(|a| a.puncture.kind == PunctureKind::End(e));
    let ends = ve.table.generator_ends;
    let (Some(ax), Some(ay), Some(az)) = (arc(ends[0]), arc(ends[1]), arc(ends[2])) else {
        return Err(degenerate("star misses an end".into()));
    };
    let legs = [ax, ay, az];
    let arc_of = |l: Leg| match l {
        Leg::N => ax,
        Leg::E => ay,
        Leg::D => az,
    };
    // Around (0, 0) the legs run E, D, N counterclockwise; if the arcs run the other way the
    // identification reverses orientation, which swaps the sides of every arc.
    let seq = [arc_of(Leg::E), arc_of(Leg::D), arc_of(Leg::N)];
    let preserving = (0..3).any(|r| (0..3).all(|i| seq[(i + r) % 3] == i));
    let orient: i8 = if preserving { 1 } else { -1 };
    let (to_leg, to_alg) = frame(ve, &star, legs)?;

    let (p, q) = pq_i64(&act(&to_leg, s)?).ok_or_else(|| degenerate(format!("{s} is too tall to draw")))?;
    let crossings = model_crossings(p as f64, q as f64);
    if crossings.len() < 2 {
        return Err(degenerate(format!("{s} meets the star {} times", crossings.len())));
    }
    let keys_walk = Walk::new(&star, 1)?;
    let at = |k: usize, u: f64| {
        let a = &star.arcs[k];
        if a.is_ray() {
            keys_walk.l_ref * (0.5 + u)
        } else {
            a.length() * (0.3 + 0.4 * u)
        }
    };
    let cs: Vec<(usize, f64, i8)> =
        crossings.iter().map(|(_, l, u, sg)| (arc_of(*l), at(arc_of(*l), *u), sg * orient)).collect();
    let n = cs.len();
    // Chord i joins the exit side of crossing i to the entry side of crossing i + 1.
    let chords: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (k1, s1, g1) = cs[i];
            let (k2, s2, g2) = cs[(i + 1) % n];
            (keys_walk.side_key(k1, g1 < 0, s1), keys_walk.side_key(k2, g2 > 0, s2))
        })
        .collect();
    let iv: Vec<(f64, f64)> = chords.iter().map(|(a, b)| (a.min(*b), a.max(*b))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| (iv[i].1 - iv[i].0).total_cmp(&(iv[j].1 - iv[j].0)));
    let mut depth = vec![1usize; n];
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[..a] {
            let inside = iv[j].0 > iv[i].0 && iv[j].1 < iv[i].1;
            let disjoint = iv[j].1 < iv[i].0 || iv[j].0 > iv[i].1;
            if !inside && !disjoint {
                return Err(degenerate(format!("chords of {s} interleave")));
            }
            if inside {
                depth[i] = depth[i].max(depth[j] + 1);
            }
        }
    }
    let walk = Walk::new(&star, depth.iter().copied().max().unwrap_or(1))?;
    let mut poly: Vec<C64> = Vec::new();
    for i in 0..n {
        poly.extend(walk.path(chords[i].0, chords[i].1, depth[i] as f64));
    }
    poly.push(poly[0]);
    let expect: Vec<(usize, i8)> = (1..=n).map(|i| (cs[i % n].0, cs[i % n].2)).collect();
    if star.crossings(&poly)? != expect {
        return Err(degenerate(format!("representative of {s} does not read its crossing word")));
    }

    let fiber: Vec<C64> = f
        .preimages(&SPoint::Fin(poly[0]))?
        .into_iter()
        .map(|z| z.to_c64().ok_or_else(|| degenerate("preimage at ∞".into())))
        .collect::<Result<_, _>>()?;
    let lift = lift_closed(&f, model.tol_sep, &poly, &fiber).map_err(|e| match e {
        MonodromyError::SheetCollision(_) | MonodromyError::ContinuationStall(_) => degenerate(e.to_string()),
        other => other.into(),
    })?;
    let mut image = Slope::Trivial;
    let mut multiplier = BigRational::zero();
    let mut k = BigInt::from(1);
    for cycle in lift.perm.cycles() {
        let path: Vec<C64> = cycle.iter().flat_map(|i| lift.paths[*i].iter().copied()).collect();
        let word = reduce_cyclic(&star.crossings(&path)?);
        let count = |a: usize| word.iter().filter(|l| l.0 == a).count();
        let comp = act(&to_alg, &slope_from_counts(count(ax), count(ay), count(az))?)?;
        let deg = BigInt::from(cycle.len());
        k = k.lcm(&deg);
        if comp.is_trivial() {
            continue;
        }
        if !image.is_trivial() && image != comp {
            return Err(degenerate(format!("preimage of {s} has components {image} and {comp}")));
        }
        image = comp;
        multiplier += BigRational::new(BigInt::from(1), deg);
    }
    let k_usize = usize::try_from(&k).expect("small degree");
    if image.is_trivial() {
        return Ok(SlopePullbackResult::trivial(s.clone(), k_usize));
    }
    let power = (&multiplier * BigRational::from_integer(k)).to_integer();
    Ok(SlopePullbackResult { source: s.clone(), k: k_usize, image, power, multiplier })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_meets_legs_as_counted() {
        for (p, q) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 3.0), (-3.0, 5.0)] {
            let c = model_crossings(p, q);
            let count = |l: Leg| c.iter().filter(|x| x.1 == l).count() as f64;
            assert_eq!(count(Leg::E), f64::abs(p));
            assert_eq!(count(Leg::N), f64::abs(q));
            assert_eq!(count(Leg::D), f64::abs(p - q));
        }
    }

    #[test]
    fn counts_recover_slopes() {
        let sl = |p: i64, q: i64| Slope::new(BigInt::from(p), BigInt::from(q)).unwrap();
        assert_eq!(slope_from_counts(3, 2, 1).unwrap(), sl(2, 3));
        assert_eq!(slope_from_counts(3, 2, 5).unwrap(), sl(-2, 3));
        assert_eq!(slope_from_counts(1, 1, 1).unwrap(), Slope::Trivial);
        assert_eq!(slope_from_counts(0, 1, 1).unwrap(), sl(1, 0));
    }
}
