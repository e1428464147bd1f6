//! Backward orbits of the correspondence that alternate between a repelling end and
//! the fixed basepoint `m*`.
//!
//! Points within `CHART_RADIUS` of an end are stored in the local coordinate at that
//! end with an unbounded exponent, since deep excursions get far closer to an end than
//! `f64` can resolve.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::branch::Tracker;
use super::ends::end_dynamics;
use super::model::{End, GMapModel, ModelKind};
use super::CorrError;
use crate::numeric::rmap::{cluster, LocalChart};
use crate::numeric::{point_label, ExtComplex, NumericError, SPoint};

type C64 = Complex64;

pub const CHART_RADIUS: f64 = 1e-3;
/// Distances to the ends at or above this are treated alike by the systole proxy.
pub const CLAMP_DISTANCE: f64 = 0.5;
/// Bound on `|g(μ_{k+1}) - μ_k|` (relative, in the local coordinate, near an end).
pub const ORBIT_TOL: f64 = 1e-9;
pub const MAX_PHASE_STEPS: usize = 100_000;
const CHART_NEWTON_ITERS: usize = 60;

/// A point of the moduli space, possibly in a local coordinate `u` at `at`
/// (`u = w - at`, or `u = 1/w` when `at = ∞`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MPoint {
    Base(C64),
    Chart { at: SPoint<f64>, u: ExtComplex },
}

fn chart_coord(at: &SPoint<f64>, w: &SPoint<f64>) -> ExtComplex {
    match (at, w) {
        (SPoint::Fin(p), SPoint::Fin(w)) => ExtComplex::from(w - p),
        (SPoint::Inf, SPoint::Fin(w)) => ExtComplex::from(*w).inv(),
        (SPoint::Inf, SPoint::Inf) => ExtComplex::ZERO,
        (SPoint::Fin(_), SPoint::Inf) => ExtComplex::from(C64::new(f64::INFINITY, 0.0)),
    }
}

fn from_chart(at: &SPoint<f64>, u: ExtComplex) -> C64 {
    match at {
        SPoint::Fin(p) => p + u.to_c64(),
        SPoint::Inf => u.inv().to_c64(),
    }
}

impl MPoint {
    pub fn to_c64(&self) -> C64 {
        match self {
            MPoint::Base(w) => *w,
            MPoint::Chart { at, u } => from_chart(at, *u),
        }
    }

    /// The end this point is charted at, if any.
    pub fn end(&self, tol: f64) -> Option<End> {
        match self {
            MPoint::Chart { at, .. } => End::near(at, tol),
            MPoint::Base(_) => None,
        }
    }

    /// Charts only near ends; everything else in plain coordinates.
    fn normalized(self) -> MPoint {
        match self {
            MPoint::Chart { at, u } if u.ln_abs() >= CHART_RADIUS.ln() => MPoint::Base(from_chart(&at, u)),
            MPoint::Base(w) => End::ALL
                .into_iter()
                .map(|e| (e, chart_coord(&e.point(), &SPoint::Fin(w))))
                .find(|(_, u)| u.ln_abs() < CHART_RADIUS.ln())
                .map_or(self, |(e, u)| MPoint::Chart { at: e.point(), u }),
            _ => self,
        }
    }

    /// `ln(1/d)` with `d = min(|μ|, |μ - 1|, 1/|μ|)`.
    fn ln_inv_dist(&self, tol: f64) -> f64 {
        match (self, self.end(tol)) {
            (MPoint::Chart { u, .. }, Some(_)) => -u.ln_abs(),
            _ => {
                let w = self.to_c64();
                -(w.norm().min((w - 1.0).norm()).min(1.0 / w.norm())).ln()
            }
        }
    }

    pub fn systole(&self, tol: f64) -> f64 {
        proxy_from_log(self.ln_inv_dist(tol))
    }
}

impl fmt::Display for MPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MPoint::Base(w) => write!(f, "{}", point_label(&SPoint::Fin(*w))),
            MPoint::Chart { at: SPoint::Inf, u } => write!(f, "1/({u})"),
            MPoint::Chart { at, u } => write!(f, "{} + {u}", point_label(at)),
        }
    }
}

impl Serialize for MPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn proxy_from_log(ln_inv_d: f64) -> f64 {
    2.0 * PI * PI / ln_inv_d.max(-CLAMP_DISTANCE.ln())
}

/// `2π² / ln(1/d(μ))` with `d(μ) = min(|μ|, |μ-1|, 1/|μ|)` clamped to at most 1/2.
/// Monotone in the distance to the ends; not an estimate of the true systole's size.
pub fn systole_proxy(mu: C64) -> Result<f64, CorrError> {
    let d = mu.norm().min((mu - 1.0).norm()).min(1.0 / mu.norm());
    if d == 0.0 || !d.is_finite() {
        return Err(CorrError::AtEnd);
    }
    Ok(proxy_from_log(-d.ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// The inverse branch fixing the repelling end.
    #[serde(rename = "e")]
    End,
    /// The inverse branch fixing `m*`.
    #[serde(rename = "m")]
    Basepoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuliOrbit {
    pub points: Vec<MPoint>,
    /// `branches[k]` carries `points[k]` to `points[k + 1]`.
    pub branches: Vec<Branch>,
    pub systoles: Vec<f64>,
    pub end: Option<End>,
    #[serde(serialize_with = "ser_c64")]
    pub basepoint: C64,
}

fn ser_c64<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

struct Engine<'a> {
    model: &'a GMapModel,
    tracker: Tracker<'a>,
    end: SPoint<f64>,
    end_chart: LocalChart<f64>,
    a: C64,
}

impl Engine<'_> {
    fn tol(&self) -> f64 {
        self.model.tol_sep
    }

    fn psi_end(&self, p: &MPoint) -> Result<MPoint, CorrError> {
        if let MPoint::Chart { at, u: v } = p {
            if at.chordal(&self.end) <= self.tol() {
                let u = self.end_chart.solve_ext(*v, *v * self.a, CHART_NEWTON_ITERS);
                return Ok(MPoint::Chart { at: self.end, u }.normalized());
            }
        }
        // Lift the ray from the end out to the target.
        let t = p.to_c64();
        let dir = chart_coord(&self.end, &SPoint::Fin(t)).direction();
        let v_r = ExtComplex::from(dir * CHART_RADIUS);
        let u_r = self.end_chart.solve_ext(v_r, v_r * self.a, CHART_NEWTON_ITERS);
        let (t_r, w_r) = (from_chart(&self.end, v_r), from_chart(&self.end, u_r));
        let w = self.tracker.track(t_r, w_r, t)?;
        Ok(MPoint::Base(w).normalized())
    }

    fn psi_base(&self, p: &MPoint) -> Result<MPoint, CorrError> {
        let m = self.model.basepoint;
        let charted_end = match p {
            MPoint::Chart { at, u } if End::near(at, self.tol()).is_some() => Some((*at, *u)),
            _ => None,
        };
        let Some((e1, v)) = charted_end else {
            let w = self.tracker.track(m, m, p.to_c64())?;
            return Ok(MPoint::Base(w).normalized());
        };
        // Lift the segment to the chart boundary, then descend radially inside the chart.
        let v_r = ExtComplex::from(v.direction() * CHART_RADIUS);
        let w_r = SPoint::Fin(self.tracker.track(m, m, from_chart(&e1, v_r))?);
        let pre = cluster(&self.model.g.preimages(&e1)?, self.tol());
        let (p2, k) = pre
            .into_iter()
            .min_by(|a, b| a.0.chordal(&w_r).total_cmp(&b.0.chordal(&w_r)))
            .ok_or(NumericError::Degenerate("empty fiber".into()))?;
        let u_r = chart_coord(&p2, &w_r);
        let scale = ExtComplex::from_ln_abs((v.ln_abs() - CHART_RADIUS.ln()) / k as f64);
        let u = self.model.g.local_chart(&p2).solve_ext(v, u_r * scale, CHART_NEWTON_ITERS);
        Ok(MPoint::Chart { at: p2, u }.normalized())
    }
}

/// Alternate the end branch until the systole proxy drops below each `ε_i`, then the
/// basepoint branch until back within `δ` of `m*`.
pub fn synthesize_orbit(model: &GMapModel, delta: f64, epsilons: &[f64]) -> Result<ModuliOrbit, CorrError> {
    if model.kind != ModelKind::XInjective {
        return Err(CorrError::WrongKind { expected: "X-Injective" });
    }
    let m = model.basepoint;
    let start = MPoint::Base(m);
    let mut orbit = ModuliOrbit {
        points: vec![start],
        branches: vec![],
        systoles: vec![start.systole(model.tol_sep)],
        end: None,
        basepoint: m,
    };
    if epsilons.is_empty() {
        return Ok(orbit);
    }
    let report = end_dynamics(model)?;
    let end = report.repelling_end().ok_or(CorrError::NoRepellingEnd)?;
    let a = report.entry(end).and_then(|x| x.branch_derivative).ok_or(CorrError::NoRepellingEnd)?;
    orbit.end = Some(end);
    let engine = Engine {
        model,
        tracker: Tracker::new(&model.g, model.tol_sep)?,
        end: end.point(),
        end_chart: model.g.local_chart(&end.point()),
        a,
    };
    let push = |orbit: &mut ModuliOrbit, p: MPoint, b: Branch| {
        orbit.systoles.push(p.systole(model.tol_sep));
        orbit.points.push(p);
        orbit.branches.push(b);
    };
    for &eps in epsilons {
        let mut steps = 0;
        while *orbit.systoles.last().unwrap() >= eps {
            let next = engine.psi_end(orbit.points.last().unwrap())?;
            push(&mut orbit, next, Branch::End);
            steps += 1;
            if steps > MAX_PHASE_STEPS {
                return Err(CorrError::StepLimit(MAX_PHASE_STEPS));
            }
        }
        steps = 0;
        loop {
            let cur = orbit.points.last().unwrap();
            if cur.end(model.tol_sep).is_none() && (cur.to_c64() - m).norm() < delta {
                break;
            }
            let next = engine.psi_base(cur)?;
            push(&mut orbit, next, Branch::Basepoint);
            steps += 1;
            if steps > MAX_PHASE_STEPS {
                return Err(CorrError::StepLimit(MAX_PHASE_STEPS));
            }
        }
    }
    let worst = max_residual(model, &orbit);
    if worst >= ORBIT_TOL {
        return Err(NumericError::ResidualTooLarge { residual: worst }.into());
    }
    Ok(orbit)
}

/// `|g(next) - target|`, relative in the local coordinate when `target` is charted at an end.
fn step_residual(model: &GMapModel, next: &MPoint, target: &MPoint) -> f64 {
    let g = &model.g;
    let image = |at: &SPoint<f64>| -> ExtComplex {
        match next {
            MPoint::Chart { at: p, u } if g.eval(p).chordal(at) <= model.tol_sep => g.local_chart(p).eval_ext(*u),
            _ => chart_coord(at, &g.eval_c(next.to_c64())),
        }
    };
    match target {
        MPoint::Chart { at, u: v } if End::near(at, model.tol_sep).is_some() => {
            let diff = image(at) - *v;
            if diff.is_zero() {
                0.0
            } else {
                (diff.ln_abs() - v.ln_abs()).exp()
            }
        }
        _ => {
            let img = match next {
                MPoint::Chart { at: p, u } => match g.eval(p) {
                    q @ SPoint::Fin(_) => from_chart(&q, g.local_chart(p).eval_ext(*u)),
                    SPoint::Inf => return f64::INFINITY,
                },
                MPoint::Base(w) => match g.eval_c(*w) {
                    SPoint::Fin(z) => z,
                    SPoint::Inf => return f64::INFINITY,
                },
            };
            (img - target.to_c64()).norm()
        }
    }
}

/// Largest step residual along the orbit.
pub fn max_residual(model: &GMapModel, orbit: &ModuliOrbit) -> f64 {
    orbit.points.windows(2).map(|w| step_residual(model, &w[1], &w[0])).fold(0.0, f64::max)
}

/// Every step is a genuine pullback: `g(μ_{k+1}) ≈ μ_k` within `ORBIT_TOL`.
pub fn orbit_verify(model: &GMapModel, orbit: &ModuliOrbit) -> bool {
    max_residual(model, orbit) < ORBIT_TOL
}
