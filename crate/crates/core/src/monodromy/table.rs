use num_complex::Complex64;
use serde::Serialize;

use super::lift::{compute_fiber, letter_path, lift_closed, lift_polyline};
use super::offset::Walk;
use super::star::{CutStar, Puncture, PunctureKind};
use super::subgroup::{act_word, Perm};
use super::MonodromyError;
use crate::correspondence::{End, GMapModel, ModelKind};
use crate::curve::FreeWord;
use crate::numeric::{point_label, SPoint};

type C64 = Complex64;

/// Covering monodromy of `Y = g` over loops based next to `m*`.
#[derive(Clone, Debug)]
pub struct MonodromyTable {
    /// Fiber over `m*`, sorted; sheet `i` is the point `fiber[i]`.
    pub fiber: Vec<C64>,
    pub basepoint_sheet: usize,
    /// Loop basepoint: a point close to `m*` off every arc.
    pub base: C64,
    /// Fiber over `base`, sheet by sheet.
    pub base_fiber: Vec<C64>,
    /// Path from `base` back to `m*` and along the lift of `[m*, base]` to the basepoint sheet.
    /// Identifies loops at `base` with loops at `m*` on both sides; `None` when `X` is constant.
    pub base_connector: Option<Vec<C64>>,
    pub rho_x: Perm,
    pub rho_y: Perm,
    pub rho_z: Perm,
    /// Ends encircled by the loops `x, y, z`.
    pub generator_ends: [End; 3],
    /// Closed polylines at `base` realizing `x, y, z`.
    pub loops: [Vec<C64>; 3],
    /// Lifts of the `x` and `y` loops, per sheet.
    pub lifts: [Vec<Vec<C64>>; 2],
    /// Arcs to every puncture of `W = P^1 \ g^-1{0, 1, ∞}`.
    pub star: CutStar,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    pub degree: usize,
    pub fiber: Vec<String>,
    pub basepoint_sheet: usize,
    pub rho_x: Perm,
    pub rho_y: Perm,
    pub rho_z: Perm,
    pub generator_ends: [End; 3],
    pub transitive: bool,
}

/// Loop around arc `k` of `star`, based at `base_key`, crossing the arc once.
fn generator_loop(walk: &Walk, star: &CutStar, k: usize, base_key: f64) -> Vec<C64> {
    let arc = &star.arcs[k];
    let s = if arc.is_ray() { walk.l_ref } else { 0.45 * arc.length() };
    let (kr, kl) = (walk.side_key(k, false, s), walk.side_key(k, true, s));
    let (near, far) = if (kr - base_key).abs() < (kl - base_key).abs() { (kr, kl) } else { (kl, kr) };
    let mut path = walk.path(base_key, near, 1.0);
    path.extend(walk.path(far, base_key, 2.0));
    path.push(path[0]);
    path
}

pub fn monodromy_table(model: &GMapModel, seed: u64) -> Result<MonodromyTable, MonodromyError> {
    let (fiber, basepoint_sheet) = compute_fiber(model)?;
    let m = super::lift::monodromy_center(model)?;
    let mut punctures: Vec<Puncture> = End::ALL.iter().map(|e| Puncture::end(*e)).collect();
    for (i, p) in model.extra_punctures.iter().enumerate() {
        punctures.push(Puncture { kind: PunctureKind::Extra(i), point: SPoint::Fin(*p) });
    }
    let star = CutStar::build(m, &punctures, seed)?;
    let m_star = star.restrict(|p| matches!(p.kind, PunctureKind::End(_)));
    let walk = Walk::new(&m_star, 2)?;

    // Base point inside the widest gap of the full star, on a corner arc of the reduced one.
    let (mid, k) = star.widest_gap();
    let n = star.arcs.len();
    let lo = star.arcs[k].angle;
    let hi = if n == 1 { lo + std::f64::consts::TAU } else { star.arcs[(k + 1) % n].angle };
    let hi = if hi <= lo { hi + std::f64::consts::TAU } else { hi };
    // Prefer a base whose whole fiber sits clear of the star, so lifted loops have well-defined words.
    let mut best: Option<(f64, f64, C64, Vec<C64>)> = None;
    for f in [0.5, 0.4, 0.6, 0.3, 0.7, 0.2, 0.8] {
        let Some(key) = walk.corner_key(lo + (hi - lo) * f).or_else(|| walk.corner_key(mid)) else { continue };
        let b = walk.point(key, 1.0);
        let bf: Vec<C64> = fiber
            .iter()
            .map(|p| lift_polyline(&model.g, model.tol_sep, &[m, b], *p).map(|v| *v.last().expect("nonempty")))
            .collect::<Result<_, _>>()?;
        let clear = bf.iter().map(|z| star.distance(*z)).fold(f64::INFINITY, f64::min);
        let done = clear >= 0.1 * walk.unit;
        if best.as_ref().is_none_or(|x| clear > x.0) {
            best = Some((clear, key, b, bf));
        }
        if done {
            break;
        }
    }
    let (_, base_key, base, base_fiber) =
        best.ok_or_else(|| MonodromyError::Star("no room for the loop basepoint".into()))?;

    let base_connector = if model.kind == ModelKind::XInjective {
        let lifted = lift_polyline(&model.g, model.tol_sep, &[m, base], fiber[basepoint_sheet])?;
        // Step off the center along the segment, then swing around it on a small arc to where the
        // lift leaves: loops around m* are trivial in W, so either way round gives the same word.
        let eps = 0.05 * (base - m).norm();
        let rest: Vec<C64> = lifted.into_iter().skip_while(|w| (w - m).norm() < 4.0 * eps).collect();
        let exit = rest.first().copied().unwrap_or(base_fiber[basepoint_sheet]);
        let (t0, t1) = ((base - m).arg(), (exit - m).arg());
        let dt = (t1 - t0 + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
        let mut path = vec![base];
        path.extend((0..=16).map(|k| m + C64::from_polar(eps, t0 + dt * k as f64 / 16.0)));
        path.extend(rest);
        if path.len() < 19 {
            path.push(base_fiber[basepoint_sheet]);
        }
        Some(path)
    } else {
        None
    };

    // Counterclockwise arcs a0, a1, a2 satisfy a2·a1·a0 = 1; take x = a2, y = a1, z = a0.
    let mut loops: Vec<Vec<C64>> = Vec::new();
    let mut generator_ends = Vec::new();
    for k in [2, 1, 0] {
        let mut path = generator_loop(&walk, &m_star, k, base_key);
        match m_star.crossings(&path)?.as_slice() {
            [(j, 1)] if *j == k => {}
            [(j, -1)] if *j == k => path.reverse(),
            other => return Err(MonodromyError::Star(format!("generator loop reads {other:?}"))),
        }
        let PunctureKind::End(e) = m_star.arcs[k].puncture.kind else { unreachable!("reduced star has ends only") };
        generator_ends.push(e);
        loops.push(path);
    }
    let loops: [Vec<C64>; 3] = loops.try_into().expect("three loops");
    let generator_ends: [End; 3] = generator_ends.try_into().expect("three ends");

    let lx = lift_closed(&model.g, model.tol_sep, &loops[0], &base_fiber)?;
    let ly = lift_closed(&model.g, model.tol_sep, &loops[1], &base_fiber)?;
    let lz = lift_closed(&model.g, model.tol_sep, &loops[2], &base_fiber)?;
    if !lx.perm.then(&ly.perm).then(&lz.perm).is_identity() {
        return Err(MonodromyError::Star("monodromy violates ρx·ρy·ρz = 1".into()));
    }
    Ok(MonodromyTable {
        fiber,
        basepoint_sheet,
        base,
        base_fiber,
        base_connector,
        rho_x: lx.perm,
        rho_y: ly.perm,
        rho_z: lz.perm,
        generator_ends,
        loops,
        lifts: [lx.paths, ly.paths],
        star,
    })
}

impl MonodromyTable {
    pub fn degree(&self) -> usize {
        self.fiber.len()
    }

    /// Closed polyline at `base` following the letters of `w`.
    pub fn realize(&self, w: &FreeWord) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for l in w.letters() {
            let p = letter_path(&self.loops, *l);
            out.extend(p.into_iter().skip(usize::from(!out.is_empty())));
        }
        out
    }

    pub fn act(&self, w: &FreeWord) -> Perm {
        act_word(&self.rho_x, &self.rho_y, w)
    }

    pub fn is_transitive(&self) -> bool {
        let h = super::subgroup::hf_subgroup(&self.rho_x, &self.rho_y, self.basepoint_sheet);
        h.index == self.degree()
    }

    pub fn report(&self) -> MonodromyReport {
        MonodromyReport {
            degree: self.degree(),
            fiber: self.fiber.iter().map(|z| point_label(&SPoint::Fin(*z))).collect(),
            basepoint_sheet: self.basepoint_sheet,
            rho_x: self.rho_x.clone(),
            rho_y: self.rho_y.clone(),
            rho_z: self.rho_z.clone(),
            generator_ends: self.generator_ends,
            transitive: self.is_transitive(),
        }
    }
}
