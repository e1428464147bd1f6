use num_complex::Complex64;
use rayon::prelude::*;

use super::subgroup::Perm;
use super::table::MonodromyTable;
use super::MonodromyError;
use crate::correspondence::{inverse_branch, CorrError, GMapModel, ModelKind, Tracker};
use crate::curve::{FreeWord, Letter};
use crate::numeric::{RationalMap, SPoint};

type C64 = Complex64;

fn stall(e: CorrError) -> MonodromyError {
    match e {
        CorrError::Stall(at) => MonodromyError::ContinuationStall(at),
        CorrError::StepLimit(n) => MonodromyError::ContinuationStall(format!("{n} steps")),
        CorrError::BranchCollision(at) => {
            MonodromyError::ContinuationStall(format!("path meets a critical value near {at}"))
        }
        other => MonodromyError::Corr(other),
    }
}

/// Center of the monodromy computation: `m*` for X-Injective models; for constant `X`, a fixed
/// point of `M` away from the punctures of `W`.
pub fn monodromy_center(model: &GMapModel) -> Result<C64, MonodromyError> {
    match model.kind {
        ModelKind::XInjective => Ok(model.basepoint),
        ModelKind::XConstant { .. } => {
            let far = |z: C64| {
                model
                    .extra_punctures
                    .iter()
                    .chain(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
                    .all(|p| (z - p).norm() > 0.2)
            };
            [C64::new(0.5, 0.5), C64::new(-0.5, 0.5), C64::new(0.5, -0.5), C64::new(0.3, 0.9)]
                .into_iter()
                .find(|z| far(*z))
                .ok_or_else(|| MonodromyError::FiberDegenerate("no admissible base for the covering".into()))
        }
    }
}

/// All `d` solutions of `g(w) = m*`, sorted by real then imaginary part, and the basepoint sheet
/// (the index of `m*`; sheet 0 when `X` is constant).
pub fn compute_fiber(model: &GMapModel) -> Result<(Vec<C64>, usize), MonodromyError> {
    let m = monodromy_center(model)?;
    let raw = model.g.preimages(&SPoint::Fin(m))?;
    let mut fiber = Vec::with_capacity(raw.len());
    for p in raw {
        let seed = p.to_c64().ok_or_else(|| MonodromyError::FiberDegenerate("fiber point at ∞".into()))?;
        let w = inverse_branch(&model.g, m, seed, model.tol_sep)
            .map_err(|e| MonodromyError::FiberDegenerate(e.to_string()))?;
        fiber.push(w);
    }
    if fiber.len() != model.g.degree() {
        return Err(MonodromyError::FiberDegenerate(format!("{} points for degree {}", fiber.len(), model.g.degree())));
    }
    fiber.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    for i in 0..fiber.len() {
        for j in 0..i {
            if SPoint::Fin(fiber[i]).chordal(&SPoint::Fin(fiber[j])) <= model.tol_sep {
                return Err(MonodromyError::FiberDegenerate("coincident fiber points".into()));
            }
        }
    }
    if model.kind != ModelKind::XInjective {
        return Ok((fiber, 0));
    }
    let base = fiber
        .iter()
        .position(|w| SPoint::Fin(*w).chordal(&SPoint::Fin(m)) <= model.tol_sep)
        .ok_or_else(|| MonodromyError::FiberDegenerate("m* is not in its own fiber".into()))?;
    Ok((fiber, base))
}

/// Continue `w0` (over `path[0]`) along a polyline; the result starts with `w0`.
pub fn lift_polyline(g: &RationalMap<f64>, tol_sep: f64, path: &[C64], w0: C64) -> Result<Vec<C64>, MonodromyError> {
    let tracker = Tracker::new(g, tol_sep).map_err(stall)?;
    let mut out = vec![w0];
    let mut w = w0;
    for seg in path.windows(2) {
        w = tracker.track_recording(seg[0], w, seg[1], Some(&mut out)).map_err(stall)?;
    }
    Ok(out)
}

/// Where each sheet ends after lifting a loop, and the lifted paths.
#[derive(Clone, Debug)]
pub struct LoopLift {
    pub perm: Perm,
    pub paths: Vec<Vec<C64>>,
}

/// Lift a closed polyline from every point of `fiber` (its fiber) and match the endpoints.
pub fn lift_closed(
    g: &RationalMap<f64>,
    tol_sep: f64,
    path: &[C64],
    fiber: &[C64],
) -> Result<LoopLift, MonodromyError> {
    let paths: Vec<Vec<C64>> =
        fiber.par_iter().map(|w0| lift_polyline(g, tol_sep, path, *w0)).collect::<Result<_, _>>()?;
    let mut perm = Vec::with_capacity(fiber.len());
    for (i, p) in paths.iter().enumerate() {
        let end = *p.last().expect("nonempty");
        let mut d: Vec<(f64, usize)> = fiber.iter().enumerate().map(|(j, f)| ((end - f).norm(), j)).collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = 1.0 + end.norm();
        if d[0].0 > 1e-7 * scale || (d.len() > 1 && d[1].0 < 1e3 * d[0].0.max(1e-300) && d[1].0 < 1e-4 * scale) {
            return Err(MonodromyError::SheetCollision(i));
        }
        perm.push(d[0].1);
    }
    let mut seen = vec![false; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        if std::mem::replace(&mut seen[j], true) {
            return Err(MonodromyError::SheetCollision(i));
        }
    }
    Ok(LoopLift { perm: Perm(perm), paths })
}

/// Lift a word realized along the cut star, from every sheet over the loop basepoint.
pub fn lift_loop(model: &GMapModel, table: &MonodromyTable, w: &FreeWord) -> Result<LoopLift, MonodromyError> {
    let path = table.realize(w);
    if path.len() < 2 {
        return Ok(LoopLift {
            perm: Perm::identity(table.base_fiber.len()),
            paths: table.base_fiber.iter().map(|p| vec![*p]).collect(),
        });
    }
    lift_closed(&model.g, model.tol_sep, &path, &table.base_fiber)
}

pub(crate) fn letter_path(loops: &[Vec<C64>; 3], l: Letter) -> Vec<C64> {
    match l {
        Letter::X => loops[0].clone(),
        Letter::Y => loops[1].clone(),
        Letter::XInv => loops[0].iter().rev().copied().collect(),
        Letter::YInv => loops[1].iter().rev().copied().collect(),
    }
}
