use num_complex::Complex64;

use super::CorrError;
use crate::numeric::{point_label, NumericError, RationalMap, SPoint};

type C64 = Complex64;

/// Predictor step as a fraction of the distance to the nearest critical value.
pub const STEP_FRACTION: f64 = 0.05;
/// Accepted `|g(w) - t| / max(1, |t|)` after correction.
pub const CORRECTOR_TOL: f64 = 1e-12;
pub const MAX_STEPS: usize = 100_000;
/// Largest accepted corrector move relative to the predictor's.
pub const CORRECTION_RATIO: f64 = 0.25;
/// Relative step floor below which continuation gives up.
pub const STEP_FLOOR: f64 = 1e-6;

/// One Newton correction sequence for `g(w) = t`.
fn newton(g: &RationalMap<f64>, mut w: C64, t: C64) -> C64 {
    for _ in 0..40 {
        let (n, dn) = g.num().eval_with_deriv(w);
        let (d, dd) = g.den().eval_with_deriv(w);
        let f = n - d * t;
        let df = dn - dd * t;
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        w -= step;
        if step.norm() <= 1e-16 * w.norm().max(1e-300) {
            break;
        }
    }
    w
}

fn residual(g: &RationalMap<f64>, w: C64, t: C64) -> f64 {
    match g.eval_c(w) {
        SPoint::Fin(v) => (v - t).norm() / t.norm().max(1.0),
        SPoint::Inf => f64::INFINITY,
    }
}

/// The preimage of `target` nearest to `seed`, refined to `|g(w) - target| < 1e-12`.
pub fn inverse_branch(g: &RationalMap<f64>, target: C64, seed: C64, tol_sep: f64) -> Result<C64, CorrError> {
    let mut pre: Vec<C64> = g.preimages(&SPoint::Fin(target))?.into_iter().filter_map(|p| p.to_c64()).collect();
    pre.sort_by(|a, b| (a - seed).norm().total_cmp(&(b - seed).norm()));
    let w = newton(g, *pre.first().ok_or(NumericError::Degenerate("no finite preimage".into()))?, target);
    if pre.iter().skip(1).any(|q| SPoint::Fin(*q).chordal(&SPoint::Fin(w)) < tol_sep) {
        return Err(CorrError::BranchCollision(point_label(&SPoint::Fin(w))));
    }
    if residual(g, w, target) > CORRECTOR_TOL {
        return Err(NumericError::ResidualTooLarge { residual: residual(g, w, target) }.into());
    }
    Ok(w)
}

/// Path-lifting of straight segments through `g`, away from its critical values.
#[derive(Clone, Debug)]
pub struct Tracker<'a> {
    g: &'a RationalMap<f64>,
    crit_values: Vec<C64>,
    tol_sep: f64,
}

impl<'a> Tracker<'a> {
    pub fn new(g: &'a RationalMap<f64>, tol_sep: f64) -> Result<Self, CorrError> {
        let crit_values = g.critical_points(tol_sep)?.iter().filter_map(|(c, _)| g.eval(c).to_c64()).collect();
        Ok(Tracker { g, crit_values, tol_sep })
    }

    fn clearance(&self, t: C64) -> Result<f64, CorrError> {
        let (d, cv) = self.crit_values.iter().map(|c| ((t - c).norm(), *c)).fold((f64::INFINITY, t), |a, b| {
            if b.0 < a.0 {
                b
            } else {
                a
            }
        });
        if d < self.tol_sep {
            return Err(CorrError::BranchCollision(point_label(&SPoint::Fin(cv))));
        }
        Ok(d)
    }

    /// Continue the preimage `w0` of `t0` along `[t0, t1]`.
    pub fn track(&self, t0: C64, w0: C64, t1: C64) -> Result<C64, CorrError> {
        self.track_recording(t0, w0, t1, None)
    }

    /// As [`Tracker::track`], appending every accepted point (after `w0`) to `out`.
    pub fn track_recording(&self, t0: C64, w0: C64, t1: C64, mut out: Option<&mut Vec<C64>>) -> Result<C64, CorrError> {
        let len = (t1 - t0).norm();
        let dir = if len > 0.0 { (t1 - t0) / len } else { C64::new(0.0, 0.0) };
        let (mut s, mut t, mut w) = (0.0, t0, w0);
        let mut steps = 0;
        let mut shrink = 1.0;
        while s < len {
            let h = (shrink * STEP_FRACTION * self.clearance(t)?).min(len - s);
            let next = if s + h >= len { t1 } else { t0 + dir * (s + h) };
            let dw = (next - t) / self.g.deriv(w);
            let wp = if dw.re.is_finite() && dw.im.is_finite() { w + dw } else { w };
            let wc = newton(self.g, wp, next);
            steps += 1;
            if steps > MAX_STEPS {
                return Err(CorrError::StepLimit(MAX_STEPS));
            }
            // Reject steps whose correction is large next to the predicted motion.
            let moved = (wp - w).norm().max(1e-14 * w.norm().max(1.0));
            if (wc - wp).norm() > CORRECTION_RATIO * moved || residual(self.g, wc, next) > CORRECTOR_TOL {
                shrink *= 0.5;
                if shrink < STEP_FLOOR {
                    return Err(CorrError::Stall(point_label(&SPoint::Fin(t))));
                }
                continue;
            }
            shrink = (shrink * 2.0).min(1.0);
            w = wc;
            if let Some(o) = out.as_deref_mut() {
                o.push(w);
            }
            s += h;
            t = next;
        }
        self.clearance(t1)?;
        let r = residual(self.g, w, t1);
        if r > CORRECTOR_TOL {
            return Err(NumericError::ResidualTooLarge { residual: r }.into());
        }
        Ok(w)
    }
}
