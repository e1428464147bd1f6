use num_complex::Complex64;
use serde::Serialize;

use super::model::{End, GMapModel, ModelKind};
use super::CorrError;
use crate::numeric::{RationalMap, SPoint};

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EndVerdict {
    NotFixed,
    /// Local degrees of `X` and `Y` differ, so no branch derivative is defined.
    DegreeMismatch,
    /// `0 < |a| < 1`: the end attracts under `X ∘ Y^-1`.
    ObstructedTwistFamily,
    NotAttracting,
}

impl EndVerdict {
    pub fn classify(a: C64) -> EndVerdict {
        let r = a.norm();
        if r > 0.0 && r < 1.0 {
            EndVerdict::ObstructedTwistFamily
        } else {
            EndVerdict::NotAttracting
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndEntry {
    pub end: End,
    pub image: End,
    pub fixed: bool,
    pub x_degree: usize,
    pub y_degree: usize,
    /// Derivative of the branch of `X ∘ Y^-1` fixing the end, in local charts.
    #[serde(serialize_with = "ser_opt_c64")]
    pub branch_derivative: Option<C64>,
    /// `|g'(e)| > 1` at a fixed end.
    pub repelling: bool,
    pub verdict: EndVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EndSummary {
    NoFixedEnd,
    ObstructedTwistFamily,
    NoAttractingEnd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndReport {
    pub entries: Vec<EndEntry>,
    pub summary: EndSummary,
}

impl EndReport {
    pub fn repelling_end(&self) -> Option<End> {
        self.entries.iter().find(|e| e.repelling).map(|e| e.end)
    }

    pub fn entry(&self, e: End) -> Option<&EndEntry> {
        self.entries.iter().find(|x| x.end == e)
    }
}

fn ser_opt_c64<S: serde::Serializer>(v: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(z) => [z.re, z.im].serialize(s),
        None => s.serialize_none(),
    }
}

/// `g'` at `p` in the charts `w - p` (or `1/w`) at `p` and at `g(p)`.
pub fn chart_derivative(g: &RationalMap<f64>, p: &SPoint<f64>) -> C64 {
    g.local_chart(p).derivative()
}

pub fn end_dynamics(model: &GMapModel) -> Result<EndReport, CorrError> {
    if model.kind != ModelKind::XInjective {
        return Err(CorrError::WrongKind { expected: "X-Injective" });
    }
    let mut entries = Vec::new();
    for (end, image) in model.end_images.iter().copied() {
        let fixed = end == image;
        let y_degree = model.g.local_degree(&end.point(), model.tol_sep)?;
        let mut entry = EndEntry {
            end,
            image,
            fixed,
            x_degree: 1,
            y_degree,
            branch_derivative: None,
            repelling: false,
            verdict: EndVerdict::NotFixed,
        };
        if fixed {
            if y_degree != 1 {
                entry.verdict = EndVerdict::DegreeMismatch;
            } else {
                let gp = chart_derivative(&model.g, &end.point());
                let a = gp.inv();
                entry.branch_derivative = Some(a);
                entry.repelling = gp.norm() > 1.0;
                entry.verdict = EndVerdict::classify(a);
            }
        }
        entries.push(entry);
    }
    let summary = if entries.iter().all(|e| !e.fixed) {
        EndSummary::NoFixedEnd
    } else if entries.iter().any(|e| e.verdict == EndVerdict::ObstructedTwistFamily) {
        EndSummary::ObstructedTwistFamily
    } else {
        EndSummary::NoAttractingEnd
    };
    Ok(EndReport { entries, summary })
}
