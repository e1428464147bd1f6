use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CorrError;
use crate::numeric::rmap::cluster;
use crate::numeric::{point_label, GaussRat, NumOptions, NumericError, RationalMap, SPoint};

type C64 = Complex64;

/// One of the three ends `0, 1, ∞` of `P^1 \ {0, 1, ∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum End {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Inf,
}

impl End {
    pub const ALL: [End; 3] = [End::Zero, End::One, End::Inf];

    pub fn point(self) -> SPoint<f64> {
        match self {
            End::Zero => SPoint::fin(0.0, 0.0),
            End::One => SPoint::fin(1.0, 0.0),
            End::Inf => SPoint::Inf,
        }
    }

    /// The end within chordal distance `tol` of `p`, if any.
    pub fn near(p: &SPoint<f64>, tol: f64) -> Option<End> {
        End::ALL.into_iter().find(|e| e.point().chordal(p) <= tol)
    }

    pub fn label(self) -> &'static str {
        match self {
            End::Zero => "0",
            End::One => "1",
            End::Inf => "inf",
        }
    }
}

/// How the correspondence `X ∘ Y^-1` is presented.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelKind {
    /// `X` is an inclusion and `Y = g`; the correspondence is `g^-1`.
    XInjective,
    /// `X` is constant with the given value and `Y = g` is a covering.
    XConstant { value: C64 },
}

#[derive(Clone, Debug)]
pub struct GMapModel {
    pub g: RationalMap<f64>,
    pub kind: ModelKind,
    /// `g^-1({0, 1, ∞}) \ {0, 1, ∞}`, sorted by real then imaginary part.
    pub extra_punctures: Vec<C64>,
    /// `g(e)` for each end (X-Injective only).
    pub end_images: Vec<(End, End)>,
    /// Fixed basepoint `m*` (X-Injective) or the constant value of `X`.
    pub basepoint: C64,
    pub tol_sep: f64,
}

/// A g-map as declared in TOML.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GMapSpec {
    pub num: Vec<GaussRat>,
    pub den: Vec<GaussRat>,
    /// `"injective"` (default), `"constant"` or `"isometric"` (degree one).
    #[serde(default)]
    pub kind: Option<String>,
    /// Value of a constant `X`.
    #[serde(default)]
    pub x_value: Option<GaussRat>,
}

impl GMapSpec {
    pub fn from_toml(text: &str) -> Result<Self, CorrError> {
        toml::from_str(text).map_err(|e| NumericError::Parse(e.to_string()).into())
    }

    pub fn build(&self, opts: &NumOptions) -> Result<GMapModel, CorrError> {
        let g = RationalMap::from_gauss(&self.num, &self.den)?.with_root_options(opts.root_options());
        let kind = match self.kind.as_deref() {
            None | Some("injective") => ModelKind::XInjective,
            Some("isometric") => {
                return build_isometric_model(g, opts.tol_sep);
            }
            Some("constant") => {
                let v =
                    self.x_value.as_ref().ok_or_else(|| NumericError::Parse("constant model needs x_value".into()))?;
                ModelKind::XConstant { value: v.to_complex() }
            }
            Some(other) => return Err(NumericError::Parse(format!("unknown model kind `{other}`")).into()),
        };
        build_model(g, kind, opts.tol_sep)
    }
}

pub fn build_model(g: RationalMap<f64>, kind: ModelKind, tol_sep: f64) -> Result<GMapModel, CorrError> {
    if g.degree() < 2 {
        return Err(CorrError::DegreeTooLow(g.degree()));
    }
    assemble(g, kind, tol_sep)
}

/// A degree-one X-Injective model: `g` is an automorphism of the moduli space permuting
/// the ends, as for flexible Lattès maps where both `X` and `Y` are isomorphisms.
pub fn build_isometric_model(g: RationalMap<f64>, tol_sep: f64) -> Result<GMapModel, CorrError> {
    if g.degree() != 1 {
        return Err(CorrError::WrongKind { expected: "degree-1" });
    }
    assemble(g, ModelKind::XInjective, tol_sep)
}

fn assemble(g: RationalMap<f64>, kind: ModelKind, tol_sep: f64) -> Result<GMapModel, CorrError> {
    // Y must be an unramified covering over the complement of the ends.
    for (c, _) in g.critical_points(tol_sep)? {
        let v = g.eval(&c);
        if End::near(&v, tol_sep).is_none() {
            return Err(CorrError::NotACovering(point_label(&v)));
        }
    }
    let mut pre = Vec::new();
    for e in End::ALL {
        pre.extend(g.preimages(&e.point())?);
    }
    let mut extra_punctures: Vec<C64> = cluster(&pre, tol_sep)
        .into_iter()
        .filter(|(p, _)| End::near(p, tol_sep).is_none())
        .filter_map(|(p, _)| p.to_c64())
        .collect();
    extra_punctures.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let (end_images, basepoint) = match kind {
        ModelKind::XConstant { value } => (vec![], value),
        ModelKind::XInjective => {
            let mut images = Vec::new();
            for e in End::ALL {
                let v = g.eval(&e.point());
                let img = End::near(&v, tol_sep).ok_or_else(|| CorrError::EndsNotInvariant(e.label().into()))?;
                images.push((e, img));
            }
            (images, select_basepoint(&g, tol_sep)?)
        }
    };
    Ok(GMapModel { g, kind, extra_punctures, end_images, basepoint, tol_sep })
}

/// Interior fixed point of least modulus; near-ties go to the larger imaginary part.
fn select_basepoint(g: &RationalMap<f64>, tol_sep: f64) -> Result<C64, CorrError> {
    let mut fixed: Vec<C64> =
        g.fixed_points()?.into_iter().filter(|p| End::near(p, tol_sep).is_none()).filter_map(|p| p.to_c64()).collect();
    fixed.sort_by(|a, b| {
        if (a.norm() - b.norm()).abs() <= tol_sep {
            b.im.total_cmp(&a.im)
        } else {
            a.norm().total_cmp(&b.norm())
        }
    });
    fixed.first().copied().ok_or(CorrError::NoInteriorFixedPoint)
}

/// Constant-`X` model over the quadratic covering `Y(w) = w^2`, with `X ≡ value`.
pub fn build_constant_model(value: C64, tol_sep: f64) -> Result<GMapModel, CorrError> {
    let g = RationalMap::from_gauss(
        &[GaussRat::from_ints(0, 0), GaussRat::from_ints(0, 0), GaussRat::from_ints(1, 0)],
        &[GaussRat::from_ints(1, 0)],
    )?;
    build_model(g, ModelKind::XConstant { value }, tol_sep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Properness {
    Proper,
    NotProper { extra_punctures: Vec<String> },
}

/// `X` is proper iff no puncture of the source is filled in, i.e. there are no extra punctures.
pub fn x_properness(model: &GMapModel) -> Result<Properness, CorrError> {
    if model.kind != ModelKind::XInjective {
        return Err(CorrError::WrongKind { expected: "X-Injective" });
    }
    if model.extra_punctures.is_empty() {
        Ok(Properness::Proper)
    } else {
        Ok(Properness::NotProper {
            extra_punctures: model.extra_punctures.iter().map(|z| point_label(&SPoint::Fin(*z))).collect(),
        })
    }
}

/// The equivalent conditions for a constant pullback, all of which hold for a constant-`X` model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantReport {
    pub pullback_relation_constant: bool,
    pub lambda_constant: bool,
    pub phi_constant: bool,
    pub sigma_constant: bool,
    pub correspondence_constant: bool,
    pub y_degree: usize,
    pub x_value: String,
}

impl ConstantReport {
    pub fn consistent(&self) -> bool {
        let v = [self.lambda_constant, self.phi_constant, self.sigma_constant, self.correspondence_constant];
        v.iter().all(|b| *b == self.pullback_relation_constant)
    }
}

pub fn constant_model_report(model: &GMapModel) -> Result<ConstantReport, CorrError> {
    let ModelKind::XConstant { value } = model.kind else {
        return Err(CorrError::WrongKind { expected: "X-Constant" });
    };
    Ok(ConstantReport {
        pullback_relation_constant: true,
        lambda_constant: true,
        phi_constant: true,
        sigma_constant: true,
        correspondence_constant: true,
        y_degree: model.g.degree(),
        x_value: point_label(&SPoint::Fin(value)),
    })
}

impl GMapModel {
    pub fn is_end(&self, w: C64) -> bool {
        End::near(&SPoint::Fin(w), self.tol_sep).is_some()
    }

    pub fn end_image(&self, e: End) -> Option<End> {
        self.end_images.iter().find(|(x, _)| *x == e).map(|(_, y)| *y)
    }
}
