//! Rational maps `N/D` acting on the Riemann sphere.

use num_complex::Complex;
use num_traits::Zero;

use super::cpoly::{CPoly, RootOptions};
use super::ext::ExtComplex;
use super::gauss::GaussRat;
use super::NumericError;
use crate::scalar::RealScalar;

type Cx<T> = Complex<T>;

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SPoint<T: RealScalar> {
    Fin(Cx<T>),
    Inf,
}

impl<T: RealScalar> SPoint<T> {
    pub fn fin(re: f64, im: f64) -> Self {
        SPoint::Fin(Cx::new(T::lit(re), T::lit(im)))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, SPoint::Inf)
    }

    /// Chordal distance, at most 2.
    pub fn chordal(&self, o: &SPoint<T>) -> T {
        let two = T::lit(2.0);
        match (self, o) {
            (SPoint::Inf, SPoint::Inf) => T::zero(),
            (SPoint::Fin(z), SPoint::Inf) | (SPoint::Inf, SPoint::Fin(z)) => two / (T::one() + z.norm_sqr()).sqrt(),
            (SPoint::Fin(a), SPoint::Fin(b)) => {
                if !a.re.is_finite() || !a.im.is_finite() {
                    return SPoint::Inf.chordal(o);
                }
                if !b.re.is_finite() || !b.im.is_finite() {
                    return self.chordal(&SPoint::Inf);
                }
                two * (a - b).norm() / ((T::one() + a.norm_sqr()).sqrt() * (T::one() + b.norm_sqr()).sqrt())
            }
        }
    }

    pub fn to_c64(&self) -> Option<Complex<f64>> {
        match self {
            SPoint::Fin(z) => Some(Complex::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())),
            SPoint::Inf => None,
        }
    }
}

/// Möbius transformation `w -> (a w + b) / (c w + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius<T: RealScalar> {
    pub a: Cx<T>,
    pub b: Cx<T>,
    pub c: Cx<T>,
    pub d: Cx<T>,
}

impl<T: RealScalar> Mobius<T> {
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn apply(&self, p: &SPoint<T>) -> SPoint<T> {
        match p {
            SPoint::Inf => {
                if self.c.is_zero() {
                    SPoint::Inf
                } else {
                    SPoint::Fin(self.a / self.c)
                }
            }
            SPoint::Fin(w) => {
                let den = self.c * w + self.d;
                if den.is_zero() {
                    SPoint::Inf
                } else {
                    SPoint::Fin((self.a * w + self.b) / den)
                }
            }
        }
    }

    pub fn inverse(&self) -> Self {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }
}

/// Local expression `v = A(u) / B(u)` of a map near a point, in the charts
/// `u = w - p` (or `1/w` at ∞) and `v = w' - g(p)` (or `1/w'`).
#[derive(Clone, Debug)]
pub struct LocalChart<T: RealScalar> {
    pub a: CPoly<T>,
    pub b: CPoly<T>,
}

impl<T: RealScalar> LocalChart<T> {
    /// Derivative at the base point.
    pub fn derivative(&self) -> Cx<T> {
        self.a.coeff(1) / self.b.coeff(0)
    }

    pub fn eval(&self, u: Cx<T>) -> Cx<T> {
        self.a.eval(u) / self.b.eval(u)
    }
}

impl LocalChart<f64> {
    pub fn eval_ext(&self, u: ExtComplex) -> ExtComplex {
        horner_ext(&self.a, u) / horner_ext(&self.b, u)
    }

    /// Solve `A(u) = v B(u)` for the root near `seed` by Newton's method.
    pub fn solve_ext(&self, v: ExtComplex, seed: ExtComplex, iters: usize) -> ExtComplex {
        let (da, db) = (self.a.derivative(), self.b.derivative());
        let mut u = seed;
        for _ in 0..iters {
            let f = horner_ext(&self.a, u) - v * horner_ext(&self.b, u);
            let df = horner_ext(&da, u) - v * horner_ext(&db, u);
            let step = f / df;
            u = u - step;
            if step.is_zero() || step.ln_abs() < u.ln_abs() - 50.0 * std::f64::consts::LN_2 {
                break;
            }
        }
        u
    }
}

fn horner_ext(p: &CPoly<f64>, u: ExtComplex) -> ExtComplex {
    p.coeffs().iter().rev().fold(ExtComplex::ZERO, |acc, c| acc * u + ExtComplex::from(*c))
}

/// Rational map `g = N / D` of degree `max(deg N, deg D)`, with coprime `N`, `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap<T: RealScalar> {
    num: CPoly<T>,
    den: CPoly<T>,
    degree: usize,
    opts: RootOptions<T>,
}

/// Separation below which two sphere points count as one (chordal metric).
pub const DEFAULT_TOL_SEP: f64 = 1e-6;

impl<T: RealScalar> RationalMap<T> {
    pub fn new(num: CPoly<T>, den: CPoly<T>) -> Result<Self, NumericError> {
        if den.is_zero() {
            return Err(NumericError::Degenerate("zero denominator".into()));
        }
        if num.is_zero() {
            return Err(NumericError::Degenerate("constant map".into()));
        }
        let degree = num.degree().unwrap().max(den.degree().unwrap());
        if degree == 0 {
            return Err(NumericError::Degenerate("constant map".into()));
        }
        let (small, other) = if num.degree() <= den.degree() { (&num, &den) } else { (&den, &num) };
        if small.degree().unwrap() > 0 {
            for r in small.roots(&RootOptions::default())? {
                if other.backward_error(r) < T::lit(1e-8) {
                    return Err(NumericError::Degenerate("numerator and denominator share a root".into()));
                }
            }
        }
        Ok(RationalMap { num, den, degree, opts: RootOptions::default() })
    }

    pub fn from_gauss(num: &[GaussRat], den: &[GaussRat]) -> Result<Self, NumericError> {
        let conv = |v: &[GaussRat]| CPoly::new(v.iter().map(GaussRat::to_complex).collect());
        RationalMap::new(conv(num), conv(den))
    }

    pub fn with_root_options(mut self, opts: RootOptions<T>) -> Self {
        self.opts = opts;
        self
    }

    pub fn root_options(&self) -> &RootOptions<T> {
        &self.opts
    }

    pub fn num(&self) -> &CPoly<T> {
        &self.num
    }

    pub fn den(&self) -> &CPoly<T> {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval_c(&self, w: Cx<T>) -> SPoint<T> {
        let d = self.den.eval(w);
        if d.is_zero() {
            SPoint::Inf
        } else {
            SPoint::Fin(self.num.eval(w) / d)
        }
    }

    pub fn eval(&self, p: &SPoint<T>) -> SPoint<T> {
        match p {
            SPoint::Fin(w) => self.eval_c(*w),
            SPoint::Inf => {
                let (a, b) = (self.num.degree().unwrap(), self.den.degree().unwrap());
                if a > b {
                    SPoint::Inf
                } else if a < b {
                    SPoint::Fin(Cx::zero())
                } else {
                    SPoint::Fin(self.num.coeff(a) / self.den.coeff(b))
                }
            }
        }
    }

    /// `g'(w)` at a finite non-pole.
    pub fn deriv(&self, w: Cx<T>) -> Cx<T> {
        let (n, dn) = self.num.eval_with_deriv(w);
        let (d, dd) = self.den.eval_with_deriv(w);
        (dn * d - n * dd) / (d * d)
    }

    /// The map written in local coordinates at `p` and `g(p)`.
    pub fn local_chart(&self, p: &SPoint<T>) -> LocalChart<T> {
        let (ns, ds) = match p {
            SPoint::Fin(w) => (self.num.shift(*w), self.den.shift(*w)),
            SPoint::Inf => (self.num.reversed(self.degree), self.den.reversed(self.degree)),
        };
        let (a, b) = match self.eval(p) {
            SPoint::Fin(q) => (ns.sub(&ds.scale(q)), ds),
            SPoint::Inf => (ds, ns),
        };
        // The base point maps to the base point exactly.
        let mut coeffs = a.coeffs().to_vec();
        if let Some(c0) = coeffs.first_mut() {
            *c0 = Cx::zero();
        }
        LocalChart { a: CPoly::new(coeffs), b }
    }

    /// Wronskian `N'D - ND'`, vanishing at finite critical points.
    fn wronskian(&self) -> CPoly<T> {
        self.num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()))
            .chop(T::lit(64.0) * T::epsilon())
    }

    /// Distinct critical points with their local degrees (`2d - 2` counted with multiplicity).
    pub fn critical_points(&self, tol_sep: T) -> Result<Vec<(SPoint<T>, usize)>, NumericError> {
        let w = self.wronskian();
        let total = 2 * self.degree - 2;
        let finite = match w.degree() {
            None => return Err(NumericError::Degenerate("map has vanishing derivative".into())),
            Some(0) => vec![],
            Some(_) => w.roots(&self.opts)?,
        };
        let mut pts: Vec<SPoint<T>> = finite.into_iter().map(SPoint::Fin).collect();
        pts.extend(std::iter::repeat_n(SPoint::Inf, total - pts.len()));
        Ok(cluster(&pts, tol_sep).into_iter().map(|(p, m)| (p, m + 1)).collect())
    }

    /// Local degree at `p`: one more than the critical multiplicity there.
    pub fn local_degree(&self, p: &SPoint<T>, tol_sep: T) -> Result<usize, NumericError> {
        Ok(self.critical_points(tol_sep)?.into_iter().find(|(c, _)| c.chordal(p) <= tol_sep).map_or(1, |(_, k)| k))
    }

    /// All `d` preimages of `t`, with multiplicity.
    pub fn preimages(&self, t: &SPoint<T>) -> Result<Vec<SPoint<T>>, NumericError> {
        let p = match t {
            SPoint::Inf => self.den.clone(),
            SPoint::Fin(v) => self.num.sub(&self.den.scale(*v)).chop(T::lit(64.0) * T::epsilon()),
        };
        let mut out: Vec<SPoint<T>> = match p.degree() {
            None => return Err(NumericError::Degenerate("preimage equation vanishes identically".into())),
            Some(0) => vec![],
            Some(_) => p.roots(&self.opts)?.into_iter().map(SPoint::Fin).collect(),
        };
        out.extend(std::iter::repeat_n(SPoint::Inf, self.degree - out.len()));
        Ok(out)
    }

    /// All `d + 1` fixed points, with multiplicity.
    pub fn fixed_points(&self) -> Result<Vec<SPoint<T>>, NumericError> {
        let p = self.num.sub(&self.den.mul(&CPoly::var())).chop(T::lit(64.0) * T::epsilon());
        let mut out: Vec<SPoint<T>> = match p.degree() {
            None => return Err(NumericError::Degenerate("identity map".into())),
            Some(0) => vec![],
            Some(_) => p.roots(&self.opts)?.into_iter().map(SPoint::Fin).collect(),
        };
        out.extend(std::iter::repeat_n(SPoint::Inf, self.degree + 1 - out.len()));
        Ok(out)
    }

    /// `h ∘ g ∘ h^-1`.
    pub fn conjugate(&self, h: &Mobius<T>) -> Result<Self, NumericError> {
        let inv = h.inverse();
        // h^-1(w) = L1 / L2 in homogeneous form.
        let l1 = CPoly::new(vec![inv.b, inv.a]);
        let l2 = CPoly::new(vec![inv.d, inv.c]);
        let subst = |p: &CPoly<T>| {
            (0..=self.degree)
                .fold(CPoly::zero(), |acc, k| acc.add(&l1.pow(k).mul(&l2.pow(self.degree - k)).scale(p.coeff(k))))
        };
        let (p, q) = (subst(&self.num), subst(&self.den));
        let num = p.scale(h.a).add(&q.scale(h.b));
        let den = p.scale(h.c).add(&q.scale(h.d));
        let chop = T::lit(64.0) * T::epsilon();
        Ok(RationalMap::new(num.chop(chop), den.chop(chop))?.with_root_options(self.opts))
    }
}

/// Greedy clustering of sphere points within `tol`; returns representatives and counts.
/// The representative is the mean of the members, taken in `1/w` for clusters near ∞.
pub fn cluster<T: RealScalar>(pts: &[SPoint<T>], tol: T) -> Vec<(SPoint<T>, usize)> {
    let mut groups: Vec<Vec<SPoint<T>>> = Vec::new();
    for p in pts {
        match groups.iter_mut().find(|g| g[0].chordal(p) <= tol) {
            Some(g) => g.push(*p),
            None => groups.push(vec![*p]),
        }
    }
    groups.into_iter().map(|g| (centroid(&g), g.len())).collect()
}

fn centroid<T: RealScalar>(g: &[SPoint<T>]) -> SPoint<T> {
    let mut fin = Vec::with_capacity(g.len());
    for p in g {
        match p {
            SPoint::Inf => return SPoint::Inf,
            SPoint::Fin(z) => fin.push(*z),
        }
    }
    let n = T::from_usize(fin.len()).unwrap();
    let mean = |v: &mut dyn Iterator<Item = Cx<T>>| v.fold(Cx::zero(), |a: Cx<T>, b| a + b) / n;
    let near = mean(&mut fin.iter().copied());
    if near.norm() <= T::one() {
        return SPoint::Fin(near);
    }
    let far = mean(&mut fin.iter().map(|z| z.inv()));
    if far.is_zero() {
        SPoint::Inf
    } else {
        SPoint::Fin(far.inv())
    }
}
