//! Complex polynomials and Aberth–Ehrlich root finding.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::NumericError;
use crate::scalar::RealScalar;

type Cx<T> = Complex<T>;

/// Root-finder controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions<T: RealScalar> {
    /// Bound on the backward error `|p(z)| / Σ|a_k||z|^k` of every returned root.
    pub tol_res: T,
    pub max_iter: usize,
}

impl<T: RealScalar> Default for RootOptions<T> {
    fn default() -> Self {
        RootOptions { tol_res: T::residual_tol(), max_iter: 500 }
    }
}

/// Coefficients low degree first, trailing exact zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoly<T: RealScalar> {
    c: Vec<Cx<T>>,
}

impl<T: RealScalar> CPoly<T> {
    pub fn new(mut c: Vec<Cx<T>>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        CPoly { c }
    }

    pub fn from_real(c: &[f64]) -> Self {
        CPoly::new(c.iter().map(|&x| Cx::new(T::lit(x), T::zero())).collect())
    }

    pub fn zero() -> Self {
        CPoly { c: vec![] }
    }

    pub fn constant(a: Cx<T>) -> Self {
        CPoly::new(vec![a])
    }

    /// The identity polynomial `w`.
    pub fn var() -> Self {
        CPoly::new(vec![Cx::zero(), Cx::one()])
    }

    /// `Π (w - r)`.
    pub fn from_roots(roots: &[Cx<T>]) -> Self {
        roots.iter().fold(CPoly::constant(Cx::one()), |acc, r| acc.mul(&CPoly::new(vec![-*r, Cx::one()])))
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.c
    }

    /// Coefficient of `w^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Cx<T> {
        self.c.get(k).copied().unwrap_or_else(Cx::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.c.iter().rev().fold(Cx::zero(), |acc, a| acc * z + a)
    }

    /// `(p(z), p'(z))` in one Horner pass.
    pub fn eval_with_deriv(&self, z: Cx<T>) -> (Cx<T>, Cx<T>) {
        let mut p = Cx::zero();
        let mut dp = Cx::zero();
        for a in self.c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    /// `Σ |a_k| |z|^k`, the scale of rounding errors in `p(z)`.
    pub fn abs_eval(&self, z: Cx<T>) -> T {
        let r = z.norm();
        self.c.iter().rev().fold(T::zero(), |acc, a| acc * r + a.norm())
    }

    pub fn backward_error(&self, z: Cx<T>) -> T {
        let s = self.abs_eval(z);
        if s == T::zero() {
            T::zero()
        } else {
            self.eval(z).norm() / s
        }
    }

    pub fn derivative(&self) -> Self {
        CPoly::new(self.c.iter().enumerate().skip(1).map(|(k, a)| *a * T::from_usize(k).unwrap()).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        CPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-Cx::one()))
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        CPoly::new(self.c.iter().map(|a| *a * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return CPoly::zero();
        }
        let mut out = vec![Cx::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j] + *a * b;
            }
        }
        CPoly::new(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(CPoly::constant(Cx::one()), |acc, _| acc.mul(self))
    }

    /// `p(w + a)`.
    pub fn shift(&self, a: Cx<T>) -> Self {
        let lin = CPoly::new(vec![a, Cx::one()]);
        self.c.iter().rev().fold(CPoly::zero(), |acc, coef| acc.mul(&lin).add(&CPoly::constant(*coef)))
    }

    /// `w^n p(1/w)` for a formal degree `n >= deg p`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut c = vec![Cx::zero(); n + 1];
        for (k, a) in self.c.iter().enumerate() {
            c[n - k] = *a;
        }
        CPoly::new(c)
    }

    /// Zero out coefficients below `rel · max|a_k|` (cancellation noise).
    pub fn chop(&self, rel: T) -> Self {
        let big = self.c.iter().fold(T::zero(), |m, a| m.max(a.norm()));
        CPoly::new(self.c.iter().map(|a| if a.norm() <= rel * big { Cx::zero() } else { *a }).collect())
    }

    /// All roots with multiplicity, each certified by `backward_error <= tol_res`.
    pub fn roots(&self, opts: &RootOptions<T>) -> Result<Vec<Cx<T>>, NumericError> {
        let n = match self.degree() {
            None => return Err(NumericError::Degenerate("roots of the zero polynomial".into())),
            Some(n) => n,
        };
        let zeros = self.c.iter().take_while(|a| a.is_zero()).count();
        let reduced = CPoly::new(self.c[zeros..].to_vec());
        let mut roots = vec![Cx::zero(); zeros];
        if n > zeros {
            let simple = aberth(&reduced, opts)?;
            roots.extend(merge_multiple(&reduced, simple, opts));
        }
        Ok(roots)
    }
}

fn aberth<T: RealScalar>(p: &CPoly<T>, opts: &RootOptions<T>) -> Result<Vec<Cx<T>>, NumericError> {
    let n = p.degree().unwrap();
    let lead = p.c[n];
    if n == 1 {
        return Ok(vec![-p.c[0] / lead]);
    }
    // Initial circle at the geometric-mean root modulus.
    let radius = (p.c[0] / lead).norm().powf(T::one() / T::from_usize(n).unwrap()).max(T::lit(1e-3));
    let tau = T::lit(std::f64::consts::TAU);
    let mut z: Vec<Cx<T>> = (0..n)
        .map(|k| {
            let theta = tau * T::from_usize(k).unwrap() / T::from_usize(n).unwrap() + T::lit(0.4);
            Cx::from_polar(radius, theta)
        })
        .collect();
    let eps = T::epsilon();
    let mut done = vec![false; n];
    for _ in 0..opts.max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_deriv(z[i]);
            if v.is_zero() {
                done[i] = true;
                continue;
            }
            let ratio: Cx<T> = v / dv;
            let mut s: Cx<T> = Cx::zero();
            for j in 0..n {
                if j != i {
                    s = s + (z[i] - z[j]).inv();
                }
            }
            let w: Cx<T> = ratio / (Cx::<T>::one() - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                z[i] = z[i] + Cx::new(radius * T::lit(1e-3), radius * T::lit(1e-3));
                continue;
            }
            z[i] = z[i] - w;
            if w.norm() <= T::lit(4.0) * eps * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|d| *d) {
            break;
        }
    }
    let worst = z.iter().map(|r| p.backward_error(*r)).fold(T::zero(), |a, b| a.max(b));
    if worst > opts.tol_res {
        return Err(NumericError::ResidualTooLarge { residual: worst.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(z)
}

/// Replace each tight cluster of `m` approximate roots by one root of `p^(m-1)`, polished
/// by Newton and repeated `m` times, when that point is itself a certified root of `p`.
/// Clusters are gathered within `eps^(1/4)` (relative), which resolves multiplicities up to 4.
fn merge_multiple<T: RealScalar>(p: &CPoly<T>, z: Vec<Cx<T>>, opts: &RootOptions<T>) -> Vec<Cx<T>> {
    let radius = T::epsilon().powf(T::lit(0.25));
    let mut groups: Vec<Vec<Cx<T>>> = Vec::new();
    for r in z {
        let near = |g: &Vec<Cx<T>>| g.iter().any(|q| (*q - r).norm() <= radius * q.norm().max(T::one()));
        match groups.iter_mut().find(|g| near(g)) {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let m = g.len();
        if m == 1 {
            out.extend(g);
            continue;
        }
        let n = T::from_usize(m).unwrap();
        let mut c = g.iter().fold(Cx::<T>::zero(), |a, b| a + b) / n;
        let d = (1..m).fold(p.clone(), |q, _| q.derivative());
        for _ in 0..20 {
            let (v, dv) = d.eval_with_deriv(c);
            if dv.is_zero() {
                break;
            }
            let step = v / dv;
            c = c - step;
            if step.norm() <= T::epsilon() * c.norm() {
                break;
            }
        }
        if p.backward_error(c) <= opts.tol_res {
            out.extend(std::iter::repeat_n(c, m));
        } else {
            out.extend(g);
        }
    }
    out
}
