use serde::{Serialize, Serializer};

use super::orbifold::OrbifoldSignature;
use super::poly::{charpoly, Poly, Sturm};
use super::{LambdaError, LambdaMatrix};
use crate::scalar::FieldScalar;

/// Largest dimension handled by exact characteristic-polynomial isolation.
pub const EXACT_MAX_DIM: usize = 8;
/// Width the Collatz–Wielandt interval must reach to count as certified.
pub const CERTIFIED_WIDTH: f64 = 1e-9;
/// Bisection stops once the isolating interval is narrower than `2^-ISOLATION_BITS`.
pub const ISOLATION_BITS: u32 = 50;
/// Largest denominator tried when recognising a rational spectral radius.
pub const RATIONAL_SEARCH_DEN: i64 = 1000;
pub const DEFAULT_MAX_ITER: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sturm,
    CollatzWielandt,
}

/// Certified enclosure `lo <= ρ <= hi`, with the exact value when it was recognised.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralRadius<F: FieldScalar> {
    pub lo: F,
    pub hi: F,
    pub exact: Option<F>,
    pub method: Method,
    /// Approximate Perron eigenvector.
    pub witness: Vec<f64>,
    /// `false` when the iterative bounds stopped wider than `CERTIFIED_WIDTH`.
    pub converged: bool,
}

impl<F: FieldScalar> SpectralRadius<F> {
    pub fn approx(&self) -> f64 {
        match &self.exact {
            Some(e) => e.to_f64_lossy(),
            None => 0.5 * (self.lo.to_f64_lossy() + self.hi.to_f64_lossy()),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi.to_f64_lossy() - self.lo.to_f64_lossy()
    }
}

impl<F: FieldScalar> Serialize for SpectralRadius<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            lo: String,
            hi: String,
            exact: Option<String>,
            approx: f64,
            method: Method,
            converged: bool,
            witness: &'a [f64],
        }
        Repr {
            lo: self.lo.to_exact_string(),
            hi: self.hi.to_exact_string(),
            exact: self.exact.as_ref().map(F::to_exact_string),
            approx: self.approx(),
            method: self.method,
            converged: self.converged,
            witness: &self.witness,
        }
        .serialize(serializer)
    }
}

pub fn spectral_radius<F: FieldScalar>(m: &LambdaMatrix<F>) -> Result<SpectralRadius<F>, LambdaError> {
    spectral_radius_with(m, DEFAULT_MAX_ITER)
}

pub fn spectral_radius_with<F: FieldScalar>(
    m: &LambdaMatrix<F>,
    max_iter: usize,
) -> Result<SpectralRadius<F>, LambdaError> {
    if !m.is_square() {
        return Err(LambdaError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(SpectralRadius {
            lo: F::zero(),
            hi: F::zero(),
            exact: Some(F::zero()),
            method: Method::Sturm,
            witness: vec![],
            converged: true,
        });
    }
    if F::EXACT && n <= EXACT_MAX_DIM {
        Ok(sturm_radius(m))
    } else {
        Ok(collatz_wielandt(m, max_iter))
    }
}

fn sturm_radius<F: FieldScalar>(m: &LambdaMatrix<F>) -> SpectralRadius<F> {
    let p = charpoly(&m.entries);
    let sturm = Sturm::new(&p);
    let two = F::from_ratio(2, 1);
    let width = F::from_ratio(1, 1i64 << ISOLATION_BITS);
    let mut lo = F::zero();
    let mut hi = p.root_bound();
    let mut exact = None;
    if sturm.count(&lo, &hi) == 0 {
        // Perron–Frobenius: ρ is a nonnegative root, so none in (0, B] forces ρ = 0.
        exact = Some(F::zero());
        hi = F::zero();
    } else {
        while hi.clone() - lo.clone() > width {
            let mid = (lo.clone() + hi.clone()) / two.clone();
            let above = sturm.count(&mid, &hi);
            if above == 0 && p.eval(&mid).is_zero() {
                exact = Some(mid.clone());
                lo = mid.clone();
                hi = mid;
                break;
            }
            if above >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if exact.is_none() {
            exact = recognise_rational(&p, &sturm, &lo, &hi);
        }
    }
    if let Some(e) = &exact {
        lo = e.clone();
        hi = e.clone();
    }
    let a = m.to_f64();
    let witness = if hi.is_zero() { zero_column_witness(&a) } else { inverse_iteration(&a, hi.to_f64_lossy()) };
    SpectralRadius { lo, hi, exact, method: Method::Sturm, witness, converged: true }
}

/// Largest root of `p` equal to a small-denominator rational inside `(lo, hi]`, if any.
fn recognise_rational<F: FieldScalar>(p: &Poly<F>, sturm: &Sturm<F>, lo: &F, hi: &F) -> Option<F> {
    let approx = hi.to_f64_lossy();
    (1..=RATIONAL_SEARCH_DEN).find_map(|den| {
        let num = (approx * den as f64).round() as i64;
        let cand = F::from_ratio(num, den);
        let inside = cand > *lo && cand <= *hi;
        (inside && p.eval(&cand).is_zero() && sturm.count(&cand, hi) == 0).then_some(cand)
    })
}

/// A nonnegative matrix with `ρ = 0` is nilpotent, so some column vanishes and its basis
/// vector is an exact null vector.
fn zero_column_witness(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let j = (0..n).find(|&j| a.iter().all(|r| r[j] == 0.0)).unwrap_or(0);
    (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()
}

/// Eigenvector for the eigenvalue nearest `shift`, normalised so its largest entry is `+1`.
fn inverse_iteration(a: &[Vec<f64>], shift: f64) -> Vec<f64> {
    let n = a.len();
    let sigma = shift + 1e-14 * shift.abs().max(1.0);
    let mut shifted = a.to_vec();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] -= sigma;
    }
    let mut v = vec![1.0; n];
    for _ in 0..60 {
        v = match solve(&shifted, &v) {
            Some(x) => x,
            None => break,
        };
        normalise(&mut v);
    }
    v
}

fn normalise(v: &mut [f64]) {
    let (mut big, mut idx) = (0.0f64, 0);
    for (i, x) in v.iter().enumerate() {
        if x.abs() > big {
            big = x.abs();
            idx = i;
        }
    }
    if big > 0.0 && big.is_finite() {
        let s = v[idx];
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// Gaussian elimination with partial pivoting.
fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| r.iter().copied().chain([bi]).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Strongly connected components of the support graph (Tarjan, iterative).
fn strong_components(a: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = a.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| a[i][j] != 0.0).collect()).collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if *next == 0 && index[v] == usize::MAX {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*next) {
                *next += 1;
                if index[w] == usize::MAX {
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

/// ρ is the maximum over irreducible diagonal blocks; each block is bracketed by
/// Collatz–Wielandt ratios of a power-iterated positive vector.
fn collatz_wielandt<F: FieldScalar>(m: &LambdaMatrix<F>, max_iter: usize) -> SpectralRadius<F> {
    let a = m.to_f64();
    let blocks: Vec<(Vec<usize>, F, F, Vec<f64>)> = strong_components(&a)
        .into_iter()
        .map(|comp| {
            let (lo, hi, v) = block_bounds(m, &a, &comp, max_iter);
            (comp, lo, hi, v)
        })
        .collect();
    let lead = (0..blocks.len()).fold(0, |b, k| if blocks[k].1 > blocks[b].1 { k } else { b });
    let lo = blocks[lead].1.clone();
    let hi = blocks.iter().map(|b| b.2.clone()).fold(lo.clone(), |h, x| if x > h { x } else { h });
    let mut witness = vec![0.0; a.len()];
    for (k, &i) in blocks[lead].0.iter().enumerate() {
        witness[i] = blocks[lead].3[k];
    }
    let converged = hi.to_f64_lossy() - lo.to_f64_lossy() <= CERTIFIED_WIDTH;
    SpectralRadius { lo, hi, exact: None, method: Method::CollatzWielandt, witness, converged }
}

fn block_bounds<F: FieldScalar>(
    m: &LambdaMatrix<F>,
    a: &[Vec<f64>],
    comp: &[usize],
    max_iter: usize,
) -> (F, F, Vec<f64>) {
    let k = comp.len();
    let trivial = k == 1 && a[comp[0]][comp[0]] == 0.0;
    if trivial {
        return (F::zero(), F::zero(), vec![1.0]);
    }
    // Power iteration on A + I (primitive on an irreducible block).
    let mut v = vec![1.0; k];
    for it in 0..max_iter {
        let av = block_apply(a, comp, &v);
        let next: Vec<f64> = av.iter().zip(&v).map(|(x, y)| x + y).collect();
        let s = next.iter().cloned().fold(0.0, f64::max);
        v = next.iter().map(|x| (x / s).max(f64::MIN_POSITIVE)).collect();
        if it % 16 == 15 {
            let (lo, hi) = ratio_bounds_f64(&block_apply(a, comp, &v), &v);
            if hi - lo <= 0.25 * CERTIFIED_WIDTH {
                break;
            }
        }
    }
    if F::EXACT {
        let (lo, hi) = exact_ratio_bounds(m, comp, &v);
        (lo, hi, v)
    } else {
        let (lo, hi) = ratio_bounds_f64(&block_apply(a, comp, &v), &v);
        (F::from_f64_approx(lo), F::from_f64_approx(hi), v)
    }
}

fn block_apply(a: &[Vec<f64>], comp: &[usize], v: &[f64]) -> Vec<f64> {
    comp.iter().map(|&i| comp.iter().zip(v).map(|(&j, x)| a[i][j] * x).sum()).collect()
}

fn ratio_bounds_f64(av: &[f64], v: &[f64]) -> (f64, f64) {
    av.iter().zip(v).map(|(x, y)| x / y).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r), h.max(r)))
}

/// `min_i (Av)_i / v_i` and `max_i (Av)_i / v_i` evaluated in the field itself.
fn exact_ratio_bounds<F: FieldScalar>(m: &LambdaMatrix<F>, comp: &[usize], v: &[f64]) -> (F, F) {
    let vf: Vec<F> = v.iter().map(|&x| F::from_f64_approx(x)).collect();
    let mut lo: Option<F> = None;
    let mut hi: Option<F> = None;
    for &i in comp {
        let mut s = F::zero();
        for (&j, x) in comp.iter().zip(&vf) {
            s += m.entries[i][j].clone() * x.clone();
        }
        let k = comp.iter().position(|&c| c == i).unwrap();
        let r = s / vf[k].clone();
        if lo.as_ref().is_none_or(|l| r < *l) {
            lo = Some(r.clone());
        }
        if hi.as_ref().is_none_or(|h| r > *h) {
            hi = Some(r);
        }
    }
    (lo.unwrap(), hi.unwrap())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Unobstructed {
        rho: f64,
    },
    /// ρ ≥ 1 on the supplied invariant multicurve; `witness` approximates the Perron vector.
    Obstructed {
        rho: f64,
        witness: Vec<f64>,
    },
}

/// Thurston's criterion on an invariant multicurve; refuses non-hyperbolic orbifolds.
pub fn thurston_verdict<F: FieldScalar>(
    m: &LambdaMatrix<F>,
    orbifold: &OrbifoldSignature,
) -> Result<Verdict, LambdaError> {
    if !orbifold.is_hyperbolic() {
        return Err(LambdaError::EuclideanOrbifold { euler: orbifold.euler_string() });
    }
    let sr = spectral_radius(m)?;
    let rho = sr.approx();
    let obstructed = if F::EXACT && m.nrows() <= EXACT_MAX_DIM {
        let p = charpoly(&m.entries);
        let one = F::one();
        p.eval(&one).is_zero() || Sturm::new(&p).count(&one, &p.root_bound()) > 0
    } else if sr.lo >= F::one() {
        true
    } else if sr.hi < F::one() {
        false
    } else {
        return Err(LambdaError::Undecided { lo: sr.lo.to_f64_lossy(), hi: sr.hi.to_f64_lossy() });
    };
    Ok(if obstructed { Verdict::Obstructed { rho, witness: sr.witness } } else { Verdict::Unobstructed { rho } })
}
