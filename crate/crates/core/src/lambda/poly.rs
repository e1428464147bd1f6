//! Dense univariate polynomials over an exact field; characteristic polynomials and Sturm chains.

use crate::scalar::FieldScalar;

/// Coefficients low degree first; no trailing zeros (zero polynomial is empty).
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F: FieldScalar> {
    coeffs: Vec<F>,
}

impl<F: FieldScalar> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.clone() * F::from_ratio(i as i64, 1)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    /// Remainder of Euclidean division by a nonzero `d`.
    pub fn rem(&self, d: &Poly<F>) -> Poly<F> {
        self.div_rem(d).1
    }

    /// Quotient and remainder of Euclidean division by a nonzero `d`.
    pub fn div_rem(&self, d: &Poly<F>) -> (Poly<F>, Poly<F>) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        let mut q = vec![F::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let c = r[top].clone() / lead.clone();
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[top - dd + i] -= c.clone() * dc.clone();
            }
            q[top - dd] = c;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    /// Cauchy bound: every root has modulus `< 1 + max |a_i / a_n|`.
    pub fn root_bound(&self) -> F {
        let n = self.degree().unwrap_or(0);
        let lead = self.coeffs.last().cloned().unwrap_or_else(F::one);
        let mut m = F::zero();
        for c in &self.coeffs[..n] {
            let r = (c.clone() / lead.clone()).abs();
            if r > m {
                m = r;
            }
        }
        m + F::one()
    }
}

/// `det(xI - A)` by Faddeev–LeVerrier; exact over rational fields.
pub fn charpoly<F: FieldScalar>(a: &[Vec<F>]) -> Poly<F> {
    let n = a.len();
    let mut coeffs = vec![F::zero(); n + 1];
    coeffs[n] = F::one();
    let mut m = vec![vec![F::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1].clone();
        }
        m = next;
        let am = matmul(a, &m);
        let mut tr = F::zero();
        for (i, row) in am.iter().enumerate() {
            tr += row[i].clone();
        }
        coeffs[n - k] = -tr / F::from_ratio(k as i64, 1);
    }
    Poly::new(coeffs)
}

fn matmul<F: FieldScalar>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = a.len();
    let mut out = vec![vec![F::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k].clone() * b[k][j].clone();
            }
        }
    }
    out
}

/// Signed remainder sequence `p, p', -rem(p, p'), ...`.
pub struct Sturm<F: FieldScalar> {
    chain: Vec<Poly<F>>,
}

impl<F: FieldScalar> Sturm<F> {
    pub fn new(p: &Poly<F>) -> Self {
        let mut chain = vec![p.clone()];
        let mut cur = p.derivative();
        while !cur.is_zero() {
            let next = chain.last().unwrap().rem(&cur).neg();
            chain.push(cur);
            cur = next;
        }
        // Dividing through by the gcd (the last term) keeps the counts right at multiple roots.
        let gcd = chain.last().unwrap().clone();
        if gcd.degree().is_some_and(|d| d > 0) {
            chain = chain.iter().map(|p| p.div_rem(&gcd).0).collect();
        }
        Sturm { chain }
    }

    pub fn poly(&self) -> &Poly<F> {
        &self.chain[0]
    }

    fn sign_changes(&self, x: &F) -> usize {
        let mut last: Option<bool> = None;
        let mut changes = 0;
        for p in &self.chain {
            let v = p.eval(x);
            if v.is_zero() {
                continue;
            }
            let pos = v.is_positive();
            if last.is_some_and(|l| l != pos) {
                changes += 1;
            }
            last = Some(pos);
        }
        changes
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &F, b: &F) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }
}
