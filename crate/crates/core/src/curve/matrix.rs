use std::fmt;

use serde::Serialize;

use super::{CurveError, FreeWord, Letter, Slope};
use crate::scalar::IntScalar;

/// Element of Γ(2) taken up to sign: `ad - bc = 1`, `a, d` odd, `b, c` even.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistMatrix<I: IntScalar> {
    pub a: I,
    pub b: I,
    pub c: I,
    pub d: I,
}

/// Outcome of [`classify_parabolic`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Parabolic<I: IntScalar> {
    Identity,
    Twist {
        slope: Slope<I>,
        power: I,
    },
    /// `|trace| > 2`: a pseudo-Anosov class.
    NonParabolic {
        trace: I,
    },
}

impl<I: IntScalar> TwistMatrix<I> {
    pub fn new(a: I, b: I, c: I, d: I) -> Result<Self, CurveError> {
        let m = TwistMatrix { a, b, c, d };
        if !m.det().is_one() || !m.a.is_odd_int() || !m.d.is_odd_int() || m.b.is_odd_int() || m.c.is_odd_int() {
            return Err(CurveError::NotInGammaTwo);
        }
        Ok(m)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self, CurveError> {
        Self::new(I::int(a), I::int(b), I::int(c), I::int(d))
    }

    pub fn identity() -> Self {
        TwistMatrix { a: I::one(), b: I::zero(), c: I::zero(), d: I::one() }
    }

    /// Image of `x`: `[[1,2],[0,1]]`.
    pub fn gen_x() -> Self {
        TwistMatrix { a: I::one(), b: I::int(2), c: I::zero(), d: I::one() }
    }

    /// Image of `y`: `[[1,0],[-2,1]]`.
    pub fn gen_y() -> Self {
        TwistMatrix { a: I::one(), b: I::zero(), c: I::int(-2), d: I::one() }
    }

    pub fn det(&self) -> I {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn trace(&self) -> I {
        self.a.clone() + self.d.clone()
    }

    pub fn mul(&self, o: &Self) -> Self {
        TwistMatrix {
            a: self.a.clone() * o.a.clone() + self.b.clone() * o.c.clone(),
            b: self.a.clone() * o.b.clone() + self.b.clone() * o.d.clone(),
            c: self.c.clone() * o.a.clone() + self.d.clone() * o.c.clone(),
            d: self.c.clone() * o.b.clone() + self.d.clone() * o.d.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        TwistMatrix { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() }
    }

    pub fn neg(&self) -> Self {
        TwistMatrix { a: -self.a.clone(), b: -self.b.clone(), c: -self.c.clone(), d: -self.d.clone() }
    }

    /// Equality in `PSL`, i.e. modulo `±I`.
    pub fn eq_mod_sign(&self, o: &Self) -> bool {
        self == o || *self == o.neg()
    }

    pub fn is_identity_mod_sign(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Möbius action on the homogeneous pair `(p, q)`.
    pub fn apply(&self, p: &I, q: &I) -> (I, I) {
        (
            self.a.clone() * p.clone() + self.b.clone() * q.clone(),
            self.c.clone() * p.clone() + self.d.clone() * q.clone(),
        )
    }
}

impl<I: IntScalar> fmt::Display for TwistMatrix<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

fn letter_matrix<I: IntScalar>(l: Letter) -> TwistMatrix<I> {
    match l {
        Letter::X => TwistMatrix::gen_x(),
        Letter::XInv => TwistMatrix::gen_x().inverse(),
        Letter::Y => TwistMatrix::gen_y(),
        Letter::YInv => TwistMatrix::gen_y().inverse(),
    }
}

/// Power-`k` twist about `s`: `[[1-2kpq, 2kp²], [-2kq², 1+2kpq]]`.
pub fn twist_matrix<I: IntScalar>(s: &Slope<I>, k: &I) -> Result<TwistMatrix<I>, CurveError> {
    let (p, q) = s.pq()?;
    if k.is_zero() {
        return Err(CurveError::ZeroPower);
    }
    let two_k = k.clone() * I::int(2);
    let pq = p.clone() * q.clone();
    Ok(TwistMatrix {
        a: I::one() - two_k.clone() * pq.clone(),
        b: two_k.clone() * p.clone() * p.clone(),
        c: -(two_k.clone() * q.clone() * q.clone()),
        d: I::one() + two_k * pq,
    })
}

pub fn matrix_of_word<I: IntScalar>(w: &FreeWord) -> TwistMatrix<I> {
    w.letters().iter().fold(TwistMatrix::identity(), |acc, &l| acc.mul(&letter_matrix(l)))
}

/// Solve the Γ(2) word problem by Euclidean reduction of the first column.
pub fn word_of_matrix<I: IntScalar>(m: &TwistMatrix<I>) -> Result<FreeWord, CurveError> {
    let checked = TwistMatrix::new(m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone())?;
    let mut cur = checked;
    // Left multipliers applied so far, in application order.
    let mut applied: Vec<(Letter, I)> = Vec::new();
    loop {
        if cur.c.is_zero() {
            break;
        }
        if cur.a.abs() > cur.c.abs() {
            // x^-n: a -> a - 2nc
            let n = nearest_even_step(&cur.a, &cur.c);
            cur = power_matrix(Letter::X, &(-n.clone())).mul(&cur);
            applied.push((Letter::X, -n));
        } else {
            // y^n: c -> c - 2na
            let n = nearest_even_step(&cur.c, &cur.a);
            cur = power_matrix(Letter::Y, &n).mul(&cur);
            applied.push((Letter::Y, n));
        }
    }
    // cur = ±[[1, b], [0, 1]] = ±x^(b/2) with sign normalized.
    let sign_fix = if cur.a.is_negative() { cur.neg() } else { cur };
    let k = sign_fix.b.clone() / I::int(2);
    let mut word = FreeWord::identity();
    for (l, n) in applied.iter() {
        word.append(&power_word(*l, &(-n.clone())));
    }
    word.append(&power_word(Letter::X, &k));
    Ok(word)
}

/// Integer `n` minimizing `|num - 2 n den|` (`den != 0`).
fn nearest_even_step<I: IntScalar>(num: &I, den: &I) -> I {
    let (mut num, mut den2) = (num.clone(), den.clone() * I::int(2));
    if den2.is_negative() {
        num = -num;
        den2 = -den2;
    }
    let two = I::int(2);
    (num * two.clone() + den2.clone()).div_floor(&(den2 * two))
}

fn power_matrix<I: IntScalar>(l: Letter, n: &I) -> TwistMatrix<I> {
    let two_n = n.clone() * I::int(2);
    match l {
        Letter::X => TwistMatrix { a: I::one(), b: two_n, c: I::zero(), d: I::one() },
        Letter::Y => TwistMatrix { a: I::one(), b: I::zero(), c: -two_n, d: I::one() },
        _ => unreachable!(),
    }
}

fn power_word<I: IntScalar>(l: Letter, n: &I) -> FreeWord {
    let count = n.abs().to_u64().expect("exponent fits in u64");
    let letter = if n.is_negative() { l.inverse() } else { l };
    FreeWord::from_letters(std::iter::repeat_n(letter, count as usize))
}

/// Classify a Γ(2) element as identity, a twist power, or pseudo-Anosov.
pub fn classify_parabolic<I: IntScalar>(m: &TwistMatrix<I>) -> Parabolic<I> {
    if m.is_identity_mod_sign() {
        return Parabolic::Identity;
    }
    let tr = m.trace();
    let two = I::int(2);
    if tr.abs() != two {
        return Parabolic::NonParabolic { trace: tr };
    }
    let m = if tr.is_negative() { m.neg() } else { m.clone() };
    // m = I + 2k (p,q)(-q,p)^T  =>  b = 2kp², c = -2kq², d - a = 4kpq.
    let hb = m.b.clone() / two.clone();
    let hc = -(m.c.clone() / two);
    let mut k = hb.gcd(&hc);
    if hb.is_negative() || (hb.is_zero() && hc.is_negative()) {
        k = -k;
    }
    let p2 = hb / k.clone();
    let q2 = hc / k.clone();
    let p = isqrt(&p2);
    let mut q = isqrt(&q2);
    let dma = m.d.clone() - m.a.clone();
    if (dma / k.clone()).is_negative() {
        q = -q;
    }
    let slope = Slope::new(p, q).expect("parabolic has a nonzero fixed vector");
    Parabolic::Twist { slope, power: k }
}

fn isqrt<I: IntScalar>(n: &I) -> I {
    let approx = n.to_f64().expect("finite").sqrt().round();
    let mut r = I::from_f64(approx).unwrap_or_else(I::zero);
    while r.clone() * r.clone() > *n {
        r = r - I::one();
    }
    while (r.clone() + I::one()) * (r.clone() + I::one()) <= *n {
        r = r + I::one();
    }
    r
}

/// Mapping-class action on slopes: `(p, q) -> (ap + bq, cp + dq)`.
pub fn act<I: IntScalar>(w: &FreeWord, s: &Slope<I>) -> Result<Slope<I>, CurveError> {
    act_matrix(&matrix_of_word(w), s)
}

pub fn act_matrix<I: IntScalar>(m: &TwistMatrix<I>, s: &Slope<I>) -> Result<Slope<I>, CurveError> {
    let (p, q) = s.pq()?;
    let (p2, q2) = m.apply(p, q);
    Slope::new(p2, q2)
}

/// A Γ(2) element carrying the base slope of `s`'s parity class to `s`.
pub fn normalizer<I: IntScalar>(s: &Slope<I>) -> Result<TwistMatrix<I>, CurveError> {
    let (p, q) = s.pq()?;
    let parity = s.parity()?;
    // Base columns: E0 -> (1,0), E1 -> (0,1), EInf -> (1,1).
    match parity {
        super::ParityClass::E0 => {
            // columns (p, q) and (b, d): p d - b q = 1 with b even, d odd.
            let (b, d) = complete_column(p, q)?;
            TwistMatrix::new(p.clone(), b, q.clone(), d)
        }
        super::ParityClass::E1 => {
            // second column (p, q); first column (a, c) with a q - p c = 1.
            let (c, a) = complete_column(q, p)?;
            TwistMatrix::new(a, p.clone(), c, q.clone())
        }
        super::ParityClass::EInf => {
            let (a, c) = solve_einf(p, q)?;
            let b = p.clone() - a.clone();
            let d = q.clone() - c.clone();
            TwistMatrix::new(a, b, c, d)
        }
    }
}

/// Find `(b, d)` with `p d - b q = 1`, `b` even, `d` odd (p odd, q even).
fn complete_column<I: IntScalar>(p: &I, q: &I) -> Result<(I, I), CurveError> {
    let e = p.extended_gcd(q);
    // e.x p + e.y q = 1 => d = x, b = -y.
    let (mut b, mut d) = (-e.y, e.x);
    if e.gcd.is_negative() {
        b = -b;
        d = -d;
    }
    if b.is_odd_int() {
        // shift by the solution family (b + p, d + q); p odd flips parity of b.
        b = b + p.clone();
        d = d + q.clone();
    }
    if b.is_odd_int() || !d.is_odd_int() {
        return Err(CurveError::NotInGammaTwo);
    }
    Ok((b, d))
}

/// Find first column `(a, c)` with `a` odd, `c` even and `a q - c p = 1`
/// (then the second column `(p - a, q - c)` gives `M(1,1) = (p,q)`).
fn solve_einf<I: IntScalar>(p: &I, q: &I) -> Result<(I, I), CurveError> {
    let e = q.extended_gcd(p);
    // x q + y p = 1 => a = x, c = -y.
    let (mut a, mut c) = (e.x, -e.y);
    if e.gcd.is_negative() {
        a = -a;
        c = -c;
    }
    if !a.is_odd_int() {
        a = a + p.clone();
        c = c + q.clone();
    }
    if !a.is_odd_int() || c.is_odd_int() {
        return Err(CurveError::NotInGammaTwo);
    }
    Ok((a, c))
}
