use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::star::{CutStar, PunctureKind};
use super::subgroup::Perm;
use super::table::MonodromyTable;
use super::MonodromyError;
use crate::correspondence::{End, GMapModel};
use crate::curve::FreeWord;

type C64 = Complex64;

/// A peripheral generator of `π1(W)`: the loop crossing arc `.0` of the full star, to the power `.1`.
pub type PLetter = (usize, i8);

/// Freely reduced word over the peripheral generators of `W`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PWord(pub Vec<PLetter>);

impl PWord {
    pub fn from_crossings(c: &[(usize, i8)]) -> Self {
        let mut w = PWord::default();
        for l in c {
            w.push(*l);
        }
        w
    }

    pub fn push(&mut self, l: PLetter) {
        if self.0.last() == Some(&(l.0, -l.1)) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn mul(&self, o: &PWord) -> PWord {
        let mut w = self.clone();
        for l in &o.0 {
            w.push(*l);
        }
        w
    }

    pub fn inverse(&self) -> PWord {
        PWord(self.0.iter().rev().map(|(a, s)| (*a, -*s)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn cyclic(&self) -> Vec<PLetter> {
        let mut v = self.0.clone();
        while v.len() > 1 && v[0] == (v[v.len() - 1].0, -v[v.len() - 1].1) {
            v.remove(0);
            v.pop();
        }
        v
    }
}

impl fmt::Display for PWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> =
            self.0.iter().map(|(a, s)| if *s > 0 { format!("g{a}") } else { format!("g{a}^-1") }).collect();
        write!(f, "{}", s.join("·"))
    }
}

impl Serialize for PWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Lifts of `x` and `y` from each sheet: target sheet and restriction word.
#[derive(Clone, Debug, Serialize)]
pub struct WreathRecursion {
    /// Labels of the peripheral generators `g0, g1, ...` (punctures of `W`, by arc).
    pub generators: Vec<String>,
    pub targets: [Vec<usize>; 2],
    pub restrictions: [Vec<PWord>; 2],
    /// `X_*` images of the restrictions.
    pub projected: [Vec<FreeWord>; 2],
    /// Crossing words of the paths from the loop basepoint to each sheet's base point.
    #[serde(skip)]
    pub connectors: Vec<PWord>,
}

/// Signed crossings of a path in `W` with the full star, as a word.
pub fn path_word(star: &CutStar, path: &[C64]) -> Result<PWord, MonodromyError> {
    Ok(PWord::from_crossings(&star.crossings(path)?))
}

/// Word of a path from the loop basepoint to `p`: straight if unambiguous, else bent.
fn connector_word(table: &MonodromyTable, p: C64) -> Result<PWord, MonodromyError> {
    let b = table.base;
    let mut last = None;
    for h in [0.0, 0.3, -0.3, 0.6, -0.6] {
        let mid = (b + p) * 0.5 + C64::i() * (p - b) * h;
        let path = if h == 0.0 { vec![b, p] } else { vec![b, mid, p] };
        match path_word(&table.star, &path) {
            Ok(w) => return Ok(w),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("tried at least once"))
}

pub fn wreath_recursion(table: &MonodromyTable) -> Result<WreathRecursion, MonodromyError> {
    let mut connectors: Vec<PWord> =
        table.base_fiber.iter().map(|p| connector_word(table, *p)).collect::<Result<_, _>>()?;
    if let Some(path) = &table.base_connector {
        connectors[table.basepoint_sheet] = path_word(&table.star, path)?;
    }
    let mut targets = [Vec::new(), Vec::new()];
    let mut restrictions = [Vec::new(), Vec::new()];
    let mut projected = [Vec::new(), Vec::new()];
    for t in 0..2 {
        let rho = if t == 0 { &table.rho_x } else { &table.rho_y };
        for i in 0..table.degree() {
            let j = rho.apply(i);
            let w = connectors[i].mul(&path_word(&table.star, &table.lifts[t][i])?).mul(&connectors[j].inverse());
            projected[t].push(x_star_project(table, &w)?);
            restrictions[t].push(w);
            targets[t].push(j);
        }
    }
    Ok(WreathRecursion {
        generators: table.star.arcs.iter().map(|a| a.puncture.label()).collect(),
        targets,
        restrictions,
        projected,
        connectors,
    })
}

/// Image under the inclusion `W ⊂ M`: loops at shared ends become `x, y, z`, others vanish.
pub fn x_star_project(table: &MonodromyTable, w: &PWord) -> Result<FreeWord, MonodromyError> {
    let mut out = FreeWord::identity();
    for &(a, s) in &w.0 {
        let arc = table.star.arcs.get(a).ok_or_else(|| MonodromyError::UnknownGenerator(format!("g{a}")))?;
        let g = match arc.puncture.kind {
            PunctureKind::Extra(_) => continue,
            PunctureKind::End(e) => generator_word(table, e),
        };
        out.append(&if s > 0 { g } else { g.inverse() });
    }
    Ok(out)
}

fn generator_word(table: &MonodromyTable, e: End) -> FreeWord {
    match table.generator_ends.iter().position(|x| *x == e) {
        Some(0) => FreeWord::x(),
        Some(1) => FreeWord::y(),
        _ => FreeWord::z(),
    }
}

/// A cycle of `ρ_t` and the puncture its lifted loop encircles.
#[derive(Clone, Debug, Serialize)]
pub struct CycleProduct {
    pub generator: char,
    pub cycle: Vec<usize>,
    pub product: PWord,
    /// Arc index of the encircled puncture and the winding power.
    pub puncture: Option<(usize, i64)>,
}

impl WreathRecursion {
    /// Restriction of `w` at `sheet` (composed along the sheets it visits) and the sheet it ends on.
    pub fn restrict(&self, w: &FreeWord, sheet: usize) -> (PWord, usize) {
        let mut out = PWord::default();
        let mut i = sheet;
        for l in w.letters() {
            let t = l.generator();
            if l.is_inverse() {
                let j = self.targets[t].iter().position(|&k| k == i).expect("targets form a permutation");
                out = out.mul(&self.restrictions[t][j].inverse());
                i = j;
            } else {
                out = out.mul(&self.restrictions[t][i]);
                i = self.targets[t][i];
            }
        }
        (out, i)
    }

    /// Products of restrictions along every cycle of `ρ_x` and `ρ_y`.
    pub fn cycle_products(&self, star: &CutStar) -> Vec<CycleProduct> {
        let mut out = Vec::new();
        for t in 0..2 {
            let perm = Perm(self.targets[t].clone());
            for cycle in perm.cycles() {
                let product = cycle.iter().fold(PWord::default(), |acc, &i| acc.mul(&self.restrictions[t][i]));
                let puncture = peripheral(star, &product);
                out.push(CycleProduct { generator: if t == 0 { 'x' } else { 'y' }, cycle, product, puncture });
            }
        }
        out
    }

    /// Every cycle product encircles one puncture over the generator's end, once, with the
    /// local degree of `g` there equal to the cycle length, and distinct cycles give distinct punctures.
    pub fn check_cycle_invariant(&self, model: &GMapModel, table: &MonodromyTable) -> Result<(), String> {
        let products = self.cycle_products(&table.star);
        for t in 0..2 {
            let end = table.generator_ends[t];
            let mut seen = Vec::new();
            let mut total = 0;
            for cp in products.iter().filter(|c| c.generator == if t == 0 { 'x' } else { 'y' }) {
                let Some((arc, k)) = cp.puncture else {
                    return Err(format!(
                        "cycle {:?} of {} gives non-peripheral {}",
                        cp.cycle, cp.generator, cp.product
                    ));
                };
                if k != 1 {
                    return Err(format!("cycle {:?} winds {k} times", cp.cycle));
                }
                let q = &table.star.arcs[arc].puncture.point;
                let image = model.g.eval(q);
                if End::near(&image, model.tol_sep) != Some(end) {
                    return Err(format!("cycle {:?} encircles a point not over {}", cp.cycle, end.label()));
                }
                let deg = model.g.local_degree(q, model.tol_sep).map_err(|e| e.to_string())?;
                if deg != cp.cycle.len() {
                    return Err(format!("cycle {:?} has local degree {deg}", cp.cycle));
                }
                if seen.contains(&arc) {
                    return Err(format!("puncture g{arc} encircled twice"));
                }
                seen.push(arc);
                total += cp.cycle.len();
            }
            if total != table.degree() {
                return Err("cycle lengths do not sum to the degree".into());
            }
        }
        Ok(())
    }
}

/// Normal form in `π1(W)`: the last generator is eliminated through the relator, then reduced.
pub fn normal_form(star: &CutStar, w: &PWord) -> PWord {
    let Some(last) = star.arcs.len().checked_sub(1) else { return PWord::default() };
    // The ccw relator reads g0^-1 ... g(n-1)^-1, so g(n-1) = g0^-1 ... g(n-2)^-1.
    let elim = PWord((0..last).map(|a| (a, -1)).collect());
    let mut sub = PWord::default();
    for &(a, s) in &w.0 {
        if a == last {
            sub = sub.mul(&if s > 0 { elim.clone() } else { elim.inverse() });
        } else {
            sub.push((a, s));
        }
    }
    sub
}

/// If `w` is conjugate in `π1(W)` to a power of one peripheral generator, that generator and power.
pub fn peripheral(star: &CutStar, w: &PWord) -> Option<(usize, i64)> {
    let n = star.arcs.len();
    if n == 0 {
        return None;
    }
    let last = n - 1;
    let elim: Vec<PLetter> = (0..last).map(|a| (a, -1)).collect();
    let sub = normal_form(star, w);
    let c = sub.cyclic();
    if c.is_empty() {
        return None;
    }
    if c.iter().all(|l| *l == c[0]) {
        return Some((c[0].0, c.len() as i64 * c[0].1 as i64));
    }
    // Powers of the eliminated generator: rotations of elim^k.
    let m = elim.len();
    if m == 0 || !c.len().is_multiple_of(m) {
        return None;
    }
    let k = c.len() / m;
    for sign in [1i64, -1] {
        let base: Vec<PLetter> = if sign > 0 { elim.clone() } else { PWord(elim.clone()).inverse().0 };
        let target: Vec<PLetter> = base.iter().cycle().take(c.len()).copied().collect();
        for r in 0..c.len() {
            if (0..c.len()).all(|i| c[(i + r) % c.len()] == target[i]) {
                return Some((last, sign * k as i64));
            }
        }
    }
    None
}

/// Table and recursion, re-perturbing the star on ambiguous crossings (seeds `seed, seed + 1, ...`).
pub fn build_recursion(model: &GMapModel, seed: u64) -> Result<(MonodromyTable, WreathRecursion), MonodromyError> {
    const RETRIES: u64 = 6;
    let mut last = None;
    for s in seed..seed + RETRIES {
        let table = super::table::monodromy_table(model, s)?;
        match wreath_recursion(&table) {
            Ok(w) => return Ok((table, w)),
            Err(e @ MonodromyError::CrossingAmbiguous(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}
