use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::curve::{FreeWord, Letter};

/// Permutation of sheets `0..d`; words act left to right, so `ρ(uv) = ρ(v) ∘ ρ(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// First `self`, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycles (including fixed points), each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut i = self.0[s];
            while i != s {
                seen[i] = true;
                c.push(i);
                i = self.0[i];
            }
            out.push(c);
        }
        out
    }

    /// Length of the cycle through `i`.
    pub fn orbit_len(&self, i: usize) -> usize {
        let mut k = 1;
        let mut j = self.0[i];
        while j != i {
            j = self.0[j];
            k += 1;
        }
        k
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<Vec<usize>> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let inner: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", inner.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Action of a word on sheets, given the generator permutations.
pub fn act_word(rho_x: &Perm, rho_y: &Perm, w: &FreeWord) -> Perm {
    let (xi, yi) = (rho_x.inverse(), rho_y.inverse());
    w.letters().iter().fold(Perm::identity(rho_x.len()), |acc, l| {
        let p = match l {
            Letter::X => rho_x,
            Letter::XInv => &xi,
            Letter::Y => rho_y,
            Letter::YInv => &yi,
        };
        acc.then(p)
    })
}

/// Stabilizer of the basepoint sheet: the domain of the virtual endomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupData {
    pub basepoint_sheet: usize,
    /// Orbit of the basepoint sheet, in discovery order.
    pub orbit: Vec<usize>,
    /// Shortest word carrying the basepoint sheet to each orbit sheet.
    pub transversal: BTreeMap<usize, FreeWord>,
    /// Nontrivial Reidemeister–Schreier generators.
    pub generators: Vec<FreeWord>,
    pub index: usize,
    #[serde(skip)]
    pub rho_x: Perm,
    #[serde(skip)]
    pub rho_y: Perm,
}

impl SubgroupData {
    pub fn contains(&self, w: &FreeWord) -> bool {
        act_word(&self.rho_x, &self.rho_y, w).apply(self.basepoint_sheet) == self.basepoint_sheet
    }

    /// Least `k >= 1` with `w^k` in the subgroup.
    pub fn minimal_power(&self, w: &FreeWord) -> usize {
        act_word(&self.rho_x, &self.rho_y, w).orbit_len(self.basepoint_sheet)
    }
}

pub fn hf_subgroup(rho_x: &Perm, rho_y: &Perm, basepoint_sheet: usize) -> SubgroupData {
    let gens = [Letter::X, Letter::Y, Letter::XInv, Letter::YInv];
    let mut transversal = BTreeMap::new();
    transversal.insert(basepoint_sheet, FreeWord::identity());
    let mut orbit = vec![basepoint_sheet];
    let mut queue = VecDeque::from([basepoint_sheet]);
    while let Some(i) = queue.pop_front() {
        for l in gens {
            let j = act_word(rho_x, rho_y, &FreeWord::letter(l)).apply(i);
            if !transversal.contains_key(&j) {
                let mut w = transversal[&i].clone();
                w.push(l);
                transversal.insert(j, w);
                orbit.push(j);
                queue.push_back(j);
            }
        }
    }
    let mut generators: Vec<FreeWord> = Vec::new();
    for &i in &orbit {
        for l in [Letter::X, Letter::Y] {
            let lw = FreeWord::letter(l);
            let j = act_word(rho_x, rho_y, &lw).apply(i);
            let g = transversal[&i].mul(&lw).mul(&transversal[&j].inverse());
            if !g.is_empty() && !generators.contains(&g) {
                generators.push(g);
            }
        }
    }
    SubgroupData {
        basepoint_sheet,
        index: orbit.len(),
        orbit,
        transversal,
        generators,
        rho_x: rho_x.clone(),
        rho_y: rho_y.clone(),
    }
}

/// Index in `F(x, y)` of the subgroup generated by `words`, by Stallings folding; `None` for infinite.
pub fn stallings_index(words: &[FreeWord]) -> Option<usize> {
    // Vertices with outgoing edges per generator (0 = x, 1 = y), folded with union-find.
    let mut parent: Vec<usize> = vec![0];
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for w in words {
        let mut v = 0;
        let n = w.len();
        for (k, l) in w.letters().iter().enumerate() {
            let u = if k + 1 == n {
                0
            } else {
                parent.push(parent.len());
                parent.len() - 1
            };
            let g = l.generator();
            if l.is_inverse() {
                edges.push((u, g, v));
            } else {
                edges.push((v, g, u));
            }
            v = u;
        }
    }
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    loop {
        let mut out: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut inc: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut merge = None;
        for &(a, g, b) in &edges {
            let (a, b) = (find(&mut parent, a), find(&mut parent, b));
            if let Some(&b2) = out.get(&(a, g)) {
                if b2 != b {
                    merge = Some((b, b2));
                    break;
                }
            }
            if let Some(&a2) = inc.get(&(b, g)) {
                if a2 != a {
                    merge = Some((a, a2));
                    break;
                }
            }
            out.insert((a, g), b);
            inc.insert((b, g), a);
        }
        match merge {
            Some((u, v)) => {
                let (u, v) = (find(&mut parent, u), find(&mut parent, v));
                parent[u.max(v)] = u.min(v);
            }
            None => {
                let verts: std::collections::BTreeSet<usize> =
                    (0..parent.len()).map(|i| find(&mut parent, i)).collect();
                let complete =
                    verts.iter().all(|&v| (0..2).all(|g| out.contains_key(&(v, g)) && inc.contains_key(&(v, g))));
                return complete.then_some(verts.len());
            }
        }
    }
}
