use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{SlopeError, SlopeMap, SlopePullbackResult};
use crate::correspondence::{GMapModel, ModelKind};
use crate::curve::{
    classify_parabolic, matrix_of_word, normalizer, twist_matrix, word_of_matrix, FreeWord, Letter, Parabolic,
};
use crate::monodromy::{build_recursion, hf_subgroup, stallings_index, MonodromyTable, SubgroupData, WreathRecursion};
use crate::Slope;

/// `φ = X_* ∘ (Y_*)^-1` on the stabilizer of the basepoint sheet.
#[derive(Clone, Debug)]
pub struct VirtualEndo {
    pub table: MonodromyTable,
    pub recursion: WreathRecursion,
    pub subgroup: SubgroupData,
    /// `X` is constant, so `X_*` kills everything.
    pub constant: bool,
    /// Images of the Schreier generators of the domain.
    pub generator_images: Vec<FreeWord>,
    /// Per letter (`x, y, X, Y`) and sheet: next sheet and projected restriction.
    steps: [Vec<(usize, FreeWord)>; 4],
}

fn letter_index(l: Letter) -> usize {
    l.generator() + if l.is_inverse() { 2 } else { 0 }
}

/// Positive primitive twist about `s`, as a word.
pub fn twist_word(s: &Slope) -> Result<FreeWord, SlopeError> {
    Ok(word_of_matrix(&twist_matrix(s, &BigInt::one())?)?)
}

impl VirtualEndo {
    pub fn new(model: &GMapModel, seed: u64) -> Result<Self, SlopeError> {
        let (table, recursion) = build_recursion(model, seed)?;
        let subgroup = hf_subgroup(&table.rho_x, &table.rho_y, table.basepoint_sheet);
        let constant = matches!(model.kind, ModelKind::XConstant { .. });
        let d = table.degree();
        let mut steps: [Vec<(usize, FreeWord)>; 4] = Default::default();
        for t in 0..2 {
            for i in 0..d {
                let j = recursion.targets[t][i];
                let w = if constant { FreeWord::identity() } else { recursion.projected[t][i].clone() };
                steps[t].push((j, w));
            }
            let mut inv = vec![(0, FreeWord::identity()); d];
            for (i, (j, w)) in steps[t].iter().enumerate() {
                inv[*j] = (i, w.inverse());
            }
            steps[t + 2] = inv;
        }
        let mut ve = VirtualEndo { table, recursion, subgroup, constant, generator_images: Vec::new(), steps };
        ve.generator_images = ve.subgroup.generators.iter().map(|g| ve.phi_eval(g)).collect::<Result<_, _>>()?;
        Ok(ve)
    }

    pub fn degree(&self) -> usize {
        self.table.degree()
    }

    pub fn basepoint_sheet(&self) -> usize {
        self.table.basepoint_sheet
    }

    pub fn contains(&self, w: &FreeWord) -> bool {
        self.subgroup.contains(w)
    }

    /// Walk `w` from `sheet`: final sheet and the projected restriction.
    pub fn walk(&self, w: &FreeWord, sheet: usize) -> (usize, FreeWord) {
        let mut out = FreeWord::identity();
        let mut i = sheet;
        for l in w.letters() {
            let (j, r) = &self.steps[letter_index(*l)][i];
            out.append(r);
            i = *j;
        }
        (i, out)
    }

    /// One letter of the walk; used by incremental searches.
    pub fn step(&self, l: Letter, sheet: usize) -> (usize, &FreeWord) {
        let (j, r) = &self.steps[letter_index(l)][sheet];
        (*j, r)
    }

    pub fn phi_eval(&self, w: &FreeWord) -> Result<FreeWord, SlopeError> {
        let bs = self.basepoint_sheet();
        let (end, img) = self.walk(w, bs);
        if end != bs {
            return Err(SlopeError::NotInDomain { word: w.clone(), k: self.subgroup.minimal_power(w) });
        }
        Ok(img)
    }

    /// `w · t^-1` with `t` the transversal word of the sheet `w` reaches: an element of the domain.
    pub fn into_domain(&self, w: &FreeWord) -> FreeWord {
        let j = self.table.act(w).apply(self.basepoint_sheet());
        w.mul(&self.subgroup.transversal[&j].inverse())
    }

    pub fn slope_pullback(&self, s: &Slope) -> Result<SlopePullbackResult, SlopeError> {
        if s.is_trivial() {
            return Err(SlopeError::TrivialSource);
        }
        let t = twist_word(s)?;
        let k = self.subgroup.minimal_power(&t);
        let img = self.phi_eval(&t.pow(k as i64))?;
        classify_image(s, k, &img)
    }

    /// Index of `φ(H_f)` in `F2`; `None` when infinite.
    pub fn surjectivity_check(&self) -> Option<usize> {
        stallings_index(&self.generator_images)
    }

    /// Empirical contraction ratio; see [`contraction_ratio_of`].
    pub fn contraction_ratio_estimate(&self, samples: usize, depth: usize, seed: u64) -> f64 {
        contraction_ratio_of(
            |w| self.phi_eval(&self.into_domain(w)).expect("into_domain lands in the domain"),
            samples,
            depth,
            seed,
        )
    }

    /// Preimages of `x` and `y` in the domain, by Nielsen reduction of the generator images.
    pub fn section(&self) -> Result<NielsenSection, SlopeError> {
        if self.surjectivity_check() != Some(1) {
            return Err(SlopeError::NoSection("φ is not surjective".into()));
        }
        let mut pairs: Vec<(FreeWord, FreeWord)> = self
            .generator_images
            .iter()
            .cloned()
            .zip(self.subgroup.generators.iter().cloned())
            .filter(|(img, _)| !img.is_empty())
            .collect();
        loop {
            let mut changed = false;
            'outer: for i in 0..pairs.len() {
                for j in 0..pairs.len() {
                    if i == j {
                        continue;
                    }
                    for inv in [false, true] {
                        let (uj, pj) = if inv {
                            (pairs[j].0.inverse(), pairs[j].1.inverse())
                        } else {
                            (pairs[j].0.clone(), pairs[j].1.clone())
                        };
                        for left in [false, true] {
                            let (u, p) = if left {
                                (uj.mul(&pairs[i].0), pj.mul(&pairs[i].1))
                            } else {
                                (pairs[i].0.mul(&uj), pairs[i].1.mul(&pj))
                            };
                            if u.len() < pairs[i].0.len() {
                                pairs[i] = (u, p);
                                changed = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }
            pairs.retain(|(u, _)| !u.is_empty());
            if !changed {
                break;
            }
        }
        let find = |target: &FreeWord| {
            pairs.iter().find_map(|(u, p)| {
                if u == target {
                    Some(p.clone())
                } else if u.inverse() == *target {
                    Some(p.inverse())
                } else {
                    None
                }
            })
        };
        match (find(&FreeWord::x()), find(&FreeWord::y())) {
            (Some(x_pre), Some(y_pre)) => Ok(NielsenSection { x_pre, y_pre }),
            _ => Err(SlopeError::NoSection("Nielsen reduction did not reach {x, y}".into())),
        }
    }

    /// Twist `T` and conjugator `g` with `φ(g^-1 T g) = T`, the orbit `C_0, ..., C_n` of the
    /// core curves of `T^{w_i}`, `w_i = g σ(g) ... σ^{i-1}(g)`, and its certificate.
    pub fn section_orbit(&self, n: usize, search_height: i64) -> Result<SectionOrbit, SlopeError> {
        let section = self.section()?;
        let mut last_reason = String::from("no twist with φ(T^g) = T up to the search height");
        for r in crate::curve::slopes_up_to_height(search_height) {
            let r: Slope = r.convert();
            let res = self.slope_pullback(&r)?;
            if res.k != 1 || res.power != BigInt::one() || res.image == r {
                continue;
            }
            let s = res.image.clone();
            if s.parity()? != r.parity()? {
                continue;
            }
            // g^-1 T_s g = T_r for g = N_s N_r^-1.
            let g = word_of_matrix(&normalizer(&s)?.mul(&normalizer(&r)?.inverse()))?;
            let t = twist_word(&s)?;
            if self.phi_eval(&t.conjugate_by(&g))? != t {
                continue;
            }
            let orbit = self.orbit_from(&section, &s, &t, &g, n)?;
            if orbit.distinct && orbit.same_parity && orbit.chain_certified {
                return Ok(orbit);
            }
            last_reason = format!("orbit from {r} -> {s} fails its certificate");
        }
        Err(SlopeError::NoSection(last_reason))
    }

    fn orbit_from(
        &self,
        section: &NielsenSection,
        s: &Slope,
        t: &FreeWord,
        g: &FreeWord,
        n: usize,
    ) -> Result<SectionOrbit, SlopeError> {
        let mut words = vec![FreeWord::identity()];
        for _ in 0..n {
            let prev = words.last().expect("nonempty");
            words.push(g.mul(&prev.substitute(&section.x_pre, &section.y_pre)));
        }
        let mut slopes = Vec::with_capacity(n + 1);
        for w in &words {
            match classify_parabolic(&matrix_of_word::<BigInt>(&t.conjugate_by(w))) {
                Parabolic::Twist { slope, .. } => slopes.push(slope),
                other => return Err(SlopeError::InternalNonParabolic(format!("{other:?}"))),
            }
        }
        let mut chain_certified = true;
        for i in 1..words.len() {
            chain_certified &= self.phi_eval(&t.conjugate_by(&words[i]))? == t.conjugate_by(&words[i - 1]);
        }
        let distinct = (0..slopes.len()).all(|i| (0..i).all(|j| slopes[i] != slopes[j]));
        let p0 = slopes[0].parity()?;
        let same_parity = slopes.iter().map(|c| c.parity()).collect::<Result<Vec<_>, _>>()?.iter().all(|p| *p == p0);
        Ok(SectionOrbit {
            twist_slope: s.clone(),
            conjugator: g.clone(),
            section: section.clone(),
            slopes,
            word_lengths: words.iter().map(|w| w.len()).collect(),
            chain_certified,
            distinct,
            same_parity,
        })
    }
}

impl SlopeMap for VirtualEndo {
    fn pullback(&self, s: &Slope) -> Result<SlopePullbackResult, SlopeError> {
        self.slope_pullback(s)
    }
}

/// Read `φ(T_s^k)` as a twist power, the identity, or a convention bug.
pub(crate) fn classify_image(s: &Slope, k: usize, img: &FreeWord) -> Result<SlopePullbackResult, SlopeError> {
    match classify_parabolic(&matrix_of_word::<BigInt>(img)) {
        Parabolic::Identity => Ok(SlopePullbackResult::trivial(s.clone(), k)),
        Parabolic::Twist { slope, power } => Ok(SlopePullbackResult {
            source: s.clone(),
            k,
            image: slope,
            multiplier: BigRational::new(power.clone(), BigInt::from(k)),
            power,
        }),
        Parabolic::NonParabolic { trace } => {
            Err(SlopeError::InternalNonParabolic(format!("φ(T_{s}^{k}) = {img} has trace {trace}")))
        }
    }
}

/// A section of `φ` on the free generators.
#[derive(Clone, Debug, Serialize)]
pub struct NielsenSection {
    pub x_pre: FreeWord,
    pub y_pre: FreeWord,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionOrbit {
    pub twist_slope: Slope,
    pub conjugator: FreeWord,
    pub section: NielsenSection,
    /// Core curves `C_0, ..., C_n`; `C_i` pulls back to `C_{i-1}`.
    pub slopes: Vec<Slope>,
    pub word_lengths: Vec<usize>,
    /// `φ(T^{w_i}) = T^{w_{i-1}}` for every `i`.
    pub chain_certified: bool,
    pub distinct: bool,
    pub same_parity: bool,
}

/// `max (|φ^n(w)| / |w|)^{1/n}` over random reduced words `w` of length 48, `n = depth`.
/// An estimate, never a certificate.
pub fn contraction_ratio_of(phi: impl Fn(&FreeWord) -> FreeWord, samples: usize, depth: usize, seed: u64) -> f64 {
    const LENGTH: usize = 48;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let mut w = FreeWord::identity();
        while w.len() < LENGTH {
            w.push(Letter::ALL[rng.gen_range(0..4)]);
        }
        let mut cur = w.clone();
        for _ in 0..depth {
            cur = phi(&cur);
        }
        let r = (cur.len() as f64 / w.len() as f64).powf(1.0 / depth.max(1) as f64);
        best = best.max(r);
    }
    best
}
