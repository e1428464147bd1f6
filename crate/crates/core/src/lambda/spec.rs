use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize, Serializer};

use super::LambdaError;
use crate::scalar::FieldScalar;

/// Identifier used for inessential / peripheral preimage components.
pub const TRIVIAL_ID: &str = "o";

/// One preimage component of a curve together with the degree of the covering onto it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub curve: String,
    pub degree: u32,
}

impl Component {
    pub fn new(curve: impl Into<String>, degree: u32) -> Self {
        Component { curve: curve.into(), degree }
    }

    pub fn trivial(degree: u32) -> Self {
        Component::new(TRIVIAL_ID, degree)
    }

    pub fn is_trivial(&self) -> bool {
        self.curve == TRIVIAL_ID
    }
}

/// Declared pullback data. Columns of λ are `domain_curves` (curves being
/// pulled back), rows are `codomain_curves` (where preimage components live).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackSpec {
    #[serde(default)]
    pub degree: Option<u32>,
    pub domain_curves: Vec<String>,
    pub codomain_curves: Vec<String>,
    #[serde(default)]
    pub entries: BTreeMap<String, Vec<Component>>,
}

impl PullbackSpec {
    pub fn from_toml(text: &str) -> Result<Self, LambdaError> {
        let spec: PullbackSpec = toml::from_str(text).map_err(|e| LambdaError::Input(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LambdaError> {
        let bad = |m: String| Err(LambdaError::MalformedSpec(m));
        let dom: BTreeSet<&String> = self.domain_curves.iter().collect();
        let cod: BTreeSet<&String> = self.codomain_curves.iter().collect();
        if dom.len() != self.domain_curves.len() || cod.len() != self.codomain_curves.len() {
            return bad("duplicate curve id".into());
        }
        if dom.contains(&TRIVIAL_ID.to_string()) || cod.contains(&TRIVIAL_ID.to_string()) {
            return bad(format!("`{TRIVIAL_ID}` is reserved for the trivial class"));
        }
        for key in self.entries.keys() {
            if !dom.contains(key) {
                return bad(format!("entry for undeclared domain curve `{key}`"));
            }
        }
        for gamma in &self.domain_curves {
            let comps = match self.entries.get(gamma) {
                Some(c) => c,
                None => return bad(format!("no preimage data for `{gamma}`")),
            };
            let mut total = 0u64;
            for c in comps {
                if c.degree == 0 {
                    return bad(format!("zero degree over `{gamma}`"));
                }
                if !c.is_trivial() && !cod.contains(&c.curve) {
                    return bad(format!("component `{}` of `{gamma}` is not a codomain curve", c.curve));
                }
                total += u64::from(c.degree);
            }
            if let Some(d) = self.degree {
                if total > u64::from(d) {
                    return bad(format!("degrees over `{gamma}` sum to {total} > {d}"));
                }
            }
        }
        Ok(())
    }

    /// Spec of the disjoint union; ids are assumed disjoint.
    pub fn disjoint_union(&self, other: &PullbackSpec) -> PullbackSpec {
        let mut out = self.clone();
        out.domain_curves.extend(other.domain_curves.iter().cloned());
        out.codomain_curves.extend(other.codomain_curves.iter().cloned());
        out.entries.extend(other.entries.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.degree = match (self.degree, other.degree) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        out
    }
}

/// Matrix of λ in the curve bases: `rows` = codomain, `cols` = domain.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaMatrix<F: FieldScalar> {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<F>>,
}

impl<F: FieldScalar> LambdaMatrix<F> {
    pub fn from_rows(entries: Vec<Vec<F>>) -> Self {
        let n = entries.len();
        let m = entries.first().map_or(0, Vec::len);
        LambdaMatrix {
            rows: (0..n).map(|i| format!("c{i}")).collect(),
            cols: (0..m).map(|j| format!("c{j}")).collect(),
            entries,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.entries[i][j]
    }

    /// Square restriction to the curves of `gamma` (ids present on both sides).
    pub fn restrict(&self, gamma: &[String]) -> Result<LambdaMatrix<F>, LambdaError> {
        let find = |ids: &[String], g: &String| {
            ids.iter()
                .position(|x| x == g)
                .ok_or_else(|| LambdaError::MalformedSpec(format!("curve `{g}` not in matrix")))
        };
        let ri: Vec<usize> = gamma.iter().map(|g| find(&self.rows, g)).collect::<Result<_, _>>()?;
        let ci: Vec<usize> = gamma.iter().map(|g| find(&self.cols, g)).collect::<Result<_, _>>()?;
        let entries = ri.iter().map(|&i| ci.iter().map(|&j| self.entries[i][j].clone()).collect()).collect();
        Ok(LambdaMatrix { rows: gamma.to_vec(), cols: gamma.to_vec(), entries })
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(F::to_f64_lossy).collect()).collect()
    }
}

impl<F: FieldScalar> Serialize for LambdaMatrix<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: &'a [String],
            cols: &'a [String],
            entries: Vec<Vec<String>>,
        }
        let entries = self.entries.iter().map(|r| r.iter().map(F::to_exact_string).collect()).collect();
        Repr { rows: &self.rows, cols: &self.cols, entries }.serialize(serializer)
    }
}

/// `λ(γ) = Σ δ / deg(f: δ -> γ)` over non-trivial preimage components δ.
pub fn build_lambda<F: FieldScalar>(spec: &PullbackSpec) -> Result<LambdaMatrix<F>, LambdaError> {
    spec.validate()?;
    let row_of: BTreeMap<&String, usize> = spec.codomain_curves.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut entries = vec![vec![F::zero(); spec.domain_curves.len()]; spec.codomain_curves.len()];
    for (j, gamma) in spec.domain_curves.iter().enumerate() {
        for c in spec.entries[gamma].iter().filter(|c| !c.is_trivial()) {
            entries[row_of[&c.curve]][j] += F::from_ratio(1, i64::from(c.degree));
        }
    }
    Ok(LambdaMatrix { rows: spec.codomain_curves.clone(), cols: spec.domain_curves.clone(), entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InvarianceStatus {
    /// `f^-1(Γ) = Γ`.
    CompletelyInvariant,
    /// `f^-1(Γ) ⊊ Γ` (including the empty preimage).
    Invariant,
    Neither {
        escaping: Vec<String>,
    },
}

impl InvarianceStatus {
    /// Invariance in the weak sense; complete invariance implies it.
    pub fn is_invariant(&self) -> bool {
        !matches!(self, InvarianceStatus::Neither { .. })
    }
}

/// Compare `f^-1(Γ)` with `Γ`, taking `Γ` to be the declared domain curves.
pub fn invariance_check(spec: &PullbackSpec) -> InvarianceStatus {
    let gamma: BTreeSet<&String> = spec.domain_curves.iter().collect();
    let preimage: BTreeSet<&String> =
        spec.entries.values().flatten().filter(|c| !c.is_trivial()).map(|c| &c.curve).collect();
    let escaping: Vec<String> = preimage.difference(&gamma).map(|s| s.to_string()).collect();
    if !escaping.is_empty() {
        InvarianceStatus::Neither { escaping }
    } else if preimage == gamma {
        InvarianceStatus::CompletelyInvariant
    } else {
        InvarianceStatus::Invariant
    }
}

/// Domain curves whose column vanishes, i.e. curves in the kernel of λ.
pub fn kernel_columns<F: FieldScalar>(m: &LambdaMatrix<F>) -> Vec<String> {
    (0..m.ncols()).filter(|&j| m.entries.iter().all(|r| r[j].is_zero())).map(|j| m.cols[j].clone()).collect()
}
