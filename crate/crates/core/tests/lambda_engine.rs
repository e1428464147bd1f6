use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use thurston_core::lambda::orbifold::is_admissible;
use thurston_core::lambda::spectral::{Method, CERTIFIED_WIDTH};
use thurston_core::lambda::*;
use thurston_core::scalar::FieldScalar;

type Q = BigRational;

/// Slack for comparing an f64 Rayleigh quotient with a certified interval.
const RAYLEIGH_SLACK: f64 = 1e-12;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn spec(text: &str) -> PullbackSpec {
    PullbackSpec::from_toml(text).unwrap()
}

const BLOWUP: &str = r#"
    degree = 5
    domain_curves = ["gv"]
    codomain_curves = ["gv"]
    entries = { gv = [{ curve = "gv", degree = 2 }, { curve = "gv", degree = 2 }, { curve = "o", degree = 1 }] }
"#;

fn hyperbolic() -> OrbifoldSignature {
    let p = Portrait::from_toml(
        r#"degree = 2
        points = ["i", "i-1", "-i", "inf"]
        map = { "i" = "i-1", "i-1" = "-i", "-i" = "i-1", "inf" = "inf" }
        local_degree = { "inf" = 2 }
        extra_critical = { "i" = [2] }"#,
    )
    .unwrap();
    orbifold_signature(&p).unwrap()
}

#[test]
fn build_examples() {
    let two_halves = spec(
        r#"domain_curves = ["g"]
        codomain_curves = ["g"]
        entries = { g = [{ curve = "g", degree = 2 }, { curve = "g", degree = 2 }] }"#,
    );
    assert_eq!(build_lambda::<Q>(&two_halves).unwrap().entries, vec![vec![q(1, 1)]]);
    let dead = spec(
        r#"domain_curves = ["g"]
        codomain_curves = ["g"]
        entries = { g = [{ curve = "o", degree = 1 }, { curve = "o", degree = 1 }] }"#,
    );
    let m = build_lambda::<Q>(&dead).unwrap();
    assert_eq!(m.entries, vec![vec![q(0, 1)]]);
    assert_eq!(kernel_columns(&m), vec!["g".to_string()]);
    assert_eq!(build_lambda::<Q>(&spec(BLOWUP)).unwrap().entries, vec![vec![q(1, 1)]]);
}

#[test]
fn malformed_specs_are_rejected() {
    let over = r#"degree = 2
        domain_curves = ["g"]
        codomain_curves = ["g"]
        entries = { g = [{ curve = "g", degree = 2 }, { curve = "g", degree = 1 }] }"#;
    assert!(matches!(PullbackSpec::from_toml(over), Err(LambdaError::MalformedSpec(_))));
    let unknown = r#"domain_curves = ["g"]
        codomain_curves = ["g"]
        entries = { g = [{ curve = "h", degree = 1 }] }"#;
    assert!(matches!(PullbackSpec::from_toml(unknown), Err(LambdaError::MalformedSpec(_))));
}

#[test]
fn rectangular_matrix() {
    let s = spec(
        r#"domain_curves = ["b1"]
        codomain_curves = ["a1", "a2"]
        entries = { b1 = [{ curve = "a1", degree = 1 }, { curve = "a2", degree = 3 }] }"#,
    );
    let m = build_lambda::<Q>(&s).unwrap();
    assert_eq!(m.entries, vec![vec![q(1, 1)], vec![q(1, 3)]]);
    assert_eq!(spectral_radius(&m).unwrap_err(), LambdaError::NotSquare { rows: 2, cols: 1 });
    let json = serde_json::to_value(&m).unwrap();
    assert_eq!(json["entries"][1][0], "1/3");
}

#[test]
fn spectral_examples() {
    let one = LambdaMatrix::from_rows(vec![vec![q(1, 1)]]);
    assert_eq!(spectral_radius(&one).unwrap().exact, Some(q(1, 1)));
    let zero = LambdaMatrix::from_rows(vec![vec![q(0, 1); 3]; 3]);
    assert_eq!(spectral_radius(&zero).unwrap().exact, Some(q(0, 1)));
    let m = LambdaMatrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 2), q(0, 1)]]);
    let sr = spectral_radius(&m).unwrap();
    assert_eq!(sr.exact, None);
    let root = 0.5f64.sqrt();
    assert!(sr.lo.clone() * sr.lo.clone() <= q(1, 2) && sr.hi.clone() * sr.hi.clone() >= q(1, 2));
    assert!(sr.width() <= CERTIFIED_WIDTH);
    assert!((sr.approx() - root).abs() <= CERTIFIED_WIDTH);
}

#[test]
fn rational_radius_is_recognised() {
    let m = LambdaMatrix::from_rows(vec![vec![q(1, 3), q(1, 3)], vec![q(1, 3), q(1, 3)]]);
    assert_eq!(spectral_radius(&m).unwrap().exact, Some(q(2, 3)));
}

#[test]
fn large_matrices_use_certified_bounds() {
    // Cycle of length 10 with weights 1/2 and one entry 1: ρ = (1/2)^(9/10).
    let n = 10;
    let mut rows = vec![vec![q(0, 1); n]; n];
    for i in 0..n {
        rows[(i + 1) % n][i] = if i == 0 { q(1, 1) } else { q(1, 2) };
    }
    let sr = spectral_radius(&LambdaMatrix::from_rows(rows)).unwrap();
    assert_eq!(sr.method, Method::CollatzWielandt);
    assert!(sr.converged);
    let expected = 0.5f64.powf(0.9);
    assert!(sr.lo.clone() <= Q::from_float(expected + 1e-15).unwrap());
    assert!(sr.hi.clone() >= Q::from_float(expected - 1e-15).unwrap());
    assert!(sr.width() <= CERTIFIED_WIDTH);
}

#[test]
fn verdicts() {
    let orb = hyperbolic();
    let blow = build_lambda::<Q>(&spec(BLOWUP)).unwrap();
    assert!(matches!(thurston_verdict(&blow, &orb).unwrap(), Verdict::Obstructed { .. }));
    let zero = LambdaMatrix::from_rows(vec![vec![q(0, 1)]]);
    assert!(matches!(thurston_verdict(&zero, &orb).unwrap(), Verdict::Unobstructed { .. }));
    let m = LambdaMatrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 2), q(0, 1)]]);
    assert!(matches!(thurston_verdict(&m, &orb).unwrap(), Verdict::Unobstructed { .. }));
    let euclidean = orbifold_signature(
        &Portrait::from_toml(
            r#"points = ["0", "1", "2", "inf"]
            map = { "0" = "inf", "1" = "1", "2" = "0", "inf" = "1" }
            local_degree = { "0" = 2, "2" = 2 }"#,
        )
        .unwrap(),
    )
    .unwrap();
    assert!(matches!(thurston_verdict(&blow, &euclidean), Err(LambdaError::EuclideanOrbifold { .. })));
}

#[test]
fn invariance_examples() {
    let empty = spec("domain_curves = []\ncodomain_curves = []");
    assert_eq!(invariance_check(&empty), InvarianceStatus::CompletelyInvariant);
    assert!(invariance_check(&spec(BLOWUP)).is_invariant());
    let leaking = spec(
        r#"domain_curves = ["a"]
        codomain_curves = ["a", "b"]
        entries = { a = [{ curve = "b", degree = 1 }] }"#,
    );
    assert_eq!(invariance_check(&leaking), InvarianceStatus::Neither { escaping: vec!["b".into()] });
    let shrinking = spec(
        r#"domain_curves = ["a", "b"]
        codomain_curves = ["a", "b"]
        entries = { a = [{ curve = "a", degree = 1 }], b = [{ curve = "o", degree = 1 }] }"#,
    );
    assert_eq!(invariance_check(&shrinking), InvarianceStatus::Invariant);
}

#[test]
fn kernel_columns_examples() {
    let id = LambdaMatrix::from_rows(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
    assert!(kernel_columns(&id).is_empty());
    let zero = LambdaMatrix::from_rows(vec![vec![q(0, 1); 2]; 2]);
    assert_eq!(kernel_columns(&zero).len(), 2);
}

fn spec_strategy(prefix: &'static str) -> impl Strategy<Value = PullbackSpec> {
    (1usize..4, 1usize..4).prop_flat_map(move |(nd, nc)| {
        let comps = prop::collection::vec(prop::collection::vec((0..=nc, 1u32..5), 0..4), nd);
        comps.prop_map(move |cols| {
            let dom: Vec<String> = (0..nd).map(|i| format!("{prefix}d{i}")).collect();
            let cod: Vec<String> = (0..nc).map(|i| format!("{prefix}c{i}")).collect();
            let mut entries = BTreeMap::new();
            for (i, col) in cols.into_iter().enumerate() {
                let list = col
                    .into_iter()
                    .map(|(c, d)| if c == nc { Component::trivial(d) } else { Component::new(cod[c].clone(), d) })
                    .collect();
                entries.insert(dom[i].clone(), list);
            }
            PullbackSpec { degree: None, domain_curves: dom, codomain_curves: cod, entries }
        })
    })
}

fn square_strategy() -> impl Strategy<Value = Vec<Vec<Q>>> {
    (1usize..7).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(prop_oneof![2 => Just(0i64), 1 => 1i64..5], n), n)
            .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(|v| q(v, 3)).collect()).collect())
    })
}

fn rayleigh(m: &[Vec<f64>], v: &[f64]) -> f64 {
    let av: Vec<f64> = m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
    let num: f64 = av.iter().zip(v).map(|(a, b)| a * b).sum();
    num / v.iter().map(|x| x * x).sum::<f64>()
}

fn portrait_strategy() -> impl Strategy<Value = Portrait> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(0..n, n),
            prop::collection::vec(prop_oneof![3 => Just(1u32), 1 => 2u32..4], n),
            prop::collection::vec(prop::collection::vec(2u32..4, 0..2), n),
        )
            .prop_map(move |(map, degs, extra)| {
                let name = |i: usize| format!("p{i}");
                Portrait {
                    degree: None,
                    points: (0..n).map(name).collect(),
                    map: (0..n).map(|i| (name(i), name(map[i]))).collect(),
                    local_degree: (0..n).map(|i| (name(i), degs[i])).collect(),
                    extra_critical: (0..n)
                        .filter(|&i| !extra[i].is_empty())
                        .map(|i| (name(i), extra[i].clone()))
                        .collect(),
                }
            })
    })
}

proptest! {
    #[test]
    fn disjoint_union_is_block_diagonal(a in spec_strategy("a"), b in spec_strategy("b")) {
        let ma = build_lambda::<Q>(&a).unwrap();
        let mb = build_lambda::<Q>(&b).unwrap();
        let mu = build_lambda::<Q>(&a.disjoint_union(&b)).unwrap();
        for i in 0..mu.nrows() {
            for j in 0..mu.ncols() {
                let expected = match (i < ma.nrows(), j < ma.ncols()) {
                    (true, true) => ma.entries[i][j].clone(),
                    (false, false) => mb.entries[i - ma.nrows()][j - ma.ncols()].clone(),
                    _ => q(0, 1),
                };
                prop_assert_eq!(&mu.entries[i][j], &expected);
            }
        }
    }

    #[test]
    fn witness_rayleigh_quotient_lies_in_interval(rows in square_strategy()) {
        let m = LambdaMatrix::from_rows(rows);
        let sr = spectral_radius(&m).unwrap();
        prop_assert!(sr.lo <= sr.hi);
        let rq = rayleigh(&m.to_f64(), &sr.witness);
        let (lo, hi) = (sr.lo.clone(), sr.hi.clone());
        let scale = 1.0f64.max(hi.to_f64_lossy());
        prop_assert!(rq >= lo.to_f64_lossy() - RAYLEIGH_SLACK * scale, "rq {} lo {}", rq, lo);
        prop_assert!(rq <= hi.to_f64_lossy() + RAYLEIGH_SLACK * scale, "rq {} hi {}", rq, hi);
    }

    #[test]
    fn orbifold_weights_are_least(p in portrait_strategy()) {
        let sig = orbifold_signature(&p).unwrap();
        prop_assert!(is_admissible(&p, &sig.nu));
        for i in 0..sig.nu.len() {
            if let Nu::Finite(v) = sig.nu[i] {
                for d in (1..v).filter(|d| v % d == 0) {
                    let mut lowered = sig.nu.clone();
                    lowered[i] = Nu::Finite(d);
                    prop_assert!(!is_admissible(&p, &lowered));
                }
            }
        }
    }
}
