use num_complex::Complex64 as C64;
use proptest::prelude::*;
use thurston_core::correspondence::ends::{chart_derivative, EndVerdict};
use thurston_core::correspondence::orbit::MPoint;
use thurston_core::correspondence::pcf::{InvariantSetVerdict, PcfStatus, DEFAULT_PCF_BOUND};
use thurston_core::correspondence::*;
use thurston_core::lambda::Nu;
use thurston_core::numeric::rmap::Mobius;
use thurston_core::numeric::{CPoly, NumOptions, RationalMap, SPoint};

const RABBIT: &str = include_str!("../fixtures/rabbit.toml");
const Z2I: &str = include_str!("../fixtures/z2i.toml");
const QUARTIC: &str = include_str!("../fixtures/constant-quartic.toml");
const LATTES: &str = include_str!("../fixtures/lattes-proper.toml");

fn model(text: &str) -> GMapModel {
    GMapSpec::from_toml(text).unwrap().build(&NumOptions::default()).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn rabbit_basepoint_is_real_root_of_cubic() {
    // Oracle: w^3 - w^2 + 1 = 0 has the single real root -0.7548776662466927.
    let m = model(RABBIT);
    assert!((m.basepoint - c(-0.7548776662466927, 0.0)).norm() < 1e-12);
    assert_eq!(m.extra_punctures.len(), 1);
    assert!((m.extra_punctures[0] - c(-1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn z2i_basepoint_and_puncture() {
    // Oracle: fixed points solve (w - 1)(w^2 + 4) = 0; preimages of the ends add only w = 2.
    let m = model(Z2I);
    assert!((m.basepoint - c(0.0, 2.0)).norm() < 1e-12);
    assert_eq!(m.extra_punctures.len(), 1);
    assert!((m.extra_punctures[0] - c(2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn degree_one_is_rejected() {
    let g = RationalMap::new(CPoly::from_real(&[1.0, -1.0]), CPoly::from_real(&[1.0])).unwrap();
    assert_eq!(build_model(g, ModelKind::XInjective, 1e-6).unwrap_err(), CorrError::DegreeTooLow(1));
}

#[test]
fn non_covering_is_rejected() {
    // w^2 + 1 has critical value 1 at 0 but also... 2w - w^2 + 3 has critical value 4.
    let g = RationalMap::new(CPoly::from_real(&[3.0, 2.0, -1.0]), CPoly::from_real(&[1.0])).unwrap();
    assert!(matches!(build_model(g, ModelKind::XInjective, 1e-6), Err(CorrError::NotACovering(_))));
}

#[test]
fn end_reports() {
    let r = end_dynamics(&model(RABBIT)).unwrap();
    assert_eq!(r.summary, EndSummary::NoFixedEnd);
    let images: Vec<_> = r.entries.iter().map(|e| (e.end.label(), e.image.label())).collect();
    assert_eq!(images, vec![("0", "inf"), ("1", "0"), ("inf", "1")]);

    let r = end_dynamics(&model(Z2I)).unwrap();
    let one = r.entry(End::One).unwrap();
    // Oracle: g'(w) = 4(1 - 2/w)/w^2, so g'(1) = -4.
    assert!((one.branch_derivative.unwrap() - c(-0.25, 0.0)).norm() < 1e-9);
    assert_eq!(one.verdict, EndVerdict::ObstructedTwistFamily);
    assert!(one.repelling);
    assert_eq!(r.repelling_end(), Some(End::One));
}

#[test]
fn identity_like_end_is_not_attracting() {
    assert_eq!(EndVerdict::classify(c(1.0, 0.0)), EndVerdict::NotAttracting);
    assert_eq!(EndVerdict::classify(c(0.0, -1.5)), EndVerdict::NotAttracting);
    assert_eq!(EndVerdict::classify(c(0.5, 0.0)), EndVerdict::ObstructedTwistFamily);
}

#[test]
fn pcf_checks() {
    let rabbit = model(RABBIT);
    let r = pcf_hyperbolic_check(&rabbit.g, DEFAULT_PCF_BOUND, 1e-6).unwrap();
    assert_eq!(r.status, PcfStatus::Pcf);
    assert!(r.hyperbolic);
    assert_eq!(r.verdict, InvariantSetVerdict::JuliaSetIsCompactInvariant);

    let z = model(Z2I);
    let r = pcf_hyperbolic_check(&z.g, DEFAULT_PCF_BOUND, 1e-6).unwrap();
    assert_eq!(r.status, PcfStatus::Pcf);
    assert!(!r.hyperbolic);
    assert_eq!(r.verdict, InvariantSetVerdict::Unknown);

    let sq = RationalMap::new(CPoly::from_real(&[0.0, 0.0, 1.0]), CPoly::from_real(&[1.0])).unwrap();
    assert_eq!(pcf_hyperbolic_check(&sq, DEFAULT_PCF_BOUND, 1e-6).unwrap().status, PcfStatus::Pcf);

    // w^2 - 1/2 has a critical orbit converging to an irrational fixed point.
    let q = RationalMap::new(CPoly::from_real(&[-0.5, 0.0, 1.0]), CPoly::from_real(&[1.0])).unwrap();
    assert_eq!(pcf_hyperbolic_check(&q, 16, 1e-6).unwrap().status, PcfStatus::NotPcfWithin { bound: 16 });
}

#[test]
fn euclidean_certificates() {
    let cert = euclidean_expansion_certificate(&model(Z2I).g, 1e-6).unwrap();
    assert!((cert.factor - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(cert.signature.signature_type(), vec![Nu::Finite(2), Nu::Finite(4), Nu::Finite(4)]);
    assert!(matches!(euclidean_expansion_certificate(&model(RABBIT).g, 1e-6), Err(CorrError::NotEuclidean(_))));
    // (z2i g)∘(z2i g) has the same (2,4,4) portrait and degree 4.
    let g = model(Z2I).g;
    let num = g.num().pow(2).sub(&CPoly::from_real(&[4.0]).mul(g.num()).mul(g.den()));
    let num = num.add(&CPoly::from_real(&[4.0]).mul(&g.den().pow(2)));
    let g2 = RationalMap::new(num, g.num().pow(2)).unwrap();
    assert!((euclidean_expansion_certificate(&g2, 1e-6).unwrap().factor - 2.0).abs() < 1e-15);
}

#[test]
fn inverse_branch_near_fixed_end() {
    // Oracle: (1 - 2/w)^2 = 1.1 near w = 1 gives w = 2 / (1 + sqrt(1.1)).
    let g = model(Z2I).g;
    let w = inverse_branch(&g, c(1.1, 0.0), c(1.0, 0.0), 1e-6).unwrap();
    assert!((w - c(2.0 / (1.0 + 1.1f64.sqrt()), 0.0)).norm() < 1e-12);
}

#[test]
fn systole_proxy_values() {
    let v = systole_proxy(c(1e-6, 0.0)).unwrap();
    assert!((v - 2.0 * std::f64::consts::PI.powi(2) / (6.0 * 10f64.ln())).abs() < 1e-12);
    let clamp = 2.0 * std::f64::consts::PI.powi(2) / 2f64.ln();
    assert!((systole_proxy(c(0.5, 1.0)).unwrap() - clamp).abs() < 1e-12);
    assert_eq!(systole_proxy(c(0.0, 0.0)), Err(CorrError::AtEnd));
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let s = systole_proxy(c(0.4f64.powi(k), 0.0)).unwrap();
        assert!(s < prev);
        prev = s;
    }
}

#[test]
fn orbit_on_z2i() {
    let m = model(Z2I);
    let orbit = synthesize_orbit(&m, 0.1, &[0.1, 0.05]).unwrap();
    assert!(orbit_verify(&m, &orbit));
    // The first pullback of 2i along the end branch is 0.8 - 0.4i.
    assert!((orbit.points[1].to_c64() - c(0.8, -0.4)).norm() < 1e-12);
    let last = orbit.points.last().unwrap();
    assert!((last.to_c64() - c(0.0, 2.0)).norm() < 0.1);
    let min = orbit.systoles.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min < 0.05);
    assert!(orbit.points.iter().any(|p| matches!(p, MPoint::Chart { .. })));
}

#[test]
fn orbit_edge_cases() {
    let m = model(Z2I);
    let orbit = synthesize_orbit(&m, 0.1, &[]).unwrap();
    assert_eq!(orbit.points, vec![MPoint::Base(m.basepoint)]);
    assert_eq!(synthesize_orbit(&model(RABBIT), 0.1, &[0.1]).unwrap_err(), CorrError::NoRepellingEnd);
}

#[test]
fn properness_and_constant_model() {
    let props: Vec<_> = [RABBIT, Z2I].iter().map(|t| x_properness(&model(t)).unwrap()).collect();
    assert_eq!(props[0], Properness::NotProper { extra_punctures: vec!["-1".into()] });
    assert_eq!(props[1], Properness::NotProper { extra_punctures: vec!["2".into()] });
    assert_eq!(x_properness(&model(LATTES)).unwrap(), Properness::Proper);

    let q = model(QUARTIC);
    let rep = constant_model_report(&q).unwrap();
    assert_eq!(rep.y_degree, 2);
    assert!(rep.consistent() && rep.pullback_relation_constant);
    assert!(matches!(x_properness(&q), Err(CorrError::WrongKind { .. })));
    assert!(matches!(constant_model_report(&model(Z2I)), Err(CorrError::WrongKind { .. })));
}

/// Möbius maps permuting {0, 1, ∞}.
fn end_permutations() -> Vec<Mobius<f64>> {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    vec![
        Mobius::new(-o, o, z, o), // 1 - w
        Mobius::new(z, o, o, z),  // 1/w
        Mobius::new(o, z, o, -o), // w/(w - 1)
        Mobius::new(z, o, -o, o), // 1/(1 - w)
        Mobius::new(o, -o, o, z), // (w - 1)/w
    ]
}

#[test]
fn pcf_portrait_is_conjugation_covariant() {
    for g in [model(RABBIT).g, model(Z2I).g] {
        let base = pcf_hyperbolic_check(&g, DEFAULT_PCF_BOUND, 1e-6).unwrap();
        for h in end_permutations() {
            let conj = pcf_hyperbolic_check(&g.conjugate(&h).unwrap(), DEFAULT_PCF_BOUND, 1e-6).unwrap();
            assert_eq!(conj.hyperbolic, base.hyperbolic);
            assert_eq!(conj.points.len(), base.points.len());
            let find = |p: &SPoint<f64>| conj.points.iter().position(|q| q.chordal(p) < 1e-6).unwrap();
            for (i, p) in base.points.iter().enumerate() {
                let j = find(&h.apply(p));
                assert_eq!(conj.image[j], find(&h.apply(&base.points[base.image[i]])));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The multiplier at a fixed point does not depend on the chart used to compute it.
    #[test]
    fn end_multiplier_is_chart_independent(re in -3.0f64..3.0, im in -3.0f64..3.0, s in 0.5f64..2.0) {
        // w^2/(2w - 1) fixes ∞ with multiplier 2 in the chart 1/w.
        let g = RationalMap::new(CPoly::from_real(&[0.0, 0.0, 1.0]), CPoly::from_real(&[-1.0, 2.0])).unwrap();
        let at_inf = chart_derivative(&g, &SPoint::Inf);
        let p = c(re, im);
        prop_assume!(p.norm() > 0.1);
        // h sends ∞ to the finite point p.
        let h = Mobius::new(p * s, c(1.0, 0.0), c(s, 0.0), c(0.0, 0.0));
        let moved = chart_derivative(&g.conjugate(&h).unwrap(), &SPoint::Fin(p));
        prop_assert!((at_inf - c(2.0, 0.0)).norm() < 1e-9);
        prop_assert!((moved - at_inf).norm() < 1e-9);
    }
}
