use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thurston_core::correspondence::*;
use thurston_core::curve::{FreeWord, Letter};
use thurston_core::monodromy::*;
use thurston_core::numeric::NumOptions;

const RABBIT: &str = include_str!("../fixtures/rabbit.toml");
const Z2I: &str = include_str!("../fixtures/z2i.toml");
const QUARTIC: &str = include_str!("../fixtures/constant-quartic.toml");
const LATTES: &str = include_str!("../fixtures/lattes-proper.toml");

fn model(text: &str) -> GMapModel {
    GMapSpec::from_toml(text).unwrap().build(&NumOptions::default()).unwrap()
}

fn w(s: &str) -> FreeWord {
    s.parse().unwrap()
}

fn random_word(rng: &mut ChaCha8Rng, max: usize) -> FreeWord {
    let n = rng.gen_range(0..=max);
    FreeWord::from_letters((0..n).map(|_| Letter::ALL[rng.gen_range(0..4)]))
}

#[test]
fn rabbit_fiber_is_plus_minus_root() {
    // Oracle: 1 - 1/w^2 = m* gives w = ±1/sqrt(1 - m*).
    let m = model(RABBIT);
    let (fiber, bs) = compute_fiber(&m).unwrap();
    let r = 1.0 / (1.0 - m.basepoint).sqrt();
    assert_eq!(fiber.len(), 2);
    assert!((fiber[0] + r).norm() < 1e-12 && (fiber[1] - r).norm() < 1e-12);
    assert!((fiber[bs] - m.basepoint).norm() < 1e-12);
}

#[test]
fn z2i_fiber_contains_2i() {
    // Oracle: (1 - 2/w)^2 = 2i at w = 2i and at w = 2/(1 + (1 + i)) = 0.8 - 0.4i.
    let m = model(Z2I);
    let (fiber, bs) = compute_fiber(&m).unwrap();
    assert!((fiber[bs] - C64::new(0.0, 2.0)).norm() < 1e-12);
    assert!(fiber.iter().any(|z| (z - C64::new(0.8, -0.4)).norm() < 1e-12));
}

#[test]
fn quartic_fiber_is_square_roots() {
    let m = model(QUARTIC);
    let (fiber, _) = compute_fiber(&m).unwrap();
    let c = monodromy_center(&m).unwrap();
    for z in &fiber {
        assert!((z * z - c).norm() < 1e-12);
    }
    assert!((fiber[0] + fiber[1]).norm() < 1e-12);
}

#[test]
fn relation_transitivity_and_index() {
    for (text, d) in [(RABBIT, 2), (Z2I, 2), (QUARTIC, 2), (LATTES, 1)] {
        let m = model(text);
        let t = monodromy_table(&m, 0).unwrap();
        assert_eq!(t.degree(), d);
        assert!(t.rho_x.then(&t.rho_y).then(&t.rho_z).is_identity());
        assert!(t.is_transitive());
        let h = hf_subgroup(&t.rho_x, &t.rho_y, t.basepoint_sheet);
        assert_eq!(h.index, d);
        assert_eq!(stallings_index(&h.generators), if d == 1 { Some(1) } else { Some(d) });
    }
}

#[test]
fn trivial_loop_lifts_to_identity() {
    let m = model(RABBIT);
    let t = monodromy_table(&m, 0).unwrap();
    let l = lift_loop(&m, &t, &FreeWord::identity()).unwrap();
    assert!(l.perm.is_identity());
    assert!(lift_loop(&m, &t, &w("xX")).unwrap().perm.is_identity());
}

#[test]
fn loop_through_critical_value_fails() {
    // The critical value of 1 - 1/w^2 sits at the end 1: a path through it cannot be continued.
    let m = model(RABBIT);
    let (fiber, _) = compute_fiber(&m).unwrap();
    let path = [m.basepoint, C64::new(1.0, 0.0), m.basepoint];
    assert!(lift_closed(&m.g, m.tol_sep, &path, &fiber).is_err());
}

#[test]
fn cycle_products_are_peripheral() {
    for text in [RABBIT, Z2I, QUARTIC, LATTES] {
        let m = model(text);
        let t = monodromy_table(&m, 0).unwrap();
        let wr = wreath_recursion(&t).unwrap();
        wr.check_cycle_invariant(&m, &t).unwrap();
    }
}

#[test]
fn rabbit_star_has_expected_punctures() {
    let m = model(RABBIT);
    let t = monodromy_table(&m, 0).unwrap();
    let mut labels: Vec<String> = t.star.arcs.iter().map(|a| a.puncture.label()).collect();
    labels.sort();
    assert_eq!(labels, ["-1", "0", "1", "inf"]);
}

#[test]
fn seeds_agree_up_to_conjugacy() {
    // Different arc perturbations change loops only up to isotopy: same cycle types.
    let m = model(Z2I);
    let a = monodromy_table(&m, 0).unwrap();
    let b = monodromy_table(&m, 7).unwrap();
    for (p, q) in [(&a.rho_x, &b.rho_x), (&a.rho_y, &b.rho_y), (&a.rho_z, &b.rho_z)] {
        assert_eq!(p.is_identity(), q.is_identity());
    }
}

/// Direct continuation of a whole word against the composition of restrictions.
fn two_path(text: &str, words: usize, seed: u64) {
    let m = model(text);
    let t = monodromy_table(&m, 0).unwrap();
    let wr = wreath_recursion(&t).unwrap();
    let bs = t.basepoint_sheet;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..words {
        let word = random_word(&mut rng, 6);
        let lift = lift_loop(&m, &t, &word).unwrap();
        let (composed, end) = wr.restrict(&word, bs);
        assert_eq!(end, lift.perm.apply(bs), "{word}");
        let direct =
            wr.connectors[bs].mul(&path_word(&t.star, &lift.paths[bs]).unwrap()).mul(&wr.connectors[end].inverse());
        assert_eq!(normal_form(&t.star, &direct), normal_form(&t.star, &composed), "{word}");
    }
}

#[test]
fn two_path_consistency_rabbit() {
    two_path(RABBIT, 100, 1);
}

#[test]
fn two_path_consistency_z2i() {
    two_path(Z2I, 100, 2);
}

#[test]
fn membership_matches_monodromy() {
    let m = model(Z2I);
    let t = monodromy_table(&m, 0).unwrap();
    let h = hf_subgroup(&t.rho_x, &t.rho_y, t.basepoint_sheet);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let word = random_word(&mut rng, 10);
        assert_eq!(h.contains(&word), t.act(&word).apply(t.basepoint_sheet) == t.basepoint_sheet);
    }
    for g in &h.generators {
        assert!(h.contains(g));
    }
}

#[test]
fn stallings_examples() {
    assert_eq!(stallings_index(&[w("x"), w("y")]), Some(1));
    assert_eq!(stallings_index(&[w("xx"), w("yy"), w("xy")]), Some(2));
    assert_eq!(stallings_index(&[]), None);
    assert_eq!(stallings_index(&[w("xx"), w("yy")]), None);
}

#[test]
fn trivial_monodromy_gives_whole_group() {
    let h = hf_subgroup(&Perm::identity(1), &Perm::identity(1), 0);
    assert_eq!(h.index, 1);
    assert!(h.contains(&w("xyXY")));
}

#[test]
fn projection_of_empty_and_extra_letters() {
    let m = model(RABBIT);
    let t = monodromy_table(&m, 0).unwrap();
    assert!(x_star_project(&t, &PWord::default()).unwrap().is_empty());
    let extra = t.star.arcs.iter().position(|a| matches!(a.puncture.kind, PunctureKind::Extra(_))).unwrap();
    assert!(x_star_project(&t, &PWord(vec![(extra, 1), (extra, 1)])).unwrap().is_empty());
    assert!(matches!(x_star_project(&t, &PWord(vec![(99, 1)])), Err(MonodromyError::UnknownGenerator(_))));
    // The three end letters project to x, y, z in the declared order.
    for (k, expect) in [(0, "x"), (1, "y"), (2, "YX")] {
        let arc = t.star.arc_index(PunctureKind::End(t.generator_ends[k])).unwrap();
        assert_eq!(x_star_project(&t, &PWord(vec![(arc, 1)])).unwrap(), w(expect));
    }
}

#[test]
fn degree_one_restrictions_are_trivial_permutations() {
    let m = model(LATTES);
    let t = monodromy_table(&m, 0).unwrap();
    let wr = wreath_recursion(&t).unwrap();
    assert_eq!(wr.targets, [vec![0], vec![0]]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perm_action_is_a_homomorphism(a in prop::collection::vec(0usize..4, 0..8), b in prop::collection::vec(0usize..4, 0..8)) {
        let rx = Perm(vec![1, 2, 0]);
        let ry = Perm(vec![0, 2, 1]);
        let u = FreeWord::from_letters(a.iter().map(|i| Letter::ALL[*i]));
        let v = FreeWord::from_letters(b.iter().map(|i| Letter::ALL[*i]));
        prop_assert_eq!(act_word(&rx, &ry, &u.mul(&v)), act_word(&rx, &ry, &u).then(&act_word(&rx, &ry, &v)));
    }

    #[test]
    fn schreier_generators_stabilize(x in prop::sample::select(vec![vec![1usize, 0, 2], vec![1, 2, 0], vec![0, 1, 2]]),
                                     y in prop::sample::select(vec![vec![0usize, 2, 1], vec![2, 0, 1]])) {
        let h = hf_subgroup(&Perm(x), &Perm(y), 0);
        for g in &h.generators {
            prop_assert!(h.contains(g));
        }
        if h.index == 3 {
            prop_assert_eq!(stallings_index(&h.generators), Some(3));
        }
    }
}
