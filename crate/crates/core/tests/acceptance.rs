//! End-to-end acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thurston_core::correspondence::orbit::max_residual;
use thurston_core::correspondence::*;
use thurston_core::curve::*;
use thurston_core::fixtures::fixture;
use thurston_core::lambda::*;
use thurston_core::monodromy::*;
use thurston_core::numeric::NumOptions;
use thurston_core::slopes::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const DERIVATIVE_TOL: f64 = 1e-9;
const EXPANSION_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;
const SPECTRAL_WIDTH: f64 = 1e-9;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn model(name: &str) -> Result<GMapModel, String> {
    let f = fixture(name).map_err(|e| e.to_string())?;
    GMapSpec::from_toml(f.text).and_then(|s| s.build(&NumOptions::default())).map_err(|e| e.to_string())
}

fn endo(m: &GMapModel) -> Result<VirtualEndo, String> {
    VirtualEndo::new(m, 0).map_err(|e| e.to_string())
}

fn s(t: &str) -> thurston_core::Slope {
    t.parse().unwrap()
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
}

fn rabbit() -> Check {
    let start = Instant::now();
    let m = model("rabbit")?;
    let pcf = pcf_hyperbolic_check(&m.g, pcf::DEFAULT_PCF_BOUND, m.tol_sep).map_err(|e| e.to_string())?;
    ensure(pcf.status == pcf::PcfStatus::Pcf && pcf.hyperbolic, "not PCF + hyperbolic")?;
    ensure(pcf.verdict == pcf::InvariantSetVerdict::JuliaSetIsCompactInvariant, format!("{:?}", pcf.verdict))?;
    let r = fga_search(&endo(&m)?, 50, 40).map_err(|e| e.to_string())?;
    ensure(r.is_finite(), format!("{:?}", r.verdict))?;
    ensure(r.closure_certified, "closure certificate failed")?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} slopes explored in {:.1}s", r.explored, start.elapsed().as_secs_f64()))
}

fn z2i_lattes() -> Check {
    let start = Instant::now();
    let m = model("z2i")?;
    let cert = euclidean_expansion_certificate(&m.g, m.tol_sep).map_err(|e| e.to_string())?;
    let ty = cert.signature.signature_type();
    ensure(ty == vec![Nu::Finite(2), Nu::Finite(4), Nu::Finite(4)], format!("signature {ty:?}"))?;
    ensure(cert.signature.euler.is_zero(), format!("euler {}", cert.signature.euler_string()))?;
    ensure((cert.factor - 2f64.sqrt()).abs() < EXPANSION_TOL, format!("factor {}", cert.factor))?;
    let ve = endo(&m)?;
    let mut worst = 0;
    for t in slopes_up_to_height(30) {
        let mut cur: thurston_core::Slope = t.convert();
        let mut steps = 0;
        while !cur.is_trivial() {
            cur = ve.slope_pullback(&cur).map_err(|e| e.to_string())?.image;
            steps += 1;
            ensure(steps <= 60, format!("{t} not trivial after 60 steps"))?;
        }
        worst = worst.max(steps);
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("(2,4,4), factor √2, every slope trivial within {worst} steps"))
}

fn ends() -> Check {
    let z = end_dynamics(&model("z2i")?).map_err(|e| e.to_string())?;
    let one = z.entry(End::One).ok_or("no entry for end 1")?;
    let a = one.branch_derivative.ok_or("end 1 not fixed")?;
    ensure(one.fixed, "end 1 not fixed")?;
    ensure((a.re + 0.25).abs() < DERIVATIVE_TOL && a.im.abs() < DERIVATIVE_TOL, format!("derivative {a}"))?;
    ensure(one.repelling && a.norm() > 0.0 && a.norm() < 1.0, "end 1 not repelling")?;
    let r = end_dynamics(&model("rabbit")?).map_err(|e| e.to_string())?;
    ensure(r.summary == EndSummary::NoFixedEnd, format!("rabbit {:?}", r.summary))?;
    Ok(format!("a = {:.12}", a.re))
}

fn oracle() -> Check {
    let m = model("z2i")?;
    let ve = endo(&m)?;
    let dynamics = DynamicsSpec::from_fixture(fixture("z2i").unwrap().text)
        .map_err(|e| e.to_string())?
        .ok_or("z2i has no [dynamics] table")?;
    let sample = ["1/0", "1/1", "-1/2", "3/2", "5/3"];
    for t in sample {
        let t = s(t);
        let alg = ve.slope_pullback(&t).map_err(|e| e.to_string())?;
        let geo = geometric_oracle(&dynamics, &m, &ve, &t).map_err(|e| e.to_string())?;
        ensure(alg.image == geo.image && alg.multiplier == geo.multiplier, format!("{t}: {alg:?} vs {geo:?}"))?;
    }
    Ok(format!("{} slopes, zero mismatches", sample.len()))
}

fn monodromy() -> Check {
    for (name, d) in [("rabbit", 2), ("z2i", 2), ("constant-quartic", 2), ("lattes-proper", 1)] {
        let m = model(name)?;
        let t = monodromy_table(&m, 0).map_err(|e| e.to_string())?;
        ensure(t.rho_x.then(&t.rho_y).then(&t.rho_z).is_identity(), format!("{name}: relation fails"))?;
        let h = hf_subgroup(&t.rho_x, &t.rho_y, t.basepoint_sheet);
        ensure(h.index == d, format!("{name}: index {} != {d}", h.index))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for name in ["rabbit", "z2i"] {
        let m = model(name)?;
        let t = monodromy_table(&m, 0).map_err(|e| e.to_string())?;
        let wr = wreath_recursion(&t).map_err(|e| e.to_string())?;
        let bs = t.basepoint_sheet;
        for _ in 0..200 {
            let n = rng.gen_range(0..=6);
            let word = FreeWord::from_letters((0..n).map(|_| Letter::ALL[rng.gen_range(0..4)]));
            let lift = lift_loop(&m, &t, &word).map_err(|e| e.to_string())?;
            let (composed, end) = wr.restrict(&word, bs);
            ensure(end == lift.perm.apply(bs), format!("{name} {word}: endpoint"))?;
            let direct = wr.connectors[bs]
                .mul(&path_word(&t.star, &lift.paths[bs]).map_err(|e| e.to_string())?)
                .mul(&wr.connectors[end].inverse());
            ensure(
                normal_form(&t.star, &direct) == normal_form(&t.star, &composed),
                format!("{name} {word}: restriction"),
            )?;
        }
    }
    Ok("relation and index on 4 fixtures, 200 two-path words on rabbit and z2i".into())
}

fn surjectivity_and_section() -> Check {
    let ve = endo(&model("z2i")?)?;
    ensure(ve.surjectivity_check() == Some(1), format!("index {:?}", ve.surjectivity_check()))?;
    let o = ve.section_orbit(5, 6).map_err(|e| e.to_string())?;
    ensure(o.slopes.len() == 6, format!("{} slopes", o.slopes.len()))?;
    ensure(o.distinct && o.same_parity && o.chain_certified, "section certificate failed")?;
    let mut sorted = o.slopes.clone();
    sorted.sort();
    sorted.dedup();
    ensure(sorted.len() == 6, "slopes repeat")?;
    let parity = o.slopes[0].parity().map_err(|e| e.to_string())?;
    ensure(o.slopes.iter().all(|c| c.parity().ok() == Some(parity)), "parity differs")?;
    let list: Vec<String> = o.slopes.iter().map(|c| c.to_string()).collect();
    Ok(list.join(" <- "))
}

fn orbit() -> Check {
    let start = Instant::now();
    let m = model("z2i")?;
    let eps = [0.1, 0.05, 0.02];
    let o = synthesize_orbit(&m, 0.1, &eps).map_err(|e| e.to_string())?;
    let res = max_residual(&m, &o);
    ensure(res < RESIDUAL_TOL, format!("residual {res:e}"))?;
    // First index at which the systole drops below each threshold.
    let mut firsts = Vec::new();
    for e in eps {
        let i = o.systoles.iter().position(|&v| v < e).ok_or(format!("never below {e}"))?;
        firsts.push(i);
    }
    ensure(firsts.windows(2).all(|w| w[0] < w[1]), format!("thresholds crossed at {firsts:?}"))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("{} points, residual {res:.1e}, crossings at {firsts:?}", o.points.len()))
}

fn properness() -> Check {
    for name in ["z2i", "rabbit", "lattes-proper"] {
        let m = model(name)?;
        let proper = x_properness(&m).map_err(|e| e.to_string())? == Properness::Proper;
        let ve = endo(&m)?;
        let mut trivial = false;
        for t in slopes_up_to_height(30) {
            if ve.slope_pullback(&t.convert()).map_err(|e| e.to_string())?.image.is_trivial() {
                trivial = true;
                break;
            }
        }
        ensure(proper != trivial, format!("{name}: proper = {proper}, trivial image = {trivial}"))?;
        if name == "lattes-proper" {
            ensure(proper, "lattes-proper is not proper")?;
        }
    }
    Ok("NotProper ⇔ trivial image on z2i, rabbit; neither on lattes-proper".into())
}

fn lambda() -> Check {
    let text = fixture("blowup-lambda").unwrap().text;
    let spec = PullbackSpec::from_toml(text).map_err(|e| e.to_string())?;
    let m = build_lambda::<BigRational>(&spec).map_err(|e| e.to_string())?;
    let gv = m.cols.iter().position(|c| c == "gv").ok_or("no gv column")?;
    let row = m.rows.iter().position(|c| c == "gv").ok_or("no gv row")?;
    ensure(m.entries[row][gv].is_one(), format!("λ(gv) entry {}", m.entries[row][gv]))?;
    #[derive(Deserialize)]
    struct Holder {
        portrait: Portrait,
    }
    let h: Holder = toml::from_str(text).map_err(|e| e.to_string())?;
    let sig = orbifold_signature(&h.portrait).map_err(|e| e.to_string())?;
    let v = thurston_verdict(&m, &sig).map_err(|e| e.to_string())?;
    ensure(matches!(v, Verdict::Obstructed { .. }), format!("{v:?}"))?;

    let plugin = PluginSlopeMap::from_toml(fixture("blowup-lattes").unwrap().text).map_err(|e| e.to_string())?;
    let r = fga_search(&plugin, 10, 40).map_err(|e| e.to_string())?;
    ensure(matches!(r.verdict, AttractorVerdict::Horizon { .. }), format!("{:?}", r.verdict))?;

    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let half = LambdaMatrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 2), q(0, 1)]]);
    let sr = spectral_radius(&half).map_err(|e| e.to_string())?;
    let root = 0.5f64.sqrt();
    ensure(sr.width() <= SPECTRAL_WIDTH, format!("width {:e}", sr.width()))?;
    let (lo, hi) = (sr.lo.clone(), sr.hi.clone());
    // Exact enclosure: lo² ≤ 1/2 ≤ hi².
    ensure(&lo * &lo <= q(1, 2) && &hi * &hi >= q(1, 2), "interval misses √½")?;
    Ok(format!("λ(gv)=gv ×1, Obstructed, plugin Horizon, ρ ≈ {:.12} (√½ = {root:.12})", sr.approx()))
}

fn algebra() -> Check {
    let start = Instant::now();
    // Faithfulness: no nonempty reduced word of length ≤ 12 maps to ±I.
    fn dfs(m: &TwistMatrix<i64>, last: Option<Letter>, len: usize, count: &mut usize) -> Result<(), String> {
        if len > 0 && m.is_identity_mod_sign() {
            return Err(format!("word of length {len} acts trivially"));
        }
        if len == 12 {
            return Ok(());
        }
        for l in Letter::ALL {
            if last == Some(l.inverse()) {
                continue;
            }
            *count += 1;
            dfs(&m.mul(&matrix_of_word(&FreeWord::letter(l))), Some(l), len + 1, count)?;
        }
        Ok(())
    }
    let mut count = 0;
    dfs(&TwistMatrix::identity(), None, 0, &mut count)?;

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let word = |rng: &mut ChaCha8Rng, n: usize| {
        FreeWord::from_letters((0..rng.gen_range(0..=n)).map(|_| Letter::ALL[rng.gen_range(0..4)]))
    };
    let slopes = slopes_up_to_height(12);
    for _ in 0..2000 {
        let w = word(&mut rng, 16);
        let m = matrix_of_word::<BigInt>(&w);
        ensure(word_of_matrix(&m).ok() == Some(w.clone()), format!("round trip {w}"))?;
        let a: Slope<BigInt> = slopes[rng.gen_range(0..slopes.len())].convert();
        let k = BigInt::from(rng.gen_range(-5i64..=5).max(1));
        let t = twist_matrix(&a, &k).map_err(|e| e.to_string())?;
        ensure(act_matrix(&t, &a).ok() == Some(a.clone()), format!("twist fixes {a}"))?;
        let image = act(&w, &a).map_err(|e| e.to_string())?;
        let conj = m.mul(&t).mul(&m.inverse());
        ensure(
            classify_parabolic(&conj) == Parabolic::Twist { slope: image.clone(), power: k },
            format!("equivariance {w} {a}"),
        )?;
        ensure(image.parity().ok() == a.parity().ok(), format!("parity {w} {a}"))?;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{count} reduced words faithful, 2000 random round trips in {:.1}s", start.elapsed().as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("rabbit: PCF, hyperbolic, finite attractor", rabbit),
        ("z2i: (2,4,4) orbifold, √2 expansion, curves die", z2i_lattes),
        ("end analysis", ends),
        ("pullback agrees with the geometric oracle", oracle),
        ("monodromy relation, index, two-path lifts", monodromy),
        ("surjectivity and section orbit", surjectivity_and_section),
        ("orbit synthesis", orbit),
        ("properness iff trivial images", properness),
        ("lambda engine", lambda),
        ("curve algebra", algebra),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(note) => println!("PASS {:>2} {name}: {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
