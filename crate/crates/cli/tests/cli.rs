use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn thurston(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thurston")).args(args).env_remove("THURSTON_SEED").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn rabbit_attractor_is_finite_and_matches_the_fixture() {
    let out = thurston(&["slopes", "attractor", "--fixture", "rabbit"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "Finite");
    assert_eq!(r["verdict_match"], true);
    assert_eq!(r["artifacts"]["closure_certified"], true);
    assert_eq!(r["command"], "slopes attractor");
}

#[test]
fn z2i_has_an_obstructed_twist_family_at_one() {
    let out = thurston(&["corr", "ends", "--fixture", "z2i"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "ObstructedTwistFamily");
    let one = r["artifacts"]["entries"].as_array().unwrap().iter().find(|e| e["end"] == "1").unwrap().clone();
    let a = one["branch_derivative"][0].as_f64().unwrap();
    assert!((a + 0.25).abs() < 1e-9, "{a}");
}

#[test]
fn blowup_lambda_is_obstructed() {
    let r = report(&thurston(&["lambda", "verdict", "--fixture", "blowup-lambda"]));
    assert_eq!(r["verdict"], "Obstructed");
    assert_eq!(r["artifacts"]["matrix"]["entries"][0][0], "1/1");
    assert_eq!(r["verdict_match"], true);
}

#[test]
fn input_errors_exit_two() {
    let bad = scratch("malformed.toml", "schema = \"gmap-injective\"\nnum = [\n");
    let out = thurston(&["corr", "ends", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_eq!(thurston(&["corr", "ends", "--fixture", "nope"]).status.code(), Some(2));
    assert_eq!(thurston(&["corr", "ends"]).status.code(), Some(2));
    // A slope-plugin input cannot drive the monodromy commands.
    assert_eq!(thurston(&["mono", "table", "--fixture", "blowup-lattes"]).status.code(), Some(2));
}

#[test]
fn verdict_mismatch_exits_three() {
    let text = thurston_core::fixtures::fixture("rabbit")
        .unwrap()
        .text
        .replace("\"corr ends\" = \"NoFixedEnd\"", "\"corr ends\" = \"ObstructedTwistFamily\"");
    let p = scratch("rabbit-wrong.toml", &text);
    let out = thurston(&["corr", "ends", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r["verdict"], "NoFixedEnd");
    assert_eq!(r["verdict_match"], false);
}

#[test]
fn reports_are_byte_identical_and_carry_their_tolerances() {
    let args = ["slopes", "obstructed", "--fixture", "z2i", "--height", "6"];
    let a = thurston(&args);
    let b = thurston(&[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    for k in ["tol_res", "tol_sep", "max_iter"] {
        assert!(r["tolerances"].get(k).is_some(), "{k}");
    }
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
    assert_eq!(r["tool_version"], concat!("thurston ", env!("CARGO_PKG_VERSION")));
}

#[test]
fn seed_is_read_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_thurston"))
        .args(["mono", "table", "--fixture", "rabbit"])
        .env("THURSTON_SEED", "17")
        .output()
        .unwrap();
    let r = report(&out);
    assert_eq!(r["seed"], 17);
    assert_eq!(r["verdict"], "Transitive");
    let bad = Command::new(env!("CARGO_BIN_EXE_thurston"))
        .args(["mono", "table", "--fixture", "rabbit"])
        .env("THURSTON_SEED", "seventeen")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn command_outputs_on_the_built_in_fixtures() {
    let verdict = |args: &[&str]| report(&thurston(args))["verdict"].as_str().unwrap().to_string();
    assert_eq!(verdict(&["mono", "subgroup", "--fixture", "constant-quartic"]), "2");
    assert_eq!(verdict(&["corr", "properness", "--fixture", "constant-quartic"]), "Constant");
    assert_eq!(verdict(&["corr", "pcf", "--fixture", "rabbit"]), "JuliaSetIsCompactInvariant");
    assert_eq!(verdict(&["phi", "surjective", "--fixture", "z2i"]), "1");
    assert_eq!(verdict(&["phi", "eval", "--word", "y", "--fixture", "z2i"]), "NotInDomain");
    assert_eq!(verdict(&["slopes", "pullback", "--slope", "-1/2", "--fixture", "z2i"]), "3/2");
    assert_eq!(verdict(&["slopes", "attractor", "--fixture", "blowup-lattes"]), "Horizon");
    assert_eq!(verdict(&["lambda", "orbifold", "--fixture", "blowup-lambda"]), "Hyperbolic");
}

#[test]
fn floats_print_with_seventeen_significant_digits() {
    let out = thurston(&["corr", "ends", "--fixture", "z2i"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-2.5000000000000000e-1"));
}
