mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thurston_core::correspondence::orbit::{max_residual, ORBIT_TOL};
use thurston_core::correspondence::{
    constant_model_report, end_dynamics, euclidean_expansion_certificate, orbit_verify, pcf_hyperbolic_check,
    synthesize_orbit, x_properness, GMapModel, GMapSpec, ModelKind,
};
use thurston_core::curve::FreeWord;
use thurston_core::fixtures::{fixture, Config, FixtureKind};
use thurston_core::lambda::spectral::CERTIFIED_WIDTH;
use thurston_core::lambda::{
    build_lambda, invariance_check, kernel_columns, orbifold_signature, spectral_radius, thurston_verdict,
    InvarianceStatus, OrbifoldSignature, Portrait, PullbackSpec, Verdict,
};
use thurston_core::monodromy::{build_recursion, hf_subgroup, monodromy_table, stallings_index};
use thurston_core::numeric::NumOptions;
use thurston_core::scalar::FieldScalar;
use thurston_core::slopes::{
    fga_search, kernel_search, obstructed_twist_search, AttractorVerdict, PluginSlopeMap, SlopeError, SlopeMap,
    VirtualEndo,
};
use thurston_core::Slope;

type Failure = Box<dyn std::error::Error + Send + Sync>;

const SEED_VAR: &str = "THURSTON_SEED";

#[derive(Parser)]
#[command(name = "thurston", version, about = "Pullback invariants of Thurston maps, reported as JSON")]
struct Cli {
    #[command(subcommand)]
    group: Group,
    /// Built-in fixture name (see `--fixture help` errors for the list).
    #[arg(long, global = true, conflicts_with = "config")]
    fixture: Option<String>,
    /// TOML input file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for the parallel searches.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true)]
    tol_res: Option<f64>,
    #[arg(long, global = true)]
    tol_sep: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
}

#[derive(Subcommand)]
enum Group {
    /// Thurston linear transformation of a declared pullback.
    #[command(subcommand)]
    Lambda(LambdaCmd),
    /// The moduli-space correspondence of a g-map.
    #[command(subcommand)]
    Corr(CorrCmd),
    /// Monodromy of the cover and its wreath recursion.
    #[command(subcommand)]
    Mono(MonoCmd),
    /// The virtual endomorphism.
    #[command(subcommand)]
    Phi(PhiCmd),
    /// The pullback map on slopes.
    #[command(subcommand)]
    Slopes(SlopesCmd),
}

#[derive(Subcommand)]
enum LambdaCmd {
    Build,
    Verdict,
    Orbifold,
}

#[derive(Subcommand)]
enum CorrCmd {
    Ends,
    Pcf {
        #[arg(long, default_value_t = thurston_core::correspondence::pcf::DEFAULT_PCF_BOUND)]
        bound: usize,
    },
    Properness,
    Orbit {
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.02])]
        eps: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum MonoCmd {
    Table,
    Wreath,
    Subgroup,
}

#[derive(Subcommand)]
enum PhiCmd {
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    Kernel {
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    Surjective,
}

#[derive(Subcommand)]
enum SlopesCmd {
    Pullback {
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    Attractor {
        #[arg(long, default_value_t = 20)]
        height: i64,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    Obstructed {
        #[arg(long, default_value_t = 10)]
        height: i64,
    },
    Section {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        search_height: i64,
    },
}

/// What a command produced, before the envelope is added.
struct Outcome {
    verdict: String,
    parameters: Value,
    artifacts: Value,
    extra_tolerances: Vec<(&'static str, Value)>,
}

impl Outcome {
    fn new(verdict: impl Into<String>, artifacts: Value) -> Self {
        Outcome { verdict: verdict.into(), parameters: json!({}), artifacts, extra_tolerances: vec![] }
    }

    fn params(mut self, p: Value) -> Self {
        self.parameters = p;
        self
    }

    fn tol(mut self, name: &'static str, v: f64) -> Self {
        self.extra_tolerances.push((name, json!(v)));
        self
    }
}

struct Ctx {
    config: Config,
    opts: NumOptions,
    seed: u64,
}

impl Ctx {
    fn model(&self) -> Result<GMapModel, Failure> {
        match self.config.kind {
            FixtureKind::GmapInjective | FixtureKind::GmapConstant => {
                Ok(GMapSpec::from_toml(&self.config.text)?.build(&self.opts)?)
            }
            other => Err(format!("this command needs a g-map input, got {other}").into()),
        }
    }

    fn endo(&self) -> Result<(GMapModel, VirtualEndo), Failure> {
        let model = self.model()?;
        let ve = VirtualEndo::new(&model, self.seed)?;
        Ok((model, ve))
    }

    fn lambda_spec(&self) -> Result<PullbackSpec, Failure> {
        if self.config.kind != FixtureKind::LambdaSpec {
            return Err(format!("this command needs a lambda-spec input, got {}", self.config.kind).into());
        }
        Ok(PullbackSpec::from_toml(&self.config.text)?)
    }

    fn portrait(&self) -> Result<Portrait, Failure> {
        #[derive(Deserialize)]
        struct Holder {
            portrait: Option<Portrait>,
        }
        let h: Holder = toml::from_str(&self.config.text)?;
        let p = h.portrait.ok_or("input has no [portrait] table")?;
        p.validate()?;
        Ok(p)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Name of a unit variant or the `tag` field of an internally tagged enum.
fn variant<T: Serialize>(v: &T, tag: &str) -> String {
    match to_value(v) {
        Value::String(s) => s,
        Value::Object(m) => m.get(tag).and_then(Value::as_str).unwrap_or("?").to_string(),
        other => other.to_string(),
    }
}

fn orbifold_class(sig: &OrbifoldSignature) -> &'static str {
    use std::cmp::Ordering::*;
    match sig.euler.numer().sign().cmp(&num_bigint::Sign::NoSign) {
        Less => "Hyperbolic",
        Equal => "Euclidean",
        Greater => "Spherical",
    }
}

fn run_lambda(ctx: &Ctx, cmd: &LambdaCmd) -> Result<Outcome, Failure> {
    let matrix_json = |spec: &PullbackSpec| -> Result<Value, Failure> {
        let m = build_lambda::<BigRational>(spec)?;
        let entries: Vec<Vec<String>> =
            m.entries.iter().map(|r| r.iter().map(FieldScalar::to_exact_string).collect()).collect();
        Ok(json!({ "rows": m.rows, "cols": m.cols, "entries": entries }))
    };
    Ok(match cmd {
        LambdaCmd::Build => {
            let spec = ctx.lambda_spec()?;
            let m = build_lambda::<BigRational>(&spec)?;
            let inv = invariance_check(&spec);
            Outcome::new(
                match inv {
                    InvarianceStatus::CompletelyInvariant => "CompletelyInvariant",
                    InvarianceStatus::Invariant => "Invariant",
                    InvarianceStatus::Neither { .. } => "Neither",
                },
                json!({ "matrix": matrix_json(&spec)?, "invariance": to_value(&inv), "kernel_columns": kernel_columns(&m) }),
            )
        }
        LambdaCmd::Verdict => {
            let spec = ctx.lambda_spec()?;
            let m = build_lambda::<BigRational>(&spec)?;
            let sig = orbifold_signature(&ctx.portrait()?)?;
            let sr = spectral_radius(&m)?;
            let v = thurston_verdict(&m, &sig)?;
            let name = match v {
                Verdict::Obstructed { .. } => "Obstructed",
                Verdict::Unobstructed { .. } => "Unobstructed",
            };
            Outcome::new(
                name,
                json!({
                    "matrix": matrix_json(&spec)?,
                    "spectral_radius": to_value(&sr),
                    "thurston": to_value(&v),
                    "orbifold": to_value(&sig),
                }),
            )
            .tol("spectral_width", CERTIFIED_WIDTH)
        }
        LambdaCmd::Orbifold => {
            let sig = orbifold_signature(&ctx.portrait()?)?;
            Outcome::new(orbifold_class(&sig), json!({ "orbifold": to_value(&sig) }))
        }
    })
}

fn run_corr(ctx: &Ctx, cmd: &CorrCmd) -> Result<Outcome, Failure> {
    let model = ctx.model()?;
    Ok(match cmd {
        CorrCmd::Ends => {
            let r = end_dynamics(&model)?;
            Outcome::new(variant(&r.summary, "summary"), to_value(&r))
        }
        CorrCmd::Pcf { bound } => {
            let r = pcf_hyperbolic_check(&model.g, *bound, ctx.opts.tol_sep)?;
            let mut art = json!({ "pcf": to_value(&r) });
            if let Some(p) = &r.portrait {
                let sig = orbifold_signature(p)?;
                if orbifold_class(&sig) == "Euclidean" {
                    art["expansion"] = to_value(&euclidean_expansion_certificate(&model.g, ctx.opts.tol_sep)?);
                }
                art["orbifold"] = to_value(&sig);
            }
            Outcome::new(variant(&r.verdict, "verdict"), art).params(json!({ "bound": bound }))
        }
        CorrCmd::Properness => {
            if let ModelKind::XConstant { .. } = model.kind {
                let r = constant_model_report(&model)?;
                Outcome::new("Constant", to_value(&r))
            } else {
                let r = x_properness(&model)?;
                Outcome::new(variant(&r, "verdict"), to_value(&r))
            }
        }
        CorrCmd::Orbit { delta, eps } => {
            let orbit = synthesize_orbit(&model, *delta, eps)?;
            let ok = orbit_verify(&model, &orbit);
            Outcome::new(
                if ok { "Verified" } else { "Unverified" },
                json!({ "orbit": to_value(&orbit), "max_residual": max_residual(&model, &orbit) }),
            )
            .params(json!({ "delta": delta, "epsilons": eps }))
            .tol("orbit_residual", ORBIT_TOL)
        }
    })
}

fn run_mono(ctx: &Ctx, cmd: &MonoCmd) -> Result<Outcome, Failure> {
    let model = ctx.model()?;
    Ok(match cmd {
        MonoCmd::Table => {
            let t = monodromy_table(&model, ctx.seed)?;
            let r = t.report();
            Outcome::new(if r.transitive { "Transitive" } else { "Intransitive" }, to_value(&r))
        }
        MonoCmd::Wreath => {
            let (table, rec) = build_recursion(&model, ctx.seed)?;
            let check = rec.check_cycle_invariant(&model, &table);
            Outcome::new(
                if check.is_ok() { "Consistent" } else { "Inconsistent" },
                json!({
                    "recursion": to_value(&rec),
                    "cycle_products": to_value(&rec.cycle_products(&table.star)),
                    "failure": check.err(),
                }),
            )
        }
        MonoCmd::Subgroup => {
            let t = monodromy_table(&model, ctx.seed)?;
            let h = hf_subgroup(&t.rho_x, &t.rho_y, t.basepoint_sheet);
            let stallings = stallings_index(&h.generators);
            Outcome::new(h.index.to_string(), json!({ "subgroup": to_value(&h), "stallings_index": stallings }))
        }
    })
}

fn run_phi(ctx: &Ctx, cmd: &PhiCmd) -> Result<Outcome, Failure> {
    let (_, ve) = ctx.endo()?;
    Ok(match cmd {
        PhiCmd::Eval { word } => {
            let w: FreeWord = word.parse()?;
            let params = json!({ "word": w.to_string() });
            match ve.phi_eval(&w) {
                Ok(img) => Outcome::new(img.to_string(), json!({ "image": img.to_string(), "length": img.len() })),
                Err(SlopeError::NotInDomain { k, .. }) => Outcome::new("NotInDomain", json!({ "domain_power": k })),
                Err(e) => return Err(e.into()),
            }
            .params(params)
        }
        PhiCmd::Kernel { bound } => {
            let k = kernel_search(&ve, *bound);
            Outcome::new(if k.is_empty() { "Trivial" } else { "Nontrivial" }, json!({ "witnesses": to_value(&k) }))
                .params(json!({ "bound": bound }))
        }
        PhiCmd::Surjective => {
            let index = ve.surjectivity_check();
            let ratio = ve.contraction_ratio_estimate(64, 4, ctx.seed);
            Outcome::new(
                index.map_or("Infinite".to_string(), |i| i.to_string()),
                json!({ "index": index, "images": to_value(&ve.generator_images), "contraction_ratio": ratio }),
            )
        }
    })
}

enum Map {
    Endo(Box<GMapModel>, Box<VirtualEndo>),
    Plugin(PluginSlopeMap),
}

impl Map {
    fn slope_map(&self) -> &dyn SlopeMap {
        match self {
            Map::Endo(_, ve) => ve.as_ref(),
            Map::Plugin(p) => p,
        }
    }
}

fn run_slopes(ctx: &Ctx, cmd: &SlopesCmd) -> Result<Outcome, Failure> {
    let map = match ctx.config.kind {
        FixtureKind::SlopePlugin => Map::Plugin(PluginSlopeMap::from_toml(&ctx.config.text)?),
        _ => {
            let (m, ve) = ctx.endo()?;
            Map::Endo(Box::new(m), Box::new(ve))
        }
    };
    Ok(match cmd {
        SlopesCmd::Pullback { slope } => {
            let s: Slope = slope.parse()?;
            let r = map.slope_map().pullback(&s)?;
            Outcome::new(r.image.to_string(), to_value(&r)).params(json!({ "slope": s.to_string() }))
        }
        SlopesCmd::Attractor { height, depth } => {
            let r = fga_search(map.slope_map(), *height, *depth)?;
            let name = match r.verdict {
                AttractorVerdict::Finite { .. } => "Finite",
                AttractorVerdict::Horizon { .. } => "Horizon",
            };
            Outcome::new(name, to_value(&r)).params(json!({ "height": height, "depth": depth }))
        }
        SlopesCmd::Obstructed { height } => {
            let mut r = obstructed_twist_search(map.slope_map(), *height)?;
            if let Map::Endo(model, ve) = &map {
                r.cross_validate(&end_dynamics(model)?, &ve.table.generator_ends);
            }
            Outcome::new(if r.witnesses.is_empty() { "NoWitnesses" } else { "Witnesses" }, to_value(&r))
                .params(json!({ "height": height }))
        }
        SlopesCmd::Section { n, search_height } => {
            let Map::Endo(_, ve) = &map else { return Err("section needs a g-map input".into()) };
            let params = json!({ "n": n, "search_height": search_height });
            match ve.section_orbit(*n, *search_height) {
                Ok(o) => {
                    let ok = o.chain_certified && o.distinct && o.same_parity;
                    Outcome::new(if ok { "Certified" } else { "Uncertified" }, to_value(&o))
                }
                Err(SlopeError::NoSection(reason)) => Outcome::new("NoSection", json!({ "reason": reason })),
                Err(e) => return Err(e.into()),
            }
            .params(params)
        }
    })
}

fn command_name(g: &Group) -> String {
    let (a, b) = match g {
        Group::Lambda(c) => (
            "lambda",
            match c {
                LambdaCmd::Build => "build",
                LambdaCmd::Verdict => "verdict",
                LambdaCmd::Orbifold => "orbifold",
            },
        ),
        Group::Corr(c) => (
            "corr",
            match c {
                CorrCmd::Ends => "ends",
                CorrCmd::Pcf { .. } => "pcf",
                CorrCmd::Properness => "properness",
                CorrCmd::Orbit { .. } => "orbit",
            },
        ),
        Group::Mono(c) => (
            "mono",
            match c {
                MonoCmd::Table => "table",
                MonoCmd::Wreath => "wreath",
                MonoCmd::Subgroup => "subgroup",
            },
        ),
        Group::Phi(c) => (
            "phi",
            match c {
                PhiCmd::Eval { .. } => "eval",
                PhiCmd::Kernel { .. } => "kernel",
                PhiCmd::Surjective => "surjective",
            },
        ),
        Group::Slopes(c) => (
            "slopes",
            match c {
                SlopesCmd::Pullback { .. } => "pullback",
                SlopesCmd::Attractor { .. } => "attractor",
                SlopesCmd::Obstructed { .. } => "obstructed",
                SlopesCmd::Section { .. } => "section",
            },
        ),
    };
    format!("{a} {b}")
}

fn load(cli: &Cli) -> Result<(Value, Config), Failure> {
    match (&cli.fixture, &cli.config) {
        (Some(name), _) => Ok((json!({ "fixture": name }), fixture(name)?.config()?)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok((json!({ "config": path.display().to_string() }), Config::parse(&text)?))
        }
        (None, None) => Err("one of --fixture or --config is required".into()),
    }
}

fn seed() -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| format!("{SEED_VAR} must be an unsigned integer, got {s:?}").into()),
        Err(_) => Ok(0),
    }
}

/// Builds the report; the flag says whether the expected verdict (if any) matched.
fn run(cli: &Cli) -> Result<(Value, bool), Failure> {
    let (input, config) = load(cli)?;
    let mut opts = NumOptions::default();
    opts.tol_res = cli.tol_res.unwrap_or(opts.tol_res);
    opts.tol_sep = cli.tol_sep.unwrap_or(opts.tol_sep);
    opts.max_iter = cli.max_iter.unwrap_or(opts.max_iter);
    let ctx = Ctx { config, opts, seed: seed()? };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build()?;
    let outcome = pool.install(|| match &cli.group {
        Group::Lambda(c) => run_lambda(&ctx, c),
        Group::Corr(c) => run_corr(&ctx, c),
        Group::Mono(c) => run_mono(&ctx, c),
        Group::Phi(c) => run_phi(&ctx, c),
        Group::Slopes(c) => run_slopes(&ctx, c),
    })?;

    let command = command_name(&cli.group);
    let mut tolerances =
        json!({ "tol_res": ctx.opts.tol_res, "tol_sep": ctx.opts.tol_sep, "max_iter": ctx.opts.max_iter });
    for (k, v) in outcome.extra_tolerances {
        tolerances[k] = v;
    }
    let mut hasher = Sha256::new();
    for part in [
        command.as_str(),
        &ctx.config.text,
        &outcome.parameters.to_string(),
        &tolerances.to_string(),
        &ctx.seed.to_string(),
    ] {
        hasher.update(part.as_bytes());
        hasher.update([0]);
    }
    let digest: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let expected = ctx.config.expected.get(&command).cloned();
    let matched = expected.as_ref().is_none_or(|e| *e == outcome.verdict);
    let report = json!({
        "command": command,
        "input": input,
        "inputs_digest": digest,
        "parameters": outcome.parameters,
        "seed": ctx.seed,
        "tolerances": tolerances,
        "tool_version": concat!("thurston ", env!("CARGO_PKG_VERSION")),
        "verdict": outcome.verdict,
        "expected_verdict": expected,
        "verdict_match": ctx.config.expected.contains_key(&command).then_some(matched),
        "artifacts": outcome.artifacts,
    });
    Ok((report, matched))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, matched)) => {
            print!("{}", report::to_canonical(&report));
            if matched {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("thurston: {e}");
            ExitCode::from(2)
        }
    }
}
