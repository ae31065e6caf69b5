//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output; exits nonzero on any FAIL.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use isoperim::cli;
use isoperim::inequalities::{
    ri_sobolev, strichartz_check, uncertainty_additive, uncertainty_multiplicative, uncertainty_norms,
    InequalityReport, Normalization, Settings, TestFunction,
};
use isoperim::profiles::Profile;
use isoperim::rearrange::RiNorm;
use isoperim::spaces::{build_space, Field, SampleSpace, SpaceSpec};
use isoperim::suites::{catalog, run_cases, Context};
use isoperim::weights::{isoperimetric_constant, LevelOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn context() -> Context {
    Context::new(Settings::default(), 0, 256).expect("context")
}

fn run_ids(ctx: &Context, prefixes: &[&str]) -> Vec<InequalityReport> {
    let cases: Vec<_> = catalog().into_iter().filter(|c| prefixes.contains(&c.id.as_str())).collect();
    assert_eq!(cases.len(), prefixes.len(), "unknown case in {prefixes:?}");
    run_cases(ctx, &cases)
}

fn norm_field(space: &SampleSpace) -> Field {
    Field::from_fn(space, |x| x.iter().map(|c| c * c).sum::<f64>().sqrt())
}

fn disk() -> SampleSpace {
    build_space(&SpaceSpec::EuclideanDisk { radius: 4.0, resolution: 128 }).expect("disk")
}

fn tent() -> TestFunction {
    TestFunction::tent(vec![0.0, 0.0], 1.0).normalized(Normalization::CompactSupport)
}

fn rel(got: f64, expected: f64) -> f64 {
    (got - expected).abs() / expected.abs()
}

fn c1_weight_constant() -> Outcome {
    let space = build_space(&SpaceSpec::EuclideanBox { n: 2, halfwidth: 4.0, resolution: 256, bounded: false })
        .expect("plane");
    let profile = space.natural_profile().expect("profile");
    let est = isoperimetric_constant(&space, &norm_field(&space), &profile, &LevelOptions::default()).expect("C");
    outcome(rel(est.value, 0.5) <= 0.05, format!("C(|x|) = {:.5} (oracle 0.5, tol 5%)", est.value))
}

fn c2_cross_check() -> Outcome {
    let ctx = context();
    let reps = run_ids(
        &ctx,
        &[
            "weights.cross_check_norm",
            "weights.cross_check_prototypes_plane",
            "weights.cross_check_prototypes_sphere2",
            "weights.cross_check_prototypes_gauss",
        ],
    );
    let worst = reps.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let ok = reps.len() == 61 && reps.iter().all(|r| r.pass && r.error.is_none());
    outcome(ok && worst <= 0.02, format!("{} weights, max |C - M|/M = {worst:.2e} (tol 2%)", reps.len()))
}

fn c3_sphere_profile() -> Outcome {
    let p = Profile::sphere(2).expect("sphere");
    let err = (1..=512)
        .map(|i| {
            let t = i as f64 / 513.0;
            (p.value(t) - (t * (1.0 - t)).sqrt()).abs()
        })
        .fold(0.0, f64::max);
    outcome(err <= 1e-6, format!("max |I(t) - sqrt(t(1-t))| = {err:.2e} on 512 points (tol 1e-6)"))
}

fn c4_gaussian_profile() -> Outcome {
    let p = Profile::gaussian();
    let mid = (p.value(0.5) - 1.0 / (2.0 * PI).sqrt()).abs();
    let sym = (1..1000)
        .map(|i| {
            let t = i as f64 / 1000.0;
            (p.value(t) - p.value(1.0 - t)).abs()
        })
        .fold(0.0, f64::max);
    outcome(mid <= 1e-8 && sym <= 1e-9, format!("|I(1/2) - 1/sqrt(2pi)| = {mid:.2e}, symmetry defect {sym:.2e}"))
}

fn c5_local_poincare() -> Outcome {
    let ctx = context();
    let reps = run_ids(&ctx, &["sobolev.poincare_sphere", "sobolev.poincare_gauss"]);
    let worst = reps.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let failures = reps.iter().filter(|r| !r.pass || r.ratio > 1.05).count();
    outcome(
        reps.len() >= 20 && failures == 0,
        format!("{} (f, A) pairs, max ratio {worst:.4}, {failures} failures", reps.len()),
    )
}

fn c6_coarea() -> Outcome {
    let ctx = context();
    let families = ["sobolev.coarea_sphere", "sobolev.coarea_gauss", "sobolev.coarea_log_concave", "sobolev.coarea_disk"];
    let mut ok = true;
    let mut parts = Vec::new();
    for id in families {
        let reps = run_ids(&ctx, &[id]);
        let worst = reps.iter().map(|r| r.ratio).fold(0.0, f64::max);
        ok &= reps.len() >= 10 && worst <= 1.05 && reps.iter().all(|r| r.pass);
        parts.push(format!("{}: {} fns max {worst:.4}", id.trim_start_matches("sobolev.coarea_"), reps.len()));
    }
    let tent = &run_ids(&ctx, &["sobolev.coarea_tent_equality"])[0];
    let exact = rel(tent.lhs, PI) <= 1e-9 && rel(tent.rhs, PI) <= 1e-9;
    ok &= tent.ratio >= 0.95 && tent.ratio <= 1.0 + 1e-9 && exact;
    outcome(ok, format!("{}; tent equality ratio {:.12}", parts.join(", "), tent.ratio))
}

fn c7_uncertainty() -> Outcome {
    let space = disk();
    let profile = space.natural_profile().expect("profile");
    let w = norm_field(&space);
    let s = Settings::default();
    let n = uncertainty_norms(&space, &profile, &w, &tent(), 1.0, 1.0, &s).expect("norms");
    let triple = [(n.f, PI / 3.0), (n.gradient, PI), (n.weighted, PI / 6.0)];
    let triple_ok = triple.iter().all(|(g, e)| rel(*g, *e) <= 0.02);
    let closed_form = PI / 3.0 <= PI / 6f64.sqrt();
    let mult = uncertainty_multiplicative(&space, &profile, &w, &tent(), 1.0, 1.0, &s).expect("multiplicative");
    let add = uncertainty_additive(&space, &profile, &w, &tent(), 1.0, 1.0, None, &s).expect("additive");
    let curve_ok = add.curve.len() == 256 && add.curve.iter().all(|c| c.ratio <= 1.0);
    let p2 = uncertainty_additive(&space, &profile, &w, &tent(), 2.0, 1.0, None, &s).expect("p = 2");
    let n2 = uncertainty_norms(&space, &profile, &w, &tent(), 2.0, 1.0, &s).expect("norms p = 2");
    let d_ok = rel(n2.k1, 5.0 * n2.c_iso) <= 1e-12;
    let ok = triple_ok && closed_form && mult.pass && mult.lhs <= mult.rhs && curve_ok && p2.pass && d_ok;
    outcome(
        ok,
        format!(
            "triple ({:.4}, {:.4}, {:.4}); multiplicative {:.4} <= {:.4}; additive curve {} rows max ratio {:.3}; p=2 ratio {:.3}",
            n.f,
            n.gradient,
            n.weighted,
            mult.lhs,
            mult.rhs,
            add.curve.len(),
            add.ratio,
            p2.ratio
        ),
    )
}

fn c8_rearrangement() -> Outcome {
    let ctx = context();
    let reps = run_ids(&ctx, &["rearrangement.sort_vs_inversion", "rearrangement.hardy_littlewood"]);
    let ok = reps.iter().all(|r| r.pass);
    outcome(
        ok,
        format!("sort vs inversion max gap {:.1e}; Hardy-Littlewood max excess {:.1e}", reps[0].lhs, reps[1].lhs),
    )
}

fn c9_ri_sobolev() -> Outcome {
    let space = disk();
    let profile = space.natural_profile().expect("profile");
    let r = ri_sobolev(&space, &profile, &RiNorm::Lp(1.0), &tent(), &Settings::default()).expect("sobolev");
    let ok = rel(r.lhs, 2.0 * PI) <= 0.02 && rel(r.rhs, 2.0 * PI) <= 0.02 && r.constant_used == 2.0 && r.pass;
    outcome(ok, format!("lhs {:.6}, rhs {:.6} (oracle 2pi), operator norm {}", r.lhs, r.rhs, r.constant_used))
}

fn c10_strichartz() -> Outcome {
    let space = disk();
    let profile = space.natural_profile().expect("profile");
    let g = norm_field(&space).map(|x| 1.0 / x);
    let r = strichartz_check(&space, &profile, &RiNorm::Lp(1.0), &tent(), &g, &Settings::default()).expect("chain");
    let links_ok = r.links.len() == 3 && r.links.iter().all(|l| l.pass);
    let ok = links_ok && r.pass && r.ratio >= 0.95 && r.ratio <= 1.0 + 1e-9;
    let links: Vec<String> = r.links.iter().map(|l| format!("{} {:.4}", l.name, l.ratio)).collect();
    outcome(ok, format!("composite ratio {:.6}; links [{}]", r.ratio, links.join(", ")))
}

fn c11_transference() -> Outcome {
    let ctx = context();
    let mono = run_ids(&ctx, &["transference.norm_monotonicity"]);
    let unc = run_ids(&ctx, &["transference.gaussian"]);
    let ok = mono.len() == 20 && mono.iter().all(|r| r.pass) && !unc.is_empty() && unc.iter().all(|r| r.pass);
    let worst = unc.iter().map(|r| r.ratio).fold(0.0, f64::max);
    outcome(ok, format!("{} monotonicity fields exact; uncertainty with 0.9 I: max ratio {worst:.4}", mono.len()))
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |jobs: &str| -> (i32, Vec<u8>) {
        let out = dir.path().join(format!("jobs{jobs}"));
        let out_s = out.to_string_lossy().into_owned();
        let argv = ["isoperim", "verify", "--suite", "all", "--seed", "42", "--jobs", jobs, "--out", &out_s];
        let code = cli::execute(argv);
        (code, std::fs::read(out.join("report.json")).unwrap_or_default())
    };
    let (c1, a) = run("1");
    let (c8, b) = run("8");
    let ok = c1 == 0 && c8 == 0 && !a.is_empty() && a == b;
    outcome(ok, format!("exit codes {c1}/{c8}; report.json {} bytes, identical: {}", a.len(), a == b))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 12] = [
        ("weight constant C(|x|) on the plane", c1_weight_constant, Duration::from_secs(30)),
        ("level-set constant vs Marcinkiewicz norm", c2_cross_check, Duration::from_secs(120)),
        ("sphere profile closed form", c3_sphere_profile, Duration::from_secs(5)),
        ("Gaussian profile midpoint and symmetry", c4_gaussian_profile, Duration::from_secs(5)),
        ("localized Poincare", c5_local_poincare, Duration::from_secs(60)),
        ("coarea inequality", c6_coarea, Duration::from_secs(60)),
        ("uncertainty inequalities", c7_uncertainty, Duration::from_secs(60)),
        ("rearrangement oracles", c8_rearrangement, Duration::from_secs(30)),
        ("r.i. Sobolev equality witness", c9_ri_sobolev, Duration::from_secs(30)),
        ("Strichartz chain", c10_strichartz, Duration::from_secs(30)),
        ("transference", c11_transference, Duration::from_secs(60)),
        ("determinism across job counts", c12_determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
