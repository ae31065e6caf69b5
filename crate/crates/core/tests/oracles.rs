//! Closed-form values checked against independent evaluations.

use std::f64::consts::PI;

use isoperim::inequalities::{
    hardy_values, local_poincare, ri_sobolev, strichartz_check, uncertainty_multiplicative, uncertainty_norms,
    Normalization, Settings, TestFunction,
};
use isoperim::profiles::Profile;
use isoperim::rearrange::{RiNorm, StepFunction};
use isoperim::spaces::{build_space, Field, Region, SampleSpace, SpaceSpec};
use isoperim::weights::{isoperimetric_constant, marcinkiewicz_weight_norm, prototype_g, LevelOptions};
use statrs::function::erf::erf;

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

/// Midpoint rule for `∫_a^b f`.
fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

fn disk() -> SampleSpace {
    build_space(&SpaceSpec::EuclideanDisk { radius: 4.0, resolution: 128 }).unwrap()
}

fn norm(s: &SampleSpace, scale: f64) -> Field {
    Field::new((0..s.len()).map(|i| scale * s.distance_to(i, &[0.0, 0.0])).collect())
}

fn tent() -> TestFunction {
    TestFunction::tent(vec![0.0, 0.0], 1.0).normalized(Normalization::CompactSupport)
}

#[test]
fn truncated_gaussian_mass() {
    let s = build_space(&SpaceSpec::LogConcave { p: 2.0, n: 1, resolution: 4096, truncation: Some(8.0) }).unwrap();
    let want = erf(8.0 / 2f64.sqrt());
    assert!((s.total_measure() - want).abs() <= 1e-6, "{}", s.total_measure());
}

#[test]
fn planar_perimeters() {
    let s = build_space(&SpaceSpec::EuclideanBox { n: 2, halfwidth: 4.0, resolution: 256, bounded: false }).unwrap();
    let disk = s.select(|x| x[0] * x[0] + x[1] * x[1] <= 1.0);
    let got = s.minkowski_content(&disk, &s.default_offsets()).unwrap().value;
    assert!(close(got, 2.0 * PI, 0.05), "disk {got}");
    let half = Region::HalfSpace { axis: 0, below: 0.0 }.mask(&s).unwrap();
    let got = s.minkowski_content(&half, &s.default_offsets()).unwrap().value;
    assert!(close(got, 8.0, 0.05), "half-plane {got}");
}

#[test]
fn gaussian_half_lines_have_density_perimeter() {
    let s = build_space(&SpaceSpec::LogConcave { p: 2.0, n: 1, resolution: 4096, truncation: None }).unwrap();
    let g = Profile::gaussian();
    for a in [-1.5, -0.5, 0.0, 1.0] {
        let mask = s.select(|x| x[0] <= a);
        let got = s.minkowski_content(&mask, &s.default_offsets()).unwrap().value;
        let density = (-a * a / 2.0).exp() / (2.0 * PI).sqrt();
        let mass = 0.5 * (1.0 + erf(a / 2f64.sqrt()));
        assert!(close(got, density, 0.05), "a={a}: {got} vs {density}");
        assert!(close(g.value(mass), density, 1e-6), "a={a}");
    }
}

#[test]
fn constants_of_radial_weights() {
    let s = disk();
    let p = Profile::euclidean(2).unwrap();
    let opts = LevelOptions::default();
    // {c|x| ≤ r} is a disk of radius r/c, so Φ(π(r/c)²)/r = 1/(2c).
    for c in [1.0, 2.0] {
        let w = norm(&s, c);
        let ci = isoperimetric_constant(&s, &w, &p, &opts).unwrap().value;
        let m = marcinkiewicz_weight_norm(&s, &w, &p, &opts).unwrap().value;
        assert!(close(ci, 0.5 / c, 0.05), "c={c}: {ci}");
        assert!(close(m, 0.5 / c, 0.05), "c={c}: {m}");
    }
}

#[test]
fn prototype_values() {
    let e = Profile::euclidean(2).unwrap();
    let g = prototype_g(&e, Some(100.0)).unwrap();
    for t in [0.01, 0.3, 2.0, 40.0] {
        assert!(close(g.eval(t), 2.0 * PI.sqrt() / t.sqrt(), 0.02), "t={t}: {}", g.eval(t));
    }
    let gauss = prototype_g(&Profile::gaussian(), None).unwrap();
    let want = (2.0 * 1e4f64.ln()).sqrt();
    assert!(close(gauss.eval(1e-4), want, 0.10), "{}", gauss.eval(1e-4));
}

#[test]
fn tent_norms_match_radial_integrals() {
    let s = disk();
    let p = Profile::euclidean(2).unwrap();
    let n = uncertainty_norms(&s, &p, &norm(&s, 1.0), &tent(), 1.0, 1.0, &Settings::default()).unwrap();
    let l1 = midpoint(|r| 2.0 * PI * r * (1.0 - r), 0.0, 1.0, 10_000);
    let grad = midpoint(|r| 2.0 * PI * r, 0.0, 1.0, 10_000);
    let weighted = midpoint(|r| 2.0 * PI * r * r * (1.0 - r), 0.0, 1.0, 10_000);
    assert!(close(n.f, l1, 0.02), "{} vs {l1}", n.f);
    assert!(close(n.gradient, grad, 0.02), "{} vs {grad}", n.gradient);
    assert!(close(n.weighted, weighted, 0.02), "{} vs {weighted}", n.weighted);
}

#[test]
fn multiplicative_tent_bound() {
    let s = disk();
    let p = Profile::euclidean(2).unwrap();
    let r = uncertainty_multiplicative(&s, &p, &norm(&s, 1.0), &tent(), 1.0, 1.0, &Settings::default()).unwrap();
    assert!(r.pass);
    assert!(close(r.lhs, PI / 3.0, 0.02), "{}", r.lhs);
    assert!(close(r.rhs, PI / 6f64.sqrt(), 0.05), "{}", r.rhs);
}

#[test]
fn tent_sobolev_and_strichartz_equalities() {
    let s = disk();
    let p = Profile::euclidean(2).unwrap();
    let set = Settings::default();
    // f*(t) = 1 - √(t/π): ∫₀^π f*(t) · 2√π t^{-1/2} dt.
    let lhs = midpoint(|t| (1.0 - (t / PI).sqrt()) * 2.0 * PI.sqrt() / t.sqrt(), 0.0, PI, 200_000);
    let r = ri_sobolev(&s, &p, &RiNorm::Lp(1.0), &tent(), &set).unwrap();
    assert!(r.pass);
    assert!(close(r.lhs, lhs, 0.02) && close(r.rhs, 2.0 * PI, 0.02), "{} {}", r.lhs, r.rhs);

    let g = norm(&s, 1.0).map(|x| 1.0 / x);
    let r = strichartz_check(&s, &p, &RiNorm::Lp(1.0), &tent(), &g, &set).unwrap();
    let fg = midpoint(|t| 2.0 * PI * (1.0 - t), 0.0, 1.0, 10_000);
    assert!(r.pass);
    assert!(close(r.lhs, fg, 0.02), "{}", r.lhs);
}

#[test]
fn hardy_operator_of_indicators() {
    let e = Profile::euclidean(2).unwrap();
    let f = StepFunction::indicator(1.0, 10.0).unwrap();
    let ts = [0.01, 0.2, 0.5, 0.9];
    for (t, q) in ts.iter().zip(hardy_values(&f, &e, &ts).unwrap()) {
        let want = 2.0 * (t.powf(-0.5) - 1.0);
        assert!(close(q, want, 1e-9), "t={t}: {q} vs {want}");
    }
    let c = Profile::sphere(1).unwrap();
    let f = StepFunction::indicator(0.5, 1.0).unwrap();
    let ts = [0.01, 0.2, 0.4, 0.49];
    for (t, q) in ts.iter().zip(hardy_values(&f, &c, &ts).unwrap()) {
        let want = (0.5 - t) / t;
        assert!((q - want).abs() <= 1e-9 * want.max(1.0), "t={t}: {q} vs {want}");
    }
}

#[test]
fn global_poincare_constant_on_the_sphere() {
    let s = build_space(&SpaceSpec::Sphere { n: 2, resolution: 128 }).unwrap();
    let p = Profile::sphere(2).unwrap();
    let r = local_poincare(&s, &p, &TestFunction::coordinate(2), &Region::All, &Settings::default()).unwrap();
    assert!(r.pass);
    // μ/(2 I(μ/2)) with I(1/2) = 1/2.
    assert!((r.constant_used - 1.0).abs() <= 1e-8, "{}", r.constant_used);
}
