use std::sync::OnceLock;

use proptest::prelude::*;

use isoperim::inequalities::{hardy_values, uncertainty_norms, Normalization, Settings, TestFunction};
use isoperim::profiles::Profile;
use isoperim::rearrange::{
    decreasing_rearrangement, distribution_function, median, product_partial_integral, rearrange_atoms, ri_norm,
    RiNorm, StepFunction,
};
use isoperim::spaces::{build_space, Field, Region, SampleSpace, SpaceSpec};
use isoperim::weights::{isoperimetric_constant, marcinkiewicz_weight_norm, LevelOptions};

fn circle() -> &'static SampleSpace {
    static S: OnceLock<SampleSpace> = OnceLock::new();
    S.get_or_init(|| build_space(&SpaceSpec::Sphere { n: 1, resolution: 48 }).unwrap())
}

fn sphere() -> &'static SampleSpace {
    static S: OnceLock<SampleSpace> = OnceLock::new();
    S.get_or_init(|| build_space(&SpaceSpec::Sphere { n: 2, resolution: 64 }).unwrap())
}

fn plane() -> &'static SampleSpace {
    static S: OnceLock<SampleSpace> = OnceLock::new();
    S.get_or_init(|| {
        build_space(&SpaceSpec::EuclideanBox { n: 2, halfwidth: 2.0, resolution: 64, bounded: false }).unwrap()
    })
}

fn line() -> &'static SampleSpace {
    static S: OnceLock<SampleSpace> = OnceLock::new();
    S.get_or_init(|| build_space(&SpaceSpec::LogConcave { p: 1.5, n: 1, resolution: 512, truncation: None }).unwrap())
}

fn spaces() -> [&'static SampleSpace; 4] {
    [circle(), sphere(), plane(), line()]
}

fn vals(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, len)
}

fn probes(end: f64) -> Vec<f64> {
    (1..64).map(|k| end * k as f64 / 64.0).collect()
}

fn profiles() -> Vec<Profile> {
    vec![
        Profile::euclidean(2).unwrap(),
        Profile::euclidean(3).unwrap(),
        Profile::half_plane(),
        Profile::sphere(1).unwrap(),
        Profile::sphere(2).unwrap(),
        Profile::sphere(3).unwrap(),
        Profile::log_concave(1.0).unwrap(),
        Profile::log_concave(1.5).unwrap(),
        Profile::gaussian(),
    ]
}

fn grid(end: f64) -> Vec<f64> {
    let end = if end.is_finite() { end } else { 4.0 };
    (1..512).map(|k| end * k as f64 / 512.0).collect()
}

#[test]
fn profiles_are_concave() {
    for p in profiles() {
        let ts = grid(p.domain_end());
        let v: Vec<f64> = ts.iter().map(|&t| p.value(t)).collect();
        for (k, w) in v.windows(3).enumerate() {
            let second = w[0] - 2.0 * w[1] + w[2];
            assert!(second <= 1e-10, "{} at t={}: {second:e}", p.label(), ts[k + 1]);
        }
    }
}

#[test]
fn finite_profiles_are_symmetric() {
    for p in profiles().into_iter().filter(Profile::is_finite) {
        let end = p.domain_end();
        for t in grid(end) {
            let (a, b) = (p.value(t), p.value(end - t));
            assert!((a - b).abs() <= 1e-9 * a.max(1e-300), "{} at {t}: {a} vs {b}", p.label());
        }
    }
}

#[test]
fn t_over_profile_is_nondecreasing() {
    for p in profiles() {
        let end = p.domain_end();
        let half = if end.is_finite() { end / 2.0 } else { 4.0 };
        let ts: Vec<f64> = (1..=512).map(|k| half * k as f64 / 512.0).collect();
        let q: Vec<f64> = ts.iter().map(|&t| t / p.value(t)).collect();
        for w in q.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-12), "{}: {} then {}", p.label(), w[0], w[1]);
        }
    }
}

#[test]
fn phi_is_nondecreasing() {
    for p in profiles() {
        let ts = grid(p.domain_end());
        for w in ts.windows(2) {
            assert!(p.phi(w[1]) >= p.phi(w[0]) * (1.0 - 1e-12), "{} at {}", p.label(), w[1]);
        }
    }
}

#[test]
fn gaussian_profile_approaches_its_asymptote() {
    let g = Profile::gaussian();
    let ratio = |t: f64| g.value(t) / (t * (2.0 * (1.0 / t).ln()).sqrt());
    let rs: Vec<f64> = [1e-4, 1e-10, 1e-30, 1e-100, 1e-250].iter().map(|&t| ratio(t)).collect();
    for w in rs.windows(2) {
        assert!(w[1] > w[0] && w[1] < 1.0, "{rs:?}");
    }
    assert!(rs[4] > 0.995, "{rs:?}");
}

#[test]
fn sphere_caps_have_the_expected_perimeter() {
    let s = build_space(&SpaceSpec::Sphere { n: 2, resolution: 256 }).unwrap();
    for r in [0.6, 1.0, 1.5, 2.2] {
        let mask = Region::Ball { center: vec![0.0, 0.0, 1.0], radius: r }.mask(&s).unwrap();
        let got = s.minkowski_content(&mask, &s.default_offsets()).unwrap().value;
        let want = r.sin() / 2.0;
        assert!((got / want - 1.0).abs() <= 0.05, "r={r}: {got} vs {want}");
    }
}

#[test]
fn lipschitz_gradients_stay_below_one() {
    let tests: [(&SampleSpace, usize); 4] = [(circle(), 48), (sphere(), 64), (plane(), 64), (line(), 512)];
    for (s, res) in tests {
        let c = s.point(s.len() / 3).to_vec();
        let f = Field::from_fn(s, |x| s.metric(x, &c));
        let g = s.gradient_modulus(&f).unwrap();
        let bound = 1.0 + 4.0 / res as f64;
        for (i, v) in g.values().iter().enumerate() {
            if !s.in_boundary_layer(i) {
                assert!(*v <= bound, "{} atom {i}: {v}", s.label());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_of_predicates_are_bounded(a in -2.0f64..2.0, b in -2.0f64..2.0, axis in 0usize..3) {
        for s in spaces() {
            let k = axis % s.dim();
            let m = s.measure_of(|x| x[k] >= a.min(b) && x[k] <= a.max(b));
            prop_assert!(m >= 0.0 && m <= s.discrete_measure() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ball_measure_is_superadditive(r in 0.01f64..5.0, t in 0.01f64..5.0, n in 1usize..4) {
        let s = build_space(&SpaceSpec::EuclideanBox { n, halfwidth: 1.0, resolution: 8, bounded: false }).unwrap();
        let (a, b, c) = (s.ball_measure(r).unwrap(), s.ball_measure(t).unwrap(), s.ball_measure(r + t).unwrap());
        prop_assert!(a + b <= c * (1.0 + 1e-12));
    }

    #[test]
    fn equimeasurable(v in vals(48)) {
        let s = circle();
        let f = Field::new(v.clone());
        let star = decreasing_rearrangement(s, &f).unwrap();
        let dist = distribution_function(s, &f).unwrap();
        prop_assert!(star.is_nonincreasing());
        for level in [0.0, 0.2, 0.7, 1.5, 2.0, 2.9] {
            let direct: f64 = v.iter().zip(s.weights()).filter(|(x, _)| x.abs() > level).map(|(_, w)| w).sum();
            prop_assert!((star.level_measure(level) - direct).abs() <= 1e-12);
            if level < star.values().first().copied().unwrap_or(0.0) {
                prop_assert!((dist.eval(level) - direct).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rearranging_atoms_preserves_integrals(pairs in prop::collection::vec((0.0f64..5.0, 0.01f64..1.0), 1..40)) {
        let (v, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let total: f64 = w.iter().sum();
        let star = rearrange_atoms(&v, &w, total);
        let direct: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        prop_assert!((star.integral_to(total) - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn rearrangement_of_a_sum(u in vals(48), v in vals(48)) {
        let s = circle();
        let (u, v) = (Field::new(u), Field::new(v));
        let us = decreasing_rearrangement(s, &u).unwrap();
        let vs = decreasing_rearrangement(s, &v).unwrap();
        let ws = decreasing_rearrangement(s, &u.zip_with(&v, |a, b| a + b)).unwrap();
        for t in probes(1.0) {
            prop_assert!(ws.eval(t) <= us.eval(t / 2.0) + vs.eval(t / 2.0) + 1e-12);
            let lhs = ws.maximal(t).unwrap();
            prop_assert!(lhs <= us.maximal(t).unwrap() + vs.maximal(t).unwrap() + 1e-12);
        }
    }

    #[test]
    fn product_rearrangement_inequality(u in vals(48), v in vals(48)) {
        let s = circle();
        let (u, v) = (Field::new(u), Field::new(v));
        for t in probes(1.0) {
            let (lhs, rhs) = product_partial_integral(s, &u, &v, t).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn norms_respect_domination(f in prop::collection::vec(0.0f64..1.0, 48), extra in prop::collection::vec(0.0f64..0.5, 48), shift in 0usize..48) {
        let s = circle();
        // A rotated copy of f plus a nonnegative bump dominates f in the sense
        // of partial integrals of rearrangements.
        let mut g: Vec<f64> = f.iter().zip(&extra).map(|(a, b)| a + b).collect();
        g.rotate_left(shift);
        let fs = decreasing_rearrangement(s, &Field::new(f)).unwrap();
        let gs = decreasing_rearrangement(s, &Field::new(g)).unwrap();
        let prof = Profile::sphere(1).unwrap();
        for n in [RiNorm::Lp(1.0), RiNorm::Lp(2.0), RiNorm::Lorentz { p: 2.0, q: 1.0 }, RiNorm::Marcinkiewicz(prof)] {
            prop_assert!(ri_norm(&fs, &n).unwrap() <= ri_norm(&gs, &n).unwrap() * (1.0 + 1e-10));
        }
    }

    #[test]
    fn median_is_bounded_by_the_mean_modulus(a in 0.1f64..3.0, c in -2.0f64..2.0, q in -1.0f64..1.0) {
        for s in [circle(), sphere(), line()] {
            let f = Field::from_fn(s, |x| a * x[0] + q * x[x.len() - 1].powi(2) + c);
            let m = median(s, &f).unwrap();
            let l1 = s.lp_norm(f.values(), 1.0);
            prop_assert!(m.abs() <= 2.0 * l1 / s.discrete_measure() + 1e-12, "{}: {m} vs {l1}", s.label());
        }
    }

    #[test]
    fn pointwise_larger_weights_have_smaller_constants(scale in 0.2f64..3.0, power in 0.5f64..2.0, bump in prop::collection::vec(0.0f64..1.0, 48)) {
        let s = circle();
        let prof = Profile::sphere(1).unwrap();
        let o = [0.0, 1.0];
        let w1 = Field::new((0..s.len()).map(|i| scale * s.distance_to(i, &o).powf(power) + 0.05).collect());
        let w2 = w1.zip_with(&Field::new(bump), |a, b| a + b);
        let opts = LevelOptions::exact();
        let c1 = isoperimetric_constant(s, &w1, &prof, &opts).unwrap().value;
        let c2 = isoperimetric_constant(s, &w2, &prof, &opts).unwrap().value;
        prop_assert!(c2 <= c1 * (1.0 + 1e-12));
        let m1 = marcinkiewicz_weight_norm(s, &w1, &prof, &opts).unwrap().value;
        let m2 = marcinkiewicz_weight_norm(s, &w2, &prof, &opts).unwrap().value;
        prop_assert!(m2 <= m1 * (1.0 + 1e-12));
    }

    #[test]
    fn level_and_rearrangement_constants_agree(scale in 0.2f64..3.0, power in 0.5f64..2.0, offset in 0.01f64..0.5) {
        let s = sphere();
        let prof = Profile::sphere(2).unwrap();
        let o = [0.0, 0.0, 1.0];
        let w = Field::new((0..s.len()).map(|i| scale * s.distance_to(i, &o).powf(power) + offset).collect());
        let opts = LevelOptions::default();
        let c = isoperimetric_constant(s, &w, &prof, &opts).unwrap().value;
        let m = marcinkiewicz_weight_norm(s, &w, &prof, &opts).unwrap().value;
        prop_assert!((c - m).abs() <= 0.02 * m, "{c} vs {m}");
    }

    #[test]
    fn hardy_operator_is_linear_and_positive(
        cells in prop::collection::vec((0.001f64..0.05, 0.0f64..2.0, 0.0f64..2.0), 1..10),
        a in 0.0f64..3.0,
        b in 0.0f64..3.0,
    ) {
        let prof = Profile::sphere(2).unwrap();
        let mut breaks = vec![0.0];
        for (len, ..) in &cells {
            breaks.push(breaks.last().unwrap() + len);
        }
        let fv: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let gv: Vec<f64> = cells.iter().map(|c| c.2).collect();
        let hv: Vec<f64> = fv.iter().zip(&gv).map(|(x, y)| a * x + b * y).collect();
        let f = StepFunction::new(breaks.clone(), fv, 1.0).unwrap();
        let g = StepFunction::new(breaks.clone(), gv, 1.0).unwrap();
        let h = StepFunction::new(breaks, hv, 1.0).unwrap();
        let ts: Vec<f64> = (1..50).map(|k| 0.01 * k as f64).collect();
        let qf = hardy_values(&f, &prof, &ts).unwrap();
        let qg = hardy_values(&g, &prof, &ts).unwrap();
        let qh = hardy_values(&h, &prof, &ts).unwrap();
        for k in 0..ts.len() {
            prop_assert!(qf[k] >= 0.0 && qg[k] >= 0.0);
            let lin = a * qf[k] + b * qg[k];
            prop_assert!((qh[k] - lin).abs() <= 1e-9 * lin.max(1e-12), "t={}: {} vs {lin}", ts[k], qh[k]);
        }
    }
}

#[test]
fn additive_form_dominates_the_multiplicative_one() {
    let s = plane();
    let w = Field::new((0..s.len()).map(|i| s.distance_to(i, &[0.0, 0.0])).collect());
    let prof = Profile::euclidean(2).unwrap();
    let f = TestFunction::tent(vec![0.0, 0.0], 1.0).normalized(Normalization::CompactSupport);
    let norms = uncertainty_norms(s, &prof, &w, &f, 1.0, 1.0, &Settings::default()).unwrap();
    let r = norms.balancing_radius(1.0);
    let mult = norms.multiplicative(1.0);
    assert!((norms.additive(r, 1.0) - 3.0 * mult).abs() <= 1e-9 * mult);
    for k in 1..200 {
        let q = r * (0.2 + 0.02 * k as f64);
        assert!(norms.additive(q, 1.0) >= mult, "r={q}");
    }
}
