//! Verifiers for the inequalities: localized Poincaré, coarea, additive and
//! multiplicative uncertainty, the isoperimetric Hardy operator, r.i.
//! Sobolev, the Strichartz chain, a Brezis–Wainger ratio and transference.
//!
//! Every verifier returns an [`InequalityReport`] with `pass ⇔ lhs/rhs ≤ 1 +
//! tolerance`. Two tolerances are in play: a discretization slack for
//! quantities that depend on the grid and a tight one for identities that hold
//! exactly on step functions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::quad;
use crate::rearrange::{decreasing_rearrangement, median, ri_norm, ri_norm_weighted, RiNorm, StepFunction, Weighting};
use crate::report::{num, num_map};
use crate::spaces::{Field, Region, SampleSpace, SpaceSpec};
use crate::weights::{isoperimetric_constant, marcinkiewicz_field_norm, marcinkiewicz_weight_norm, LevelOptions};

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    /// Slack for discretized comparisons.
    pub tolerance: f64,
    /// Slack for comparisons that are exact on step functions.
    pub exact_tolerance: f64,
    pub levels: LevelOptions,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tolerance: 0.05, exact_tolerance: 1e-9, levels: LevelOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveRow {
    #[serde(serialize_with = "num")]
    pub r: f64,
    #[serde(serialize_with = "num")]
    pub lhs: f64,
    #[serde(serialize_with = "num")]
    pub rhs: f64,
    #[serde(serialize_with = "num")]
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Provenance {
    pub space: String,
    pub profile: String,
    pub function: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub name: String,
    /// Unique identifier within a suite; defaults to `name`.
    pub case: String,
    #[serde(serialize_with = "num")]
    pub lhs: f64,
    #[serde(serialize_with = "num")]
    pub rhs: f64,
    #[serde(serialize_with = "num")]
    pub constant_used: f64,
    #[serde(serialize_with = "num")]
    pub ratio: f64,
    pub pass: bool,
    #[serde(serialize_with = "num")]
    pub tolerance: f64,
    /// The right-hand side relies on an estimated (lower-bound) constant.
    pub estimate: bool,
    /// Only the ratio is meaningful; no pass/fail verdict applies.
    pub report_only: bool,
    /// Some ingredient was numerically degenerate.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curve: Vec<CurveRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<InequalityReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", serialize_with = "num_map")]
    pub extras: BTreeMap<String, f64>,
    pub provenance: Provenance,
    /// Set when the case could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// `lhs / rhs`, reading `0/0` (and rounding noise over an exact zero) as 0.
pub fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl InequalityReport {
    pub fn new(name: &str, lhs: f64, rhs: f64, constant_used: f64, tolerance: f64, provenance: Provenance) -> Self {
        let mut r = InequalityReport {
            name: name.to_string(),
            case: name.to_string(),
            lhs,
            rhs,
            constant_used,
            ratio: ratio_of(lhs, rhs),
            pass: false,
            tolerance,
            estimate: false,
            report_only: false,
            degenerate: false,
            curve: Vec::new(),
            links: Vec::new(),
            extras: BTreeMap::new(),
            provenance,
            error: None,
        };
        r.refresh();
        r
    }

    /// Recomputes `ratio` and `pass` from the numbers, curve and links.
    pub fn refresh(&mut self) {
        self.ratio = ratio_of(self.lhs, self.rhs);
        let ok = |x: f64| x <= 1.0 + self.tolerance;
        self.pass = self.report_only
            || (ok(self.ratio) && self.curve.iter().all(|c| ok(c.ratio)) && self.links.iter().all(|l| l.pass));
    }

    pub fn with_curve(mut self, curve: Vec<CurveRow>) -> Self {
        self.curve = curve;
        self.refresh();
        self
    }

    pub fn with_links(mut self, links: Vec<InequalityReport>) -> Self {
        self.estimate |= links.iter().any(|l| l.estimate);
        self.degenerate |= links.iter().any(|l| l.degenerate);
        self.links = links;
        self.refresh();
        self
    }

    pub fn extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn with_case(mut self, case: impl Into<String>) -> Self {
        self.case = case.into();
        self
    }

    /// `case` reduced to characters safe in file names.
    pub fn case_id(&self) -> String {
        self.case
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
            .collect()
    }

    pub fn curve_csv(&self) -> String {
        crate::report::curve_csv(&self.curve)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// `(1 − d(x, c)/R)₊`.
    Tent { center: Vec<f64>, radius: f64 },
    /// `exp(−d(x, c)² / 2σ²)`.
    Bump { center: Vec<f64>, width: f64 },
    /// `x[axis]` (the ambient coordinate on the sphere).
    Coordinate { axis: usize },
    /// Indicator of the ball `d(x, c) ≤ R`, smoothed linearly over `R ± ramp`.
    Cap { center: Vec<f64>, radius: f64, ramp: f64 },
    /// `x₀ exp(−|x|² / 2σ²)` on flat coordinates.
    OddBump { width: f64 },
    Constant { value: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    MedianZero,
    MeanZero,
    CompactSupport,
}

#[derive(Clone, Debug, PartialEq)]
enum Source {
    Analytic(Shape),
    Values(Field),
}

/// A member of the analytic test family (or a user field) together with the
/// normalization to apply on a given space.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub label: String,
    source: Source,
    pub normalization: Normalization,
}

impl TestFunction {
    pub fn analytic(shape: Shape) -> Self {
        let label = match &shape {
            Shape::Tent { radius, .. } => format!("tent(R={radius})"),
            Shape::Bump { width, .. } => format!("bump(s={width})"),
            Shape::Coordinate { axis } => format!("x{axis}"),
            Shape::Cap { radius, ramp, .. } => format!("cap(R={radius},d={ramp})"),
            Shape::OddBump { width } => format!("odd_bump(s={width})"),
            Shape::Constant { value } => format!("const({value})"),
        };
        TestFunction { label, source: Source::Analytic(shape), normalization: Normalization::None }
    }

    pub fn tent(center: Vec<f64>, radius: f64) -> Self {
        Self::analytic(Shape::Tent { center, radius })
    }

    pub fn bump(center: Vec<f64>, width: f64) -> Self {
        Self::analytic(Shape::Bump { center, width })
    }

    pub fn coordinate(axis: usize) -> Self {
        Self::analytic(Shape::Coordinate { axis })
    }

    pub fn cap(center: Vec<f64>, radius: f64, ramp: f64) -> Self {
        Self::analytic(Shape::Cap { center, radius, ramp })
    }

    pub fn odd_bump(width: f64) -> Self {
        Self::analytic(Shape::OddBump { width })
    }

    pub fn constant(value: f64) -> Self {
        Self::analytic(Shape::Constant { value })
    }

    /// A field supplied directly; its gradient comes from finite differences
    /// unless the field carries one.
    pub fn field(label: impl Into<String>, f: Field) -> Self {
        TestFunction { label: label.into(), source: Source::Values(f), normalization: Normalization::None }
    }

    pub fn normalized(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn shape(&self) -> Option<&Shape> {
        match &self.source {
            Source::Analytic(s) => Some(s),
            Source::Values(_) => None,
        }
    }

    /// Values and gradient modulus on `space`, after normalization.
    pub fn realize(&self, space: &SampleSpace) -> Result<Field> {
        let raw = match &self.source {
            Source::Values(f) => {
                f.validate(space)?;
                f.clone()
            }
            Source::Analytic(shape) => analytic_field(space, shape)?,
        };
        let f = match self.normalization {
            Normalization::None => raw,
            Normalization::MedianZero => raw.shifted(-median(space, &raw)?),
            Normalization::MeanZero => {
                if !space.is_finite() {
                    return Err(Error::InfiniteMeasure);
                }
                raw.shifted(-space.integral(raw.values()) / space.discrete_measure())
            }
            Normalization::CompactSupport => raw.compactly_supported(),
        };
        f.validate(space)?;
        Ok(f)
    }
}

fn analytic_field(space: &SampleSpace, shape: &Shape) -> Result<Field> {
    let sphere = matches!(space.spec(), SpaceSpec::Sphere { .. });
    let dim = space.dim();
    let center_ok = |c: &[f64]| {
        if c.len() == dim {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("center has {} coordinates, the space {dim}", c.len())))
        }
    };
    let positive = |x: f64, what: &str| {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{what} must be positive")))
        }
    };
    let mut values = Vec::with_capacity(space.len());
    let mut grad = Vec::with_capacity(space.len());
    let mut push = |v: f64, g: f64| {
        values.push(v);
        grad.push(g);
    };
    match shape {
        Shape::Tent { center, radius } => {
            center_ok(center)?;
            positive(*radius, "tent radius")?;
            for x in space.points() {
                let d = space.metric(x, center);
                if d < *radius {
                    push(1.0 - d / radius, 1.0 / radius);
                } else {
                    push(0.0, 0.0);
                }
            }
        }
        Shape::Bump { center, width } => {
            center_ok(center)?;
            positive(*width, "bump width")?;
            let s2 = width * width;
            for x in space.points() {
                let d = space.metric(x, center);
                let e = (-d * d / (2.0 * s2)).exp();
                push(e, d / s2 * e);
            }
        }
        Shape::Coordinate { axis } => {
            if *axis >= dim {
                return Err(Error::InvalidParams(format!("axis {axis} out of range")));
            }
            for x in space.points() {
                let v = x[*axis];
                push(v, if sphere { (1.0 - v * v).max(0.0).sqrt() } else { 1.0 });
            }
        }
        Shape::Cap { center, radius, ramp } => {
            center_ok(center)?;
            positive(*ramp, "cap ramp")?;
            for x in space.points() {
                let u = 0.5 + (radius - space.metric(x, center)) / (2.0 * ramp);
                if u <= 0.0 {
                    push(0.0, 0.0);
                } else if u >= 1.0 {
                    push(1.0, 0.0);
                } else {
                    push(u, 0.5 / ramp);
                }
            }
        }
        Shape::OddBump { width } => {
            if sphere {
                return Err(Error::UnsupportedKind("odd_bump on the sphere"));
            }
            positive(*width, "odd bump width")?;
            let s2 = width * width;
            for x in space.points() {
                let r2: f64 = x.iter().map(|c| c * c).sum();
                let e = (-r2 / (2.0 * s2)).exp();
                let d0 = e * (1.0 - x[0] * x[0] / s2);
                let rest = e * x[0].abs() / s2 * (r2 - x[0] * x[0]).sqrt();
                push(x[0] * e, d0.hypot(rest));
            }
        }
        Shape::Constant { value } => {
            for _ in 0..space.len() {
                push(*value, 0.0);
            }
        }
    }
    Ok(Field::with_gradient(values, grad))
}

fn provenance(space: &SampleSpace, profile: &Profile, f: &TestFunction) -> Provenance {
    Provenance { space: space.label(), profile: profile.label(), function: f.label.clone(), ..Default::default() }
}

fn norm_of(space: &SampleSpace, f: &Field, norm: &RiNorm) -> Result<f64> {
    ri_norm(&decreasing_rearrangement(space, f)?, norm)
}

/// `∫_A |f − m(f)| dμ ≤ Φ(μ(A)) ∫_Ω |∇f| dμ`.
pub fn local_poincare(
    space: &SampleSpace,
    profile: &Profile,
    f: &TestFunction,
    region: &Region,
    s: &Settings,
) -> Result<InequalityReport> {
    if !space.is_finite() {
        return Err(Error::InfiniteMeasure);
    }
    let field = f.realize(space)?;
    let m = median(space, &field)?;
    let mask = region.mask(space)?;
    let lhs: f64 = field
        .values()
        .iter()
        .zip(space.weights())
        .zip(&mask)
        .filter(|(_, inside)| **inside)
        .map(|((v, w), _)| w * (v - m).abs())
        .sum();
    let measure = space.measure_mask(&mask);
    let grad = space.gradient_modulus(&field)?;
    let constant = if measure > 0.0 { profile.phi(measure) } else { 0.0 };
    let rhs = constant * space.integral(grad.values());
    let mut p = provenance(space, profile, f);
    p.weight = Some(region.label());
    Ok(InequalityReport::new("local_poincare", lhs, rhs, constant, s.tolerance, p)
        .extra("median", m)
        .extra("region_measure", measure))
}

/// `∫ I(μ{f > s}) ds ≤ ∫ |∇f| dμ`, with the left side integrated exactly over
/// the steps of `s ↦ μ{f > s}`. On infinite-measure spaces the negative
/// levels use `μ{f ≤ s}`, the measure of the bounded side.
pub fn coarea_check(space: &SampleSpace, profile: &Profile, f: &TestFunction, s: &Settings) -> Result<InequalityReport> {
    let field = f.realize(space)?;
    if !space.is_finite() && !field.has_compact_support() {
        return Err(Error::InvalidParams("coarea on an infinite-measure space needs compact support".into()));
    }
    let v = field.values();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
    let total: f64 = space.discrete_measure();
    let mut below = 0.0;
    let mut lhs = 0.0;
    let mut k = 0;
    while k < order.len() {
        let level = v[order[k]];
        while k < order.len() && v[order[k]] == level {
            below += space.weights()[order[k]];
            k += 1;
        }
        if k == order.len() {
            break;
        }
        let next = v[order[k]];
        let above = (total - below).max(0.0);
        let t = if space.is_finite() || level >= 0.0 { above } else { below };
        lhs += profile.value(t) * (next - level);
    }
    let rhs = space.integral(space.gradient_modulus(&field)?.values());
    Ok(InequalityReport::new("coarea", lhs, rhs, 1.0, s.tolerance, provenance(space, profile, f)))
}

/// The three norms entering the uncertainty inequalities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UncertaintyNorms {
    pub c_iso: f64,
    pub censored: bool,
    /// `2C` for `p = 1`, `C(2p + 1)` for `p > 1`.
    pub k1: f64,
    pub f: f64,
    pub gradient: f64,
    pub weighted: f64,
}

impl UncertaintyNorms {
    pub fn additive(&self, r: f64, alpha: f64) -> f64 {
        self.k1 * r * self.gradient + 2.0 * r.powf(-alpha) * self.weighted
    }

    /// Where the two terms of the additive bound balance after dropping the
    /// factor 2: `(‖w^α f‖ / (K₁‖∇f‖))^{1/(1+α)}`.
    pub fn balancing_radius(&self, alpha: f64) -> f64 {
        (self.weighted / (self.k1 * self.gradient)).powf(1.0 / (1.0 + alpha))
    }

    pub fn multiplicative(&self, alpha: f64) -> f64 {
        (self.k1 * self.gradient).powf(alpha / (alpha + 1.0)) * self.weighted.powf(1.0 / (alpha + 1.0))
    }
}

fn check_normalized(space: &SampleSpace, f: &Field) -> Result<()> {
    if space.is_finite() {
        let sup = f.sup_norm();
        let l1 = space.lp_norm(f.values(), 1.0);
        let med = median(space, f)?;
        let mean = space.integral(f.values());
        if med.abs() <= 1e-9 * sup || mean.abs() <= 1e-9 * l1 {
            Ok(())
        } else {
            Err(Error::InvalidParams("f needs median zero or mean zero".into()))
        }
    } else if f.has_compact_support() {
        Ok(())
    } else {
        Err(Error::InvalidParams("f needs compact support on an infinite-measure space".into()))
    }
}

pub fn uncertainty_norms(
    space: &SampleSpace,
    profile: &Profile,
    w: &Field,
    f: &TestFunction,
    p: f64,
    alpha: f64,
    s: &Settings,
) -> Result<UncertaintyNorms> {
    if !(p >= 1.0 && p.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParams("need 1 <= p < inf and alpha > 0".into()));
    }
    let field = f.realize(space)?;
    check_normalized(space, &field)?;
    let c = isoperimetric_constant(space, w, profile, &s.levels)?;
    if c.infinite || !c.value.is_finite() {
        return Err(Error::WeightNotIsoperimetric);
    }
    let k1 = if p == 1.0 { 2.0 * c.value } else { c.value * (2.0 * p + 1.0) };
    let grad = space.gradient_modulus(&field)?;
    let weighted: Vec<f64> = field.values().iter().zip(w.values()).map(|(v, wv)| wv.powf(alpha) * v).collect();
    Ok(UncertaintyNorms {
        c_iso: c.value,
        censored: c.censored,
        k1,
        f: space.lp_norm(field.values(), p),
        gradient: space.lp_norm(grad.values(), p),
        weighted: space.lp_norm(&weighted, p),
    })
}

/// 256 log-spaced radii over four decades, containing the balancing radius.
pub fn default_radii(center: f64) -> Vec<f64> {
    let c = if center > 0.0 && center.is_finite() { center } else { 1.0 };
    (0..256).map(|i| c * 10f64.powf(2.0 * (i as f64 - 128.0) / 128.0)).collect()
}

/// `‖f‖_p ≤ K₁ r ‖∇f‖_p + 2 r^{−α} ‖w^α f‖_p` along a grid of `r`.
#[allow(clippy::too_many_arguments)]
pub fn uncertainty_additive(
    space: &SampleSpace,
    profile: &Profile,
    w: &Field,
    f: &TestFunction,
    p: f64,
    alpha: f64,
    radii: Option<&[f64]>,
    s: &Settings,
) -> Result<InequalityReport> {
    let n = uncertainty_norms(space, profile, w, f, p, alpha, s)?;
    let grid = match radii {
        Some(r) => r.to_vec(),
        None => default_radii(n.balancing_radius(alpha)),
    };
    let curve: Vec<CurveRow> = grid
        .iter()
        .map(|&r| {
            let rhs = n.additive(r, alpha);
            CurveRow { r, lhs: n.f, rhs, ratio: ratio_of(n.f, rhs) }
        })
        .collect();
    let worst = curve.iter().fold(None::<&CurveRow>, |a, c| match a {
        Some(b) if b.ratio >= c.ratio => Some(b),
        _ => Some(c),
    });
    let (rhs, r_star) = worst.map(|c| (c.rhs, c.r)).unwrap_or((f64::INFINITY, 0.0));
    let mut rep = InequalityReport::new("uncertainty_additive", n.f, rhs, n.k1, s.tolerance, provenance(space, profile, f))
        .with_curve(curve)
        .extra("p", p)
        .extra("alpha", alpha)
        .extra("c_iso", n.c_iso)
        .extra("gradient_norm", n.gradient)
        .extra("weighted_norm", n.weighted)
        .extra("tightest_r", r_star);
    rep.provenance.weight = Some("w".into());
    Ok(rep)
}

/// `‖f‖_p ≤ (K₁‖∇f‖_p)^{α/(α+1)} ‖w^α f‖_p^{1/(α+1)}`, with the additive bound
/// at the balancing radius and its minimum over the default grid as extras.
pub fn uncertainty_multiplicative(
    space: &SampleSpace,
    profile: &Profile,
    w: &Field,
    f: &TestFunction,
    p: f64,
    alpha: f64,
    s: &Settings,
) -> Result<InequalityReport> {
    let n = uncertainty_norms(space, profile, w, f, p, alpha, s)?;
    let rb = n.balancing_radius(alpha);
    let optimal = default_radii(rb).iter().map(|&r| n.additive(r, alpha)).fold(f64::INFINITY, f64::min);
    let mut rep = InequalityReport::new(
        "uncertainty_multiplicative",
        n.f,
        n.multiplicative(alpha),
        n.k1,
        s.tolerance,
        provenance(space, profile, f),
    )
    .extra("p", p)
    .extra("alpha", alpha)
    .extra("c_iso", n.c_iso)
    .extra("balancing_r", rb)
    .extra("additive_at_balancing", n.additive(rb, alpha))
    .extra("optimal_additive", optimal);
    rep.provenance.weight = Some("w".into());
    Ok(rep)
}

/// Upper limit of the Hardy operator: `μ/2` for finite profiles, the end of
/// the step function's domain otherwise.
fn hardy_upper(sf: &StepFunction, profile: &Profile) -> f64 {
    if profile.is_finite() {
        profile.domain_end() / 2.0
    } else {
        sf.domain_end()
    }
}

/// `∫_a^b ds / I(s)`.
fn reciprocal_integral(profile: &Profile, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    match profile.power_law() {
        Some((c, e)) => {
            let k = 1.0 - e;
            if k.abs() < 1e-15 {
                (b / a).ln() / c
            } else {
                (b.powf(k) - a.powf(k)) / (c * k)
            }
        }
        None => {
            let f = |s: f64| 1.0 / profile.value(s);
            // 1/I is nonincreasing near 0, so the rule's estimate in the log
            // variable (or b/I(b) from zero) sets a reachable scale.
            let logged = |y: f64| f(y.exp()) * y.exp();
            if a > 0.0 && b / a < 1.5 {
                return quad::gauss_legendre(logged, a.ln(), b.ln());
            }
            let scale = if a > 0.0 {
                quad::gauss_legendre(logged, a.ln(), b.ln()).abs()
            } else {
                b * f(b)
            };
            quad::integrate(f, a, b, 1e-9 * scale)
        }
    }
}

/// Integrals of `1/I` between consecutive nodes of `(0, upper]`, shared by
/// every step function whose breakpoints are nodes.
struct ReciprocalTable<'a> {
    profile: &'a Profile,
    nodes: Vec<f64>,
    segments: Vec<f64>,
}

impl<'a> ReciprocalTable<'a> {
    fn new(profile: &'a Profile, upper: f64, points: impl IntoIterator<Item = f64>) -> Self {
        let mut nodes: Vec<f64> = points.into_iter().filter(|&x| x > 0.0 && x < upper).chain([upper]).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let segments = nodes.windows(2).map(|w| reciprocal_integral(profile, w[0], w[1])).collect();
        ReciprocalTable { profile, nodes, segments }
    }

    /// `Q̃f` at each `t`; every `t` and every breakpoint of `sf` below
    /// `upper` must be a node.
    fn apply(&self, sf: &StepFunction, ts: &[f64]) -> Vec<f64> {
        let mut tail = vec![0.0; self.nodes.len()];
        for i in (0..self.segments.len()).rev() {
            let v = sf.eval(self.nodes[i]);
            tail[i] = tail[i + 1] + if v == 0.0 { 0.0 } else { v * self.segments[i] };
        }
        ts.iter()
            .map(|&t| self.profile.ratio(t) * tail[self.nodes.partition_point(|&x| x < t)])
            .collect()
    }
}

fn check_hardy_points(upper: f64, ts: &[f64]) -> Result<()> {
    match ts.iter().find(|&&t| !(t > 0.0 && t < upper)) {
        Some(&t) => Err(Error::OutOfDomain { value: t, domain: format!("(0, {upper})") }),
        None => Ok(()),
    }
}

/// `Q̃f(t)` at each `t` (sorted or not).
pub fn hardy_values(sf: &StepFunction, profile: &Profile, ts: &[f64]) -> Result<Vec<f64>> {
    let upper = hardy_upper(sf, profile);
    check_hardy_points(upper, ts)?;
    let Some(lowest) = ts.iter().copied().reduce(f64::min) else {
        return Ok(Vec::new());
    };
    let breaks = sf.breakpoints().iter().copied().filter(|&b| b > lowest);
    let table = ReciprocalTable::new(profile, upper, ts.iter().copied().chain(breaks));
    Ok(table.apply(sf, ts))
}

/// `Q̃f(t) = (I(t)/t) ∫_t^{U} f(s)/I(s) ds` with `U = μ/2`, or the end of the
/// domain of `sf` for infinite-measure profiles.
pub fn hardy_operator(sf: &StepFunction, profile: &Profile, t: f64) -> Result<f64> {
    Ok(hardy_values(sf, profile, &[t])?[0])
}

/// Nodes of the log grid used to sample `Q̃f` into a step function.
pub const HARDY_GRID: usize = 2048;

fn hardy_grid(upper: f64) -> Vec<f64> {
    let lo = upper * 1e-12;
    let mut breaks = vec![0.0];
    breaks.extend((0..HARDY_GRID).map(|i| lo * (upper / lo).powf(i as f64 / (HARDY_GRID - 1) as f64)));
    *breaks.last_mut().expect("grid") = upper;
    breaks
}

fn sampled(table: &ReciprocalTable, sf: &StepFunction, grid: &[f64], upper: f64) -> Result<StepFunction> {
    let mut values = table.apply(sf, &grid[1..grid.len() - 1]);
    values.push(0.0);
    StepFunction::new(grid.to_vec(), values, sf.domain_end().max(upper))
}

/// `Q̃f` as a step function on `[0, U)` taking on each cell of a log grid the
/// value at its right end. For `f ≥ 0` nonincreasing, `Q̃f` is nonincreasing,
/// so this step function lies below it and its norms are lower bounds.
pub fn hardy_step(sf: &StepFunction, profile: &Profile) -> Result<StepFunction> {
    let upper = hardy_upper(sf, profile);
    let grid = hardy_grid(upper);
    let table = ReciprocalTable::new(profile, upper, grid.iter().chain(sf.breakpoints()).copied());
    sampled(&table, sf, &grid, upper)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OperatorNorm {
    #[serde(serialize_with = "num")]
    pub value: f64,
    /// Exact value rather than a probe lower bound.
    pub closed_form: bool,
    /// Every probe had zero norm.
    pub degenerate: bool,
}

/// Indicators `χ_(0,a)` with `a` spread over ten decades below `upper`.
pub fn default_probes(upper: f64, domain_end: f64) -> Vec<StepFunction> {
    (0..21)
        .map(|k| StepFunction::indicator(upper * 10f64.powf(-0.5 * k as f64), domain_end).expect("valid indicator"))
        .collect()
}

/// `‖Q̃‖` on `X̄`. Power-law profiles of infinite measure with `X = L¹` use
/// the exact value `1/e` (`n′` for `I ∝ t^{1−1/n}`); otherwise the result is
/// `max ‖Q̃f‖/‖f‖` over `probes`, a lower bound of the norm.
pub fn hardy_operator_norm_estimate(
    profile: &Profile,
    norm: &RiNorm,
    probes: &[StepFunction],
) -> Result<OperatorNorm> {
    if let (Some((_, e)), RiNorm::Lp(p), false) = (profile.power_law(), norm, profile.is_finite()) {
        if *p == 1.0 && e > 0.0 {
            return Ok(OperatorNorm { value: 1.0 / e, closed_form: true, degenerate: false });
        }
    }
    let mut best = 0.0f64;
    let mut any = false;
    // Probes sharing a domain share one grid and one table.
    let mut k = 0;
    while k < probes.len() {
        let upper = hardy_upper(&probes[k], profile);
        let group: Vec<&StepFunction> =
            probes[k..].iter().take_while(|p| hardy_upper(p, profile) == upper).collect();
        k += group.len();
        let grid = hardy_grid(upper);
        let points = grid.iter().copied().chain(group.iter().flat_map(|p| p.breakpoints().iter().copied()));
        let table = ReciprocalTable::new(profile, upper, points);
        for probe in group {
            let denom = ri_norm(probe, norm)?;
            if denom == 0.0 {
                continue;
            }
            any = true;
            let q = ri_norm(&sampled(&table, probe, &grid, upper)?, norm)?;
            best = best.max(q / denom);
        }
    }
    Ok(OperatorNorm { value: best, closed_form: false, degenerate: !any })
}

/// Ingredients of the r.i. Sobolev bound on a space.
struct SobolevParts {
    /// `‖f* I(t)/t χ_(0, μ/2)‖` (the whole half-line for infinite measure).
    lhs: f64,
    qnorm: OperatorNorm,
    gradient: f64,
    /// `(2 c_{X,I} / μ) ∫|f|`, zero for infinite measure.
    l1_term: f64,
}

fn sobolev_parts(space: &SampleSpace, profile: &Profile, norm: &RiNorm, field: &Field) -> Result<SobolevParts> {
    let star = decreasing_rearrangement(space, field)?;
    let end = space.discrete_measure();
    let finite = space.is_finite();
    let cut = if finite { space.total_measure() / 2.0 } else { f64::INFINITY };
    let ratio = |t: f64| profile.ratio(t);
    let h = match profile.power_law() {
        Some((c, e)) => Weighting::Power { coef: c, exponent: e - 1.0 },
        None => Weighting::Function(&ratio),
    };
    let lhs = ri_norm_weighted(&star, &h, norm, cut)?;
    let upper = if finite { profile.domain_end() / 2.0 } else { end };
    let qnorm = hardy_operator_norm_estimate(profile, norm, &default_probes(upper, end.max(upper)))?;
    if !qnorm.value.is_finite() || qnorm.degenerate {
        return Err(Error::OperatorNormUnavailable(norm.label()));
    }
    let gradient = norm_of(space, &space.gradient_modulus(field)?, norm)?;
    let l1_term = if finite {
        let mu = space.total_measure();
        let one = StepFunction::constant(1.0, mu)?;
        let c = ri_norm_weighted(&one, &h, norm, mu / 2.0)?;
        if !c.is_finite() {
            return Err(Error::OperatorNormUnavailable(format!("I(t)/t is not in {}", norm.label())));
        }
        2.0 * c / mu * space.lp_norm(field.values(), 1.0)
    } else {
        if !field.has_compact_support() {
            return Err(Error::InvalidParams("r.i. Sobolev on an infinite-measure space needs compact support".into()));
        }
        0.0
    };
    Ok(SobolevParts { lhs, qnorm, gradient, l1_term })
}

/// `‖f* I(t)/t χ_(0,μ/2)‖_X̄ ≤ ‖Q̃‖ ‖∇f‖_X + (2c_{X,I}/μ) ∫|f|`; the last term
/// is absent for infinite measure.
pub fn ri_sobolev(
    space: &SampleSpace,
    profile: &Profile,
    norm: &RiNorm,
    f: &TestFunction,
    s: &Settings,
) -> Result<InequalityReport> {
    let field = f.realize(space)?;
    let parts = sobolev_parts(space, profile, norm, &field)?;
    let rhs = parts.qnorm.value * parts.gradient + parts.l1_term;
    let mut p = provenance(space, profile, f);
    p.norm = Some(norm.label());
    let mut rep = InequalityReport::new("ri_sobolev", parts.lhs, rhs, parts.qnorm.value, s.tolerance, p)
        .extra("gradient_norm", parts.gradient)
        .extra("l1_term", parts.l1_term);
    rep.estimate = !parts.qnorm.closed_form;
    Ok(rep)
}

/// The chain `‖fg‖_X ≤ ‖f*g*‖ ≤ ‖g‖_{M(Φ)} ‖f*/Φ‖ ≤ ‖g‖_{M(Φ)} ‖Q̃‖ ‖∇f‖_X`, each
/// link reported separately. On finite-measure spaces the last link reads
/// `‖f*/Φ‖ ≤ 2(‖Q̃‖‖∇f‖_X + (2c_{X,I}/μ)∫|f|)`.
pub fn strichartz_check(
    space: &SampleSpace,
    profile: &Profile,
    norm: &RiNorm,
    f: &TestFunction,
    g: &Field,
    s: &Settings,
) -> Result<InequalityReport> {
    let field = f.realize(space)?;
    let gm = marcinkiewicz_field_norm(space, g, profile, &s.levels)?;
    if gm.infinite || !gm.value.is_finite() {
        return Err(Error::GNormInfinite);
    }
    let fstar = decreasing_rearrangement(space, &field)?;
    let gstar = decreasing_rearrangement(space, g)?;
    let fg = field.zip_with(g, |a, b| a * b);
    let lhs1 = norm_of(space, &fg, norm)?;
    let rhs1 = ri_norm(&fstar.product(&gstar), norm)?;
    let inv_phi = |t: f64| 1.0 / profile.phi(t);
    let h = match (profile.power_law(), profile.is_finite()) {
        (Some((c, e)), false) => Weighting::Power { coef: c, exponent: e - 1.0 },
        _ => Weighting::Function(&inv_phi),
    };
    let over_phi = ri_norm_weighted(&fstar, &h, norm, f64::INFINITY)?;
    let parts = sobolev_parts(space, profile, norm, &field)?;
    let sobolev = parts.qnorm.value * parts.gradient + parts.l1_term;
    let rhs3 = if space.is_finite() { 2.0 * sobolev } else { sobolev };

    let mut p = provenance(space, profile, f);
    p.norm = Some(norm.label());
    p.weight = Some("g".into());
    let hl = InequalityReport::new("hardy_littlewood", lhs1, rhs1, 1.0, s.exact_tolerance, p.clone());
    let extraction = InequalityReport::new("marcinkiewicz_extraction", rhs1, gm.value * over_phi, gm.value, s.tolerance, p.clone());
    let mut sob = InequalityReport::new("sobolev_step", over_phi, rhs3, parts.qnorm.value, s.tolerance, p.clone());
    sob.estimate = !parts.qnorm.closed_form;
    let mut rep = InequalityReport::new("strichartz", lhs1, gm.value * rhs3, gm.value * parts.qnorm.value, s.tolerance, p)
        .extra("g_marcinkiewicz", gm.value)
        .extra("operator_norm", parts.qnorm.value);
    rep.estimate = sob.estimate;
    Ok(rep.with_links(vec![hl, extraction, sob]))
}

/// `‖fg‖_n / (‖g‖_{L_log(n,∞)} ‖∇f‖_n)`; report only, since the constant is
/// not known.
pub fn brezis_wainger_report(space: &SampleSpace, f: &TestFunction, g: &Field) -> Result<InequalityReport> {
    let n = space.dim();
    if n < 2 || !space.is_finite() {
        return Err(Error::InvalidParams("needs a bounded domain of dimension at least 2".into()));
    }
    let field = f.realize(space)?;
    let nf = n as f64;
    let lhs = space.lp_norm(field.zip_with(g, |a, b| a * b).values(), nf);
    let glog = norm_of(space, g, &RiNorm::LogLorentz { n: nf, domain: space.total_measure() })?;
    let grad = space.lp_norm(space.gradient_modulus(&field)?.values(), nf);
    let mut rep = InequalityReport::new(
        "brezis_wainger",
        lhs,
        glog * grad,
        f64::NAN,
        f64::INFINITY,
        Provenance { space: space.label(), profile: String::new(), function: f.label.clone(), ..Default::default() },
    );
    rep.report_only = true;
    rep.refresh();
    Ok(rep.extra("g_log_lorentz", glog).extra("gradient_norm", grad))
}

/// Largest Brezis–Wainger ratio over a family, with one link per member.
pub fn brezis_wainger_sweep(space: &SampleSpace, family: &[TestFunction], g: &Field) -> Result<InequalityReport> {
    let links = family.iter().map(|f| brezis_wainger_report(space, f, g)).collect::<Result<Vec<_>>>()?;
    let best = links.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio)).cloned();
    let mut rep = best.ok_or_else(|| Error::InvalidParams("empty family".into()))?;
    rep.name = "brezis_wainger_sweep".into();
    rep.case = rep.name.clone();
    rep.provenance.function = "family".into();
    Ok(rep.with_links(links))
}

/// For `I₁ ≥ I₂`: `‖1/w‖_{M(Φ₁)} ≤ ‖1/w‖_{M(Φ₂)}`, and the multiplicative
/// uncertainty inequality on `space` with the constant computed from `Φ₂`.
pub fn transference_check(
    profile1: &Profile,
    profile2: &Profile,
    space: &SampleSpace,
    w: &Field,
    f: &TestFunction,
    alpha: f64,
    s: &Settings,
) -> Result<InequalityReport> {
    profile1.dominates(profile2, 512)?;
    let n1 = marcinkiewicz_weight_norm(space, w, profile1, &s.levels)?;
    let n2 = marcinkiewicz_weight_norm(space, w, profile2, &s.levels)?;
    let p = provenance(space, profile2, f);
    let mono = InequalityReport::new("norm_monotonicity", n1.value, n2.value, 1.0, s.exact_tolerance, p.clone());
    let unc = uncertainty_multiplicative(space, profile2, w, f, 1.0, alpha, s)?;
    let mut rep = InequalityReport::new("transference", unc.lhs, unc.rhs, unc.constant_used, s.tolerance, p)
        .extra("norm_phi1", n1.value)
        .extra("norm_phi2", n2.value);
    rep.provenance.weight = Some("w".into());
    Ok(rep.with_links(vec![mono, unc]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::build_space;
    use std::f64::consts::PI;

    #[test]
    fn hardy_operator_closed_forms() {
        let e2 = Profile::euclidean(2).unwrap();
        let f = StepFunction::indicator(1.0, 100.0).unwrap();
        for t in [0.01, 0.3, 0.9] {
            let q = hardy_operator(&f, &e2, t).unwrap();
            assert!((q - 2.0 * (t.powf(-0.5) - 1.0)).abs() < 1e-12, "{t} {q}");
        }
        let s1 = Profile::sphere(1).unwrap();
        let f = StepFunction::indicator(0.5, 1.0).unwrap();
        for t in [0.05, 0.2, 0.4] {
            let q = hardy_operator(&f, &s1, t).unwrap();
            assert!((q - (0.5 - t) / t).abs() < 1e-8, "{t} {q}");
        }
        let zero = StepFunction::zero(1.0).unwrap();
        assert_eq!(hardy_operator(&zero, &s1, 0.2).unwrap(), 0.0);
        assert!(hardy_operator(&f, &s1, 0.7).is_err());
    }

    #[test]
    fn operator_norm_probe_approaches_closed_form() {
        let e2 = Profile::euclidean(2).unwrap();
        let exact = hardy_operator_norm_estimate(&e2, &RiNorm::Lp(1.0), &[]).unwrap();
        assert_eq!(exact.value, 2.0);
        assert!(exact.closed_form);
        let probes = default_probes(50.0, 50.0);
        let est = hardy_operator_norm_estimate(&e2, &RiNorm::Lorentz { p: 1.0, q: 1.0 + 1e-12 }, &probes).unwrap();
        assert!(est.value <= 2.0 && est.value > 1.9, "{est:?}");
        let zero = [StepFunction::zero(1.0).unwrap()];
        let d = hardy_operator_norm_estimate(&e2, &RiNorm::Lp(2.0), &zero).unwrap();
        assert!(d.degenerate && d.value == 0.0);
    }

    #[test]
    fn coarea_tent_is_tight_on_the_disk() {
        let disk = build_space(&SpaceSpec::EuclideanDisk { radius: 2.0, resolution: 128 }).unwrap();
        let tent = TestFunction::tent(vec![0.0, 0.0], 1.0).normalized(Normalization::CompactSupport);
        let r = coarea_check(&disk, &Profile::euclidean(2).unwrap(), &tent, &Settings::default()).unwrap();
        assert!((r.lhs - PI).abs() < 1e-9 && (r.rhs - PI).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn constant_function_is_trivial() {
        let s2 = build_space(&SpaceSpec::Sphere { n: 2, resolution: 32 }).unwrap();
        let p = Profile::sphere(2).unwrap();
        let c = TestFunction::constant(3.0);
        let r = coarea_check(&s2, &p, &c, &Settings::default()).unwrap();
        assert_eq!((r.lhs, r.rhs, r.pass), (0.0, 0.0, true));
        let r = local_poincare(&s2, &p, &c, &Region::All, &Settings::default()).unwrap();
        assert_eq!((r.lhs, r.pass), (0.0, true));
    }

    #[test]
    fn report_ratio_rules() {
        assert_eq!(ratio_of(0.0, 0.0), 0.0);
        assert!(ratio_of(1.0, 0.0).is_infinite());
        let r = InequalityReport::new("x", 1.04, 1.0, 1.0, 0.05, Provenance::default());
        assert!(r.pass);
        let r = InequalityReport::new("x", 1.06, 1.0, 1.0, 0.05, Provenance::default());
        assert!(!r.pass);
    }
}
