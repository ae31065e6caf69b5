//! Isoperimetric weights: level-set constants, the Marcinkiewicz norm of the
//! reciprocal, ball-growth comparison and weight construction.
//!
//! Supremum-type constants are evaluated at every attained weight value, which
//! is where the supremum over all levels is attained on a discrete space. Two
//! cut-offs apply:
//!
//! * level sets made of fewer than `min_atoms` atoms are skipped, since a
//!   handful of lattice points cannot resolve a set of small measure;
//! * on truncated spaces, level sets reaching the boundary layer are skipped
//!   and the result is marked as a lower bound (`censored`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{unit_ball_volume, Profile};
use crate::rearrange::{marcinkiewicz_sup, rearrange_atoms, StepFunction};
use crate::spaces::{Field, SampleSpace, SpaceSpec};

pub const DEFAULT_MIN_ATOMS: usize = 1024;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LevelOptions {
    /// Smallest number of atoms a level set needs to enter a supremum. Capped
    /// at 1/64 of the atom count on small spaces.
    pub min_atoms: usize,
}

impl Default for LevelOptions {
    fn default() -> Self {
        LevelOptions { min_atoms: DEFAULT_MIN_ATOMS }
    }
}

impl LevelOptions {
    pub fn exact() -> Self {
        LevelOptions { min_atoms: 1 }
    }

    fn floor(&self, atoms: usize) -> usize {
        self.min_atoms.min(atoms / 64).max(1)
    }
}

/// A supremum over level sets together with where it was found.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstantEstimate {
    #[serde(serialize_with = "crate::report::num")]
    pub value: f64,
    /// Level (or measure, for norms) at which the supremum is attained.
    #[serde(serialize_with = "crate::report::num")]
    pub argmax: f64,
    /// Truncation removed some level sets; `value` is a lower bound.
    pub censored: bool,
    /// No level set survives the truncation: the constant is infinite.
    pub infinite: bool,
    /// Measure below which level sets were not resolved.
    #[serde(serialize_with = "crate::report::num")]
    pub floor_measure: f64,
}

impl ConstantEstimate {
    fn infinite(floor_measure: f64) -> Self {
        ConstantEstimate { value: f64::INFINITY, argmax: 0.0, censored: true, infinite: true, floor_measure }
    }
}

/// Distinct weight values with the cumulative measure and atom count of
/// `{w ≤ r}`.
struct Levels {
    r: Vec<f64>,
    cum: Vec<f64>,
    start: usize,
    stop: usize,
}

fn check_weight(space: &SampleSpace, w: &Field) -> Result<()> {
    w.validate(space)?;
    if let Some((atom, &value)) = w.values().iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonpositiveWeight { atom, value });
    }
    Ok(())
}

fn levels(space: &SampleSpace, w: &Field, opts: &LevelOptions) -> Result<Levels> {
    check_weight(space, w)?;
    let v = w.values();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
    let floor = opts.floor(v.len());
    let (mut r, mut cum) = (Vec::new(), Vec::new());
    let mut start = None;
    let mut stop = None;
    let (mut acc, mut count, mut k) = (0.0, 0usize, 0);
    while k < order.len() {
        let level = v[order[k]];
        let mut touches = false;
        while k < order.len() && v[order[k]] == level {
            acc += space.weights()[order[k]];
            touches |= space.in_boundary_layer(order[k]);
            count += 1;
            k += 1;
        }
        if touches && stop.is_none() {
            stop = Some(r.len());
        }
        if count >= floor && start.is_none() {
            start = Some(r.len());
        }
        r.push(level);
        cum.push(acc);
    }
    let len = r.len();
    Ok(Levels { r, cum, start: start.unwrap_or(len), stop: stop.unwrap_or(len) })
}

impl Levels {
    fn floor_measure(&self) -> f64 {
        self.cum.get(self.start).copied().unwrap_or(f64::INFINITY)
    }

    /// Supremum of `f(measure, level)` over the resolved, uncensored levels.
    fn sup(&self, f: impl Fn(f64, f64) -> f64) -> ConstantEstimate {
        if self.stop <= self.start {
            return ConstantEstimate::infinite(self.floor_measure());
        }
        let mut best = (0.0, self.r[self.start]);
        for k in self.start..self.stop {
            let x = f(self.cum[k], self.r[k]);
            if x > best.0 {
                best = (x, self.r[k]);
            }
        }
        ConstantEstimate {
            value: best.0,
            argmax: best.1,
            censored: self.stop < self.r.len(),
            infinite: false,
            floor_measure: self.floor_measure(),
        }
    }
}

/// `C(w) = sup_r Φ(μ{w ≤ r}) / r`.
pub fn isoperimetric_constant(
    space: &SampleSpace,
    w: &Field,
    profile: &Profile,
    opts: &LevelOptions,
) -> Result<ConstantEstimate> {
    Ok(levels(space, w, opts)?.sup(|m, r| profile.phi(m) / r))
}

/// The same supremum with strict level sets `{w < r}`, evaluated at the
/// attained values.
pub fn isoperimetric_constant_strict(
    space: &SampleSpace,
    w: &Field,
    profile: &Profile,
    opts: &LevelOptions,
) -> Result<ConstantEstimate> {
    let lv = levels(space, w, opts)?;
    let shifted = Levels {
        r: lv.r[1..].to_vec(),
        cum: lv.cum[..lv.cum.len() - 1].to_vec(),
        start: lv.start.saturating_sub(1).min(lv.r.len() - 1),
        stop: lv.stop.saturating_sub(1).min(lv.r.len() - 1),
    };
    if shifted.r.is_empty() {
        return Ok(ConstantEstimate::infinite(lv.floor_measure()));
    }
    Ok(shifted.sup(|m, r| profile.phi(m) / r))
}

/// `‖1/w‖_{M(Φ)} = sup_t (1/w)*(t) Φ(t)`, computed from the decreasing
/// rearrangement of `1/w`.
pub fn marcinkiewicz_weight_norm(
    space: &SampleSpace,
    w: &Field,
    profile: &Profile,
    opts: &LevelOptions,
) -> Result<ConstantEstimate> {
    check_weight(space, w)?;
    marcinkiewicz_field_norm(space, &w.map(|v| 1.0 / v), profile, opts)
}

/// `sup_t g*(t) Φ(t)` with the same resolution floor and censoring as the
/// level-set constants: pieces of `g*` holding fewer than `min_atoms` atoms
/// in total, or reaching the boundary layer, are skipped.
pub fn marcinkiewicz_field_norm(
    space: &SampleSpace,
    g: &Field,
    profile: &Profile,
    opts: &LevelOptions,
) -> Result<ConstantEstimate> {
    g.validate(space)?;
    let v = g.values();
    let star = rearrange_atoms(v, space.weights(), space.discrete_measure());
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[j].abs().total_cmp(&v[i].abs()).then(i.cmp(&j)));
    let floor = opts.floor(v.len());
    let (mut min_t, mut max_t) = (None, None);
    let (mut acc, mut count, mut k) = (0.0, 0usize, 0);
    while k < order.len() {
        let level = v[order[k]].abs();
        if level == 0.0 {
            break;
        }
        let before = acc;
        let mut touches = false;
        while k < order.len() && v[order[k]].abs() == level {
            acc += space.weights()[order[k]];
            touches |= space.in_boundary_layer(order[k]);
            count += 1;
            k += 1;
        }
        if count >= floor && min_t.is_none() {
            min_t = Some(acc);
        }
        if touches && max_t.is_none() {
            max_t = Some(before);
        }
    }
    let Some(min_t) = min_t else {
        // Too few nonzero atoms to resolve anything: report the plain sup.
        let (value, argmax) = marcinkiewicz_sup(&star, profile, 0.0, f64::INFINITY);
        return Ok(ConstantEstimate { value, argmax, censored: false, infinite: false, floor_measure: 0.0 });
    };
    let censored = max_t.is_some();
    let max_t = max_t.unwrap_or(f64::INFINITY);
    if max_t < min_t {
        return Ok(ConstantEstimate::infinite(min_t));
    }
    let (value, argmax) = marcinkiewicz_sup(&star, profile, min_t * (1.0 - 1e-12), max_t * (1.0 + 1e-12));
    Ok(ConstantEstimate { value, argmax, censored, infinite: false, floor_measure: min_t })
}

/// `sup_r μ{w ≤ r} / Υ(r)`, with `Υ` the measure of a ball of radius `r`.
pub fn dt_constant(space: &SampleSpace, w: &Field, opts: &LevelOptions) -> Result<ConstantEstimate> {
    space.ball_measure(1.0)?;
    let lv = levels(space, w, opts)?;
    Ok(lv.sup(|m, r| m / space.ball_measure(r).expect("supported kind")))
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessaryRow {
    #[serde(serialize_with = "crate::report::num")]
    pub level: f64,
    #[serde(serialize_with = "crate::report::num")]
    pub measure: f64,
    #[serde(serialize_with = "crate::report::num")]
    pub content: f64,
    /// `μ{w ≤ t} / (t · μ⁺{w ≤ t})`.
    #[serde(serialize_with = "crate::report::num")]
    pub ratio: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessaryCondition {
    pub rows: Vec<NecessaryRow>,
    /// Largest ratio over the non-degenerate rows: the empirical constant.
    #[serde(serialize_with = "crate::report::num")]
    pub sup_ratio: f64,
}

/// Evaluates `μ{w ≤ t} / (t · μ⁺{w ≤ t})` on `levels` (default: twelve
/// log-spaced levels across the resolved, uncensored range).
pub fn necessary_condition_check(
    space: &SampleSpace,
    w: &Field,
    levels_grid: Option<&[f64]>,
    opts: &LevelOptions,
) -> Result<NecessaryCondition> {
    let lv = levels(space, w, opts)?;
    let grid: Vec<f64> = match levels_grid {
        Some(g) => g.to_vec(),
        None => {
            if lv.stop <= lv.start + 1 {
                Vec::new()
            } else {
                let lo = lv.r[lv.start];
                let hi = lv.r[lv.stop - 1];
                (0..12).map(|i| lo * (hi / lo).powf(i as f64 / 11.0)).collect()
            }
        }
    };
    let offsets = space.default_offsets();
    let mut rows = Vec::new();
    for t in grid {
        let mask: Vec<bool> = w.values().iter().map(|v| *v <= t).collect();
        let measure = space.measure_mask(&mask);
        if measure == 0.0 {
            continue;
        }
        let per = space.minkowski_content(&mask, &offsets)?;
        let degenerate = per.degenerate || per.value <= 0.0;
        let ratio = if degenerate { f64::NAN } else { measure / (t * per.value) };
        rows.push(NecessaryRow { level: t, measure, content: per.value, ratio, degenerate });
    }
    let sup_ratio = rows.iter().filter(|r| !r.degenerate).map(|r| r.ratio).fold(0.0, f64::max);
    Ok(NecessaryCondition { rows, sup_ratio })
}

/// Everything the toolkit reports about one weight.
#[derive(Clone, Debug, Serialize)]
pub struct WeightAnalysis {
    pub isoperimetric_constant: ConstantEstimate,
    pub isoperimetric_constant_strict: ConstantEstimate,
    pub marcinkiewicz_norm: ConstantEstimate,
    /// `|C − M| / M`.
    #[serde(serialize_with = "crate::report::num")]
    pub cross_check: f64,
    pub dt_constant: Option<ConstantEstimate>,
    pub level_count: usize,
    pub necessary_condition: Option<NecessaryCondition>,
}

pub fn analyze_weight(
    space: &SampleSpace,
    w: &Field,
    profile: &Profile,
    opts: &LevelOptions,
    with_necessary: bool,
) -> Result<WeightAnalysis> {
    let c = isoperimetric_constant(space, w, profile, opts)?;
    let strict = isoperimetric_constant_strict(space, w, profile, opts)?;
    let m = marcinkiewicz_weight_norm(space, w, profile, opts)?;
    let cross_check = if c.infinite && m.infinite { 0.0 } else { (c.value - m.value).abs() / m.value };
    let dt = match dt_constant(space, w, opts) {
        Ok(d) => Some(d),
        Err(Error::UnsupportedKind(_)) => None,
        Err(e) => return Err(e),
    };
    let level_count = levels(space, w, opts)?.r.len();
    let necessary = if with_necessary { Some(necessary_condition_check(space, w, None, opts)?) } else { None };
    Ok(WeightAnalysis {
        isoperimetric_constant: c,
        isoperimetric_constant_strict: strict,
        marcinkiewicz_norm: m,
        cross_check,
        dt_constant: dt,
        level_count,
        necessary_condition: necessary,
    })
}

type RadialFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type MeasureFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function `ρ` on the space with the cumulative measure
/// `m(s) = μ{ρ ≤ s}`; `x ↦ m(ρ(x))` is measure preserving onto `(0, μ(Ω))`.
pub struct RadialDescriptor {
    pub label: String,
    rho: RadialFn,
    cumulative: MeasureFn,
}

impl RadialDescriptor {
    pub fn new(
        label: impl Into<String>,
        rho: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        cumulative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RadialDescriptor { label: label.into(), rho: Box::new(rho), cumulative: Box::new(cumulative) }
    }

    /// `ρ = |x|`, `m(s) = βₙ sⁿ`.
    pub fn euclidean_norm(n: usize) -> Self {
        let beta = unit_ball_volume(n as u32);
        Self::new("euclidean_norm", |x| x.iter().map(|c| c * c).sum::<f64>().sqrt(), move |s| {
            beta * s.max(0.0).powi(n as i32)
        })
    }

    /// `ρ = |x|` on the half-plane, `m(s) = π s² / 2`.
    pub fn half_plane_norm() -> Self {
        Self::new("half_plane_norm", |x| (x[0] * x[0] + x[1] * x[1]).sqrt(), |s| PI * s * s / 2.0)
    }

    /// Latitude `θ₁ = asin(x_last)` on Sⁿ with `m = Φₙ`.
    pub fn sphere_latitude(n: usize) -> Result<Self> {
        let profile = Profile::sphere(n as u32)?;
        Ok(Self::new(
            "sphere_latitude",
            |x| x[x.len() - 1].clamp(-1.0, 1.0).asin(),
            move |s| profile.cumulative(s).expect("line profile"),
        ))
    }

    /// First coordinate under a log-concave product measure, `m = H`.
    pub fn first_coordinate(p: f64) -> Result<Self> {
        let profile = Profile::log_concave(p)?;
        Ok(Self::new("first_coordinate", |x| x[0], move |s| profile.cumulative(s).expect("line profile")))
    }

    /// The descriptor matching the geometry of `space`.
    pub fn for_space(space: &SampleSpace) -> Result<Self> {
        match *space.spec() {
            SpaceSpec::EuclideanBox { n, .. } => Ok(Self::euclidean_norm(n)),
            SpaceSpec::EuclideanDisk { .. } => Ok(Self::euclidean_norm(2)),
            SpaceSpec::HalfPlane { .. } => Ok(Self::half_plane_norm()),
            SpaceSpec::Sphere { n, .. } => Self::sphere_latitude(n),
            SpaceSpec::LogConcave { p, .. } => Self::first_coordinate(p),
        }
    }

    pub fn rho(&self, x: &[f64]) -> f64 {
        (self.rho)(x)
    }

    pub fn cumulative(&self, s: f64) -> f64 {
        (self.cumulative)(s)
    }
}

/// `w(x) = 1 / g(m(ρ(x)))` for a nonincreasing positive `g` with
/// `sup g Φ < ∞`.
pub fn construct_weight(
    space: &SampleSpace,
    g: &StepFunction,
    radial: &RadialDescriptor,
    profile: &Profile,
) -> Result<Field> {
    if !g.is_nonincreasing() {
        return Err(Error::InvalidParams("g must be nonincreasing".into()));
    }
    let (sup, _) = marcinkiewicz_sup(g, profile, 0.0, f64::INFINITY);
    if !sup.is_finite() {
        return Err(Error::GViolatesCondition);
    }
    let rho: Vec<f64> = space.points().map(|x| radial.rho(x)).collect();
    let (lo, hi) = rho.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(*r), b.max(*r)));
    let probes = 257;
    let mut last = f64::NEG_INFINITY;
    for i in 0..probes {
        let s = lo + (hi - lo) * i as f64 / (probes - 1) as f64;
        let m = radial.cumulative(s);
        if m < last - 1e-12 * m.abs().max(1.0) {
            return Err(Error::NonmonotoneMeasureMap);
        }
        last = m;
    }
    let values: Result<Vec<f64>> = rho
        .iter()
        .map(|&r| {
            let gv = g.eval(radial.cumulative(r));
            if gv > 0.0 {
                Ok(1.0 / gv)
            } else {
                Err(Error::InvalidParams(format!("g vanishes at measure {}", radial.cumulative(r))))
            }
        })
        .collect();
    Ok(Field::new(values?))
}

/// Number of log-spaced nodes in [`prototype_g`].
pub const PROTOTYPE_NODES: usize = 4096;

/// `g(t) = I(min(t, μ/2)) / min(t, μ/2) = 1/Φ(t)` as a step function on
/// `[0, end)`. Each piece takes the value at its right end, so `g Φ` reaches
/// exactly 1 there and stays below it elsewhere. `end` defaults to the
/// profile's total measure and is required for infinite-measure profiles.
pub fn prototype_g(profile: &Profile, end: Option<f64>) -> Result<StepFunction> {
    let end = match (end, profile.is_finite()) {
        (Some(e), _) => e,
        (None, true) => profile.domain_end(),
        (None, false) => {
            return Err(Error::InvalidParams("an infinite-measure profile needs a truncation".into()))
        }
    };
    if !(end > 0.0 && end.is_finite()) {
        return Err(Error::InvalidParams("prototype domain must be positive and finite".into()));
    }
    let half = profile.domain_end() / 2.0;
    let top = end.min(half);
    let lo = 1e-12 * top;
    let mut breaks = vec![0.0];
    for i in 0..PROTOTYPE_NODES {
        breaks.push(lo * (top / lo).powf(i as f64 / (PROTOTYPE_NODES - 1) as f64));
    }
    *breaks.last_mut().expect("nodes") = top;
    if end > top {
        breaks.push(end);
    }
    let values: Vec<f64> = breaks.windows(2).map(|w| 1.0 / profile.phi(w[1])).collect();
    StepFunction::new(breaks, values, end)
}

/// Catalog weights, as written in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `scale · d(x, o)^power + offset`, with `o` the origin (the north pole
    /// on the sphere).
    Distance {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one")]
        power: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `1/g(m(ρ(x)))` with `g` the prototype of the space's natural profile.
    Prototype,
    Constant { value: f64 },
}

fn one() -> f64 {
    1.0
}

impl WeightSpec {
    pub fn label(&self) -> String {
        match self {
            WeightSpec::Distance { scale, power, offset } => format!("{scale}*d^{power}+{offset}"),
            WeightSpec::Prototype => "prototype".into(),
            WeightSpec::Constant { value } => format!("const({value})"),
        }
    }
}

/// The point distances are measured from by [`WeightSpec::Distance`].
pub fn origin(space: &SampleSpace) -> Vec<f64> {
    let mut o = vec![0.0; space.dim()];
    if matches!(space.spec(), SpaceSpec::Sphere { .. }) {
        *o.last_mut().expect("nonempty") = 1.0;
    }
    o
}

pub fn build_weight(space: &SampleSpace, spec: &WeightSpec) -> Result<Field> {
    let w = match *spec {
        WeightSpec::Distance { scale, power, offset } => {
            let o = origin(space);
            Field::new((0..space.len()).map(|i| scale * space.distance_to(i, &o).powf(power) + offset).collect())
        }
        WeightSpec::Constant { value } => Field::new(vec![value; space.len()]),
        WeightSpec::Prototype => {
            let profile = space.natural_profile()?;
            let radial = RadialDescriptor::for_space(space)?;
            let end = if profile.is_finite() {
                None
            } else {
                let top = space.points().map(|x| radial.cumulative(radial.rho(x))).fold(0.0, f64::max);
                Some(top * 1.01 + f64::MIN_POSITIVE)
            };
            construct_weight(space, &prototype_g(&profile, end)?, &radial, &profile)?
        }
    };
    check_weight(space, &w)?;
    Ok(w)
}

/// The half-plane level-set formula with a Beta-function constant, kept for
/// comparison only: at `k = 0` it gives `πρ²`, twice the Lebesgue measure of
/// the half-disk, so it is not measure preserving for the plain area.
pub mod experimental {
    use statrs::function::beta::beta;

    use super::*;

    /// `(1/(k+1)) B((k+1)/2, 1/2) ρ^{k+2}`.
    pub fn half_plane_power_measure(k: f64, rho: f64) -> f64 {
        beta((k + 1.0) / 2.0, 0.5) / (k + 1.0) * rho.powf(k + 2.0)
    }

    /// `w(x) = 1 / g(half_plane_power_measure(k, |x|))` on a half-plane space.
    pub fn half_plane_weight(space: &SampleSpace, g: &StepFunction, k: f64) -> Result<Field> {
        if !matches!(space.spec(), SpaceSpec::HalfPlane { .. }) {
            return Err(Error::UnsupportedKind("half_plane_weight"));
        }
        let values: Vec<f64> = space
            .points()
            .map(|x| 1.0 / g.eval(half_plane_power_measure(k, (x[0] * x[0] + x[1] * x[1]).sqrt())))
            .collect();
        let field = Field::new(values);
        field.validate(space)?;
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::build_space;

    fn plane() -> SampleSpace {
        build_space(&SpaceSpec::EuclideanBox { n: 2, halfwidth: 4.0, resolution: 128, bounded: false }).unwrap()
    }

    fn norm(x: &[f64]) -> f64 {
        (x[0] * x[0] + x[1] * x[1]).sqrt()
    }

    #[test]
    fn constant_weight_on_truncated_space_is_infinite() {
        let b = plane();
        let w = Field::new(vec![2.0; b.len()]);
        let p = Profile::euclidean(2).unwrap();
        assert!(isoperimetric_constant(&b, &w, &p, &LevelOptions::default()).unwrap().infinite);
        assert!(dt_constant(&b, &w, &LevelOptions::default()).unwrap().infinite);
    }

    #[test]
    fn nonpositive_weight_is_rejected() {
        let b = plane();
        let mut v = vec![1.0; b.len()];
        v[7] = 0.0;
        let p = Profile::euclidean(2).unwrap();
        assert!(matches!(
            isoperimetric_constant(&b, &Field::new(v), &p, &LevelOptions::default()),
            Err(Error::NonpositiveWeight { atom: 7, .. })
        ));
    }

    #[test]
    fn dt_of_scaled_norm() {
        let b = plane();
        let w = Field::from_fn(&b, |x| 2.0 * norm(x));
        let d = dt_constant(&b, &w, &LevelOptions::default()).unwrap();
        assert!((d.value - 0.25).abs() < 0.02, "{d:?}");
        assert!(d.censored);
    }

    #[test]
    fn prototype_on_the_plane_is_half_the_norm() {
        let p = Profile::euclidean(2).unwrap();
        let g = prototype_g(&p, Some(128.0)).unwrap();
        let b = plane();
        let w = construct_weight(&b, &g, &RadialDescriptor::euclidean_norm(2), &p).unwrap();
        for (i, x) in b.points().enumerate().step_by(97) {
            let r = norm(x);
            if r > 0.05 && r < 4.0 {
                assert!((w.values()[i] / (r / 2.0) - 1.0).abs() < 1e-2, "{} {}", w.values()[i], r);
            }
        }
        let (sup, _) = marcinkiewicz_sup(&g, &p, 0.0, f64::INFINITY);
        assert!((sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prototype_is_nonincreasing() {
        for p in [Profile::gaussian(), Profile::sphere(2).unwrap(), Profile::sphere(1).unwrap()] {
            let g = prototype_g(&p, None).unwrap();
            assert!(g.is_nonincreasing());
        }
        let g = prototype_g(&Profile::gaussian(), None).unwrap();
        let expect = (2.0 * 1e4f64.ln()).sqrt();
        assert!((g.eval(1e-4) / expect - 1.0).abs() < 0.1);
    }

    #[test]
    fn experimental_formula_doubles_half_disk_at_zero() {
        let m = experimental::half_plane_power_measure(0.0, 1.0);
        assert!((m - PI).abs() < 1e-12);
    }
}
