//! Isoperimetric profiles of the catalog spaces.
//!
//! Power-law profiles (Euclidean space, the half-plane) are closed forms. The
//! sphere and the one-dimensional log-concave measures are built from a
//! symmetric density on a line: the profile is `density ∘ cdf⁻¹`, with the
//! cumulative table precomputed once and the inverse refined by safeguarded
//! Newton steps.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad;
use crate::spaces::{Region, SampleSpace, SpaceSpec};

/// Volume of the unit ball in ℝⁿ.
pub fn unit_ball_volume(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// Surface area of the unit sphere Sⁿ ⊂ ℝⁿ⁺¹.
pub fn sphere_area(n: u32) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Normalizing constant of the density `exp(-|x|^p / p)` on the line.
pub fn log_concave_normalizer(p: f64) -> f64 {
    2.0 * p.powf(1.0 / p - 1.0) * gamma(1.0 / p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileKind {
    Euclidean { n: u32 },
    HalfPlane,
    Sphere { n: u32 },
    LogConcave { p: f64 },
}

#[derive(Clone, Copy, Debug)]
enum LineDensity {
    Cosine { power: i32 },
    ExpPower { p: f64 },
}

impl LineDensity {
    fn eval(self, x: f64) -> f64 {
        match self {
            LineDensity::Cosine { power } => {
                if power == 0 {
                    1.0
                } else {
                    x.cos().max(0.0).powi(power)
                }
            }
            LineDensity::ExpPower { p } => (-x.abs().powf(p) / p).exp(),
        }
    }
}

const TABLE_NODES: usize = 4096;

/// Symmetric probability density on an interval `[lower, -lower]` (or the line)
/// with a cumulative table on `[lower, 0]`.
#[derive(Debug)]
struct SymmetricLine {
    density: LineDensity,
    lower: f64,
    step: f64,
    cum: Vec<f64>,
    norm: f64,
}

impl SymmetricLine {
    fn new(density: LineDensity) -> Self {
        let lower = match density {
            LineDensity::Cosine { .. } => -PI / 2.0,
            LineDensity::ExpPower { p } => -(45.0 * p).powf(1.0 / p),
        };
        let step = -lower / TABLE_NODES as f64;
        let f = |x: f64| density.eval(x);
        let tail = match density {
            LineDensity::Cosine { .. } => 0.0,
            LineDensity::ExpPower { .. } => quad::gauss_legendre_composite(f, lower - 20.0, lower, 64),
        };
        let mut cum = Vec::with_capacity(TABLE_NODES + 1);
        cum.push(tail);
        for k in 0..TABLE_NODES {
            let a = lower + k as f64 * step;
            let b = if k + 1 == TABLE_NODES { 0.0 } else { a + step };
            let last = cum[k];
            cum.push(last + graded(f, a, b));
        }
        let norm = 2.0 * cum[TABLE_NODES];
        SymmetricLine { density, lower, step, cum, norm }
    }

    fn node(&self, k: usize) -> f64 {
        if k == TABLE_NODES {
            0.0
        } else {
            self.lower + k as f64 * self.step
        }
    }

    fn density(&self, x: f64) -> f64 {
        if let LineDensity::Cosine { .. } = self.density {
            if x.abs() > PI / 2.0 {
                return 0.0;
            }
        }
        self.density.eval(x) / self.norm
    }

    /// Unnormalized mass of `(-inf, x]` for `x <= 0`.
    fn raw_lower(&self, x: f64) -> f64 {
        if x <= self.lower {
            return match self.density {
                LineDensity::Cosine { .. } => 0.0,
                LineDensity::ExpPower { .. } => {
                    quad::gauss_legendre_composite(|s| self.density.eval(s), x - 20.0, x, 64)
                }
            };
        }
        let k = (((x - self.lower) / self.step) as usize).min(TABLE_NODES - 1);
        let a = self.node(k);
        self.cum[k] + graded(|s| self.density.eval(s), a, x)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x > 0.0 {
            1.0 - self.cdf(-x)
        } else {
            self.raw_lower(x) / self.norm
        }
    }

    /// Inverse of the unnormalized cdf below the table, bracketed by doubling.
    fn tail_inverse(&self, target: f64) -> f64 {
        if self.cum[0] == 0.0 {
            return self.lower;
        }
        let mut lo = 2.0 * self.lower;
        while self.raw_lower(lo) > target && lo > 64.0 * self.lower {
            lo *= 2.0;
        }
        quad::invert_monotone(|x| self.raw_lower(x).ln(), target.ln(), lo, self.lower).unwrap_or(lo)
    }

    /// Normalized density at the `s`-quantile, `s <= 1/2`. In the first cell
    /// of a cosine density the quantile is solved for its distance `δ` from
    /// the pole, since `-π/2 + δ` cannot represent small `δ` accurately.
    fn density_at_quantile(&self, s: f64) -> f64 {
        if let LineDensity::Cosine { power } = self.density {
            let target = s * self.norm;
            if target < self.cum[1] {
                let mass = |d: f64| quad::gauss_legendre(|u: f64| u.sin().powi(power), 0.0, d);
                let k = (power + 1) as f64;
                let mut d = (target * k).powf(1.0 / k).min(self.step);
                for _ in 0..50 {
                    let step = (mass(d) - target) / d.sin().powi(power);
                    d -= step;
                    if !(d > 0.0) {
                        return self.density(self.inverse(s));
                    }
                    if step.abs() <= 1e-15 * d {
                        break;
                    }
                }
                return d.sin().powi(power) / self.norm;
            }
        }
        self.density(self.inverse(s))
    }

    /// Inverse of the cdf on `(0, 1/2]`; larger arguments use symmetry.
    fn inverse(&self, t: f64) -> f64 {
        if t > 0.5 {
            return -self.inverse(1.0 - t);
        }
        if t == 0.5 {
            return 0.0;
        }
        let target = t * self.norm;
        if target <= self.cum[0] {
            return self.tail_inverse(target);
        }
        // Largest k with cum[k] <= target.
        let k = match self.cum.binary_search_by(|c| c.total_cmp(&target)) {
            Ok(k) => return self.node(k),
            Err(k) => k - 1,
        }
        .min(TABLE_NODES - 1);
        let (mut a, mut b) = (self.node(k), self.node(k + 1));
        let (ca, cb) = (self.cum[k], self.cum[k + 1]);
        let base = a;
        let resid = |x: f64| ca + quad::gauss_legendre(|s| self.density.eval(s), base, x) - target;
        let mut x = a + (b - a) * (target - ca) / (cb - ca);
        for _ in 0..60 {
            let r = resid(x);
            if r == 0.0 {
                return x;
            }
            if r > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let d = self.density.eval(x);
            let mut next = if d > 0.0 { x - r / d } else { f64::NAN };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - x).abs() <= 1e-16 * x.abs().max(1.0) || b - a <= 1e-16 * x.abs().max(1.0) {
                return next;
            }
            x = next;
        }
        x
    }
}

/// Gauss–Legendre on `[a, b]`, graded geometrically towards `b` when `b` is the
/// origin, where `|x|^p` is not smooth for fractional `p`.
fn graded<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if b != 0.0 || a >= b {
        return quad::gauss_legendre(f, a, b);
    }
    let mut total = 0.0;
    let mut lo = a;
    for _ in 0..40 {
        let hi = 0.5 * lo;
        total += quad::gauss_legendre(&f, lo, hi);
        lo = hi;
    }
    total + quad::gauss_legendre(&f, lo, 0.0)
}

#[derive(Clone, Debug)]
enum Shape {
    /// `I(t) = coef · t^exponent` on `(0, ∞)`.
    Power { coef: f64, exponent: f64 },
    /// `I(t) = density(cdf⁻¹(min(t, 1-t)))` on `(0, 1)`.
    Line(Arc<SymmetricLine>),
}

/// An isoperimetric profile `I`, optionally scaled by a positive factor.
#[derive(Clone, Debug)]
pub struct Profile {
    kind: ProfileKind,
    scale: f64,
    shape: Shape,
}

impl Profile {
    pub fn new(kind: ProfileKind) -> Result<Self> {
        let shape = match kind {
            ProfileKind::Euclidean { n } => {
                if n == 0 {
                    return Err(Error::InvalidParams("dimension must be at least 1".into()));
                }
                let nf = n as f64;
                Shape::Power {
                    coef: nf * unit_ball_volume(n).powf(1.0 / nf),
                    exponent: 1.0 - 1.0 / nf,
                }
            }
            ProfileKind::HalfPlane => Shape::Power { coef: unit_ball_volume(2).sqrt(), exponent: 0.5 },
            ProfileKind::Sphere { n } => {
                if n == 0 {
                    return Err(Error::InvalidParams("sphere dimension must be at least 1".into()));
                }
                Shape::Line(Arc::new(SymmetricLine::new(LineDensity::Cosine { power: n as i32 - 1 })))
            }
            ProfileKind::LogConcave { p } => {
                if !(1.0..=2.0).contains(&p) {
                    return Err(Error::InvalidParams(format!("log-concave exponent p = {p} outside [1, 2]")));
                }
                Shape::Line(Arc::new(SymmetricLine::new(LineDensity::ExpPower { p })))
            }
        };
        Ok(Profile { kind, scale: 1.0, shape })
    }

    pub fn euclidean(n: u32) -> Result<Self> {
        Self::new(ProfileKind::Euclidean { n })
    }

    pub fn half_plane() -> Self {
        Self::new(ProfileKind::HalfPlane).expect("half-plane profile")
    }

    pub fn sphere(n: u32) -> Result<Self> {
        Self::new(ProfileKind::Sphere { n })
    }

    pub fn log_concave(p: f64) -> Result<Self> {
        Self::new(ProfileKind::LogConcave { p })
    }

    pub fn gaussian() -> Self {
        Self::log_concave(2.0).expect("gaussian profile")
    }

    /// The profile multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParams(format!("profile scale {factor} must be positive")));
        }
        let mut p = self.clone();
        p.scale *= factor;
        Ok(p)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        let base = match self.kind {
            ProfileKind::Euclidean { n } => format!("euclidean(n={n})"),
            ProfileKind::HalfPlane => "half_plane".to_string(),
            ProfileKind::Sphere { n } => format!("sphere(n={n})"),
            ProfileKind::LogConcave { p } => format!("log_concave(p={p})"),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    /// Total measure of the underlying space: 1 or `+inf`.
    pub fn domain_end(&self) -> f64 {
        match self.shape {
            Shape::Power { .. } => f64::INFINITY,
            Shape::Line(_) => 1.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.domain_end().is_finite()
    }

    /// `(coef, exponent)` with `I(t) = coef · t^exponent`, for power profiles.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::Power { coef, exponent } => Some((self.scale * coef, exponent)),
            Shape::Line(_) => None,
        }
    }

    /// `I(t)`. Arguments outside the domain are clamped to it.
    pub fn value(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        match &self.shape {
            Shape::Power { coef, exponent } => self.scale * coef * t.powf(*exponent),
            Shape::Line(line) => {
                let s = t.min(1.0 - t);
                if s <= 0.0 {
                    return 0.0;
                }
                self.scale * line.density_at_quantile(s)
            }
        }
    }

    /// `I(t)` with a domain check.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let end = self.domain_end();
        if !(t > 0.0 && t < end) {
            return Err(Error::OutOfDomain { value: t, domain: format!("(0, {end})") });
        }
        Ok(self.value(t))
    }

    /// `Φ(t) = min(t, μ/2) / I(min(t, μ/2))`, nondecreasing with `Φ(0) = 0`.
    pub fn phi(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        let end = self.domain_end();
        let s = t.min(end / 2.0);
        match self.shape {
            Shape::Power { coef, exponent } => s.powf(1.0 - exponent) / (self.scale * coef),
            Shape::Line(_) => {
                let s = s.max(1e-14 * end);
                s / self.value(s)
            }
        }
    }

    /// `I(t) / t`, the reciprocal of `Φ` below the midpoint.
    pub fn ratio(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Power { coef, exponent } => self.scale * coef * t.powf(exponent - 1.0),
            Shape::Line(_) => self.value(t) / t,
        }
    }

    fn line(&self) -> Option<&SymmetricLine> {
        match &self.shape {
            Shape::Line(l) => Some(l),
            Shape::Power { .. } => None,
        }
    }

    /// Cumulative distribution of the generating line density (`Φₙ` for the
    /// sphere in latitude, `H` for log-concave measures).
    pub fn cumulative(&self, x: f64) -> Option<f64> {
        self.line().map(|l| l.cdf(x))
    }

    pub fn cumulative_inverse(&self, t: f64) -> Option<f64> {
        self.line().map(|l| {
            if t <= 0.0 {
                l.lower
            } else if t >= 1.0 {
                -l.lower
            } else {
                l.inverse(t)
            }
        })
    }

    /// Normalized generating density (`φₙ` or `Z⁻¹ exp(-|x|^p/p)`).
    pub fn density(&self, x: f64) -> Option<f64> {
        self.line().map(|l| l.density(x))
    }

    /// Normalizing constant found by the cumulative table.
    pub fn line_normalizer(&self) -> Option<f64> {
        self.line().map(|l| l.norm)
    }

    /// Checks `self ≥ other` on a probe grid of the common domain.
    pub fn dominates(&self, other: &Profile, probes: usize) -> Result<()> {
        let end = self.domain_end().min(other.domain_end());
        let top = if end.is_finite() { end } else { 1e6 };
        for i in 1..probes {
            let t = if end.is_finite() {
                top * i as f64 / probes as f64
            } else {
                1e-8 * (top / 1e-8f64).powf(i as f64 / probes as f64)
            };
            let (a, b) = (self.value(t), other.value(t));
            if a < b * (1.0 - 1e-12) {
                return Err(Error::ProfilesNotOrdered { t, i1: a, i2: b });
            }
        }
        Ok(())
    }
}

/// Smallest `C` with `Υ(r) ≤ C·r·I(Υ(r))` over the supplied radii, keeping only
/// radii whose ball measure is at most half the total.
pub fn ball_growth_constant(profile: &Profile, ball_measure: impl Fn(f64) -> f64, radii: &[f64]) -> f64 {
    let half = profile.domain_end() / 2.0;
    radii
        .iter()
        .filter_map(|&r| {
            let v = ball_measure(r);
            (r > 0.0 && v > 0.0 && v <= half).then(|| v / (r * profile.value(v)))
        })
        .fold(0.0, f64::max)
}

/// One row of [`validate_against_space`].
#[derive(Clone, Debug, Serialize)]
pub struct FidelityRow {
    pub region: String,
    #[serde(serialize_with = "crate::report::num")]
    pub measure: f64,
    #[serde(serialize_with = "crate::report::num")]
    pub content: f64,
    #[serde(serialize_with = "crate::report::num")]
    pub profile_value: f64,
    /// `content / I(measure)`.
    #[serde(serialize_with = "crate::report::num")]
    pub ratio: f64,
    pub extremal: bool,
    pub degenerate: bool,
    pub pass: bool,
}

/// Checks that the discrete perimeter of each region is at least
/// `I(μ(A))·(1 − tol)`, and for regions flagged extremal at most
/// `I(μ(A))·(1 + tol)`.
pub fn validate_against_space(
    profile: &Profile,
    space: &SampleSpace,
    family: &[(Region, bool)],
    tol: f64,
) -> Result<Vec<FidelityRow>> {
    let offsets = space.default_offsets();
    family
        .iter()
        .map(|(region, extremal)| {
            let mask = region.mask(space)?;
            let measure = space.measure_mask(&mask);
            let per = space.minkowski_content(&mask, &offsets)?;
            let iv = profile.value(measure);
            let ratio = per.value / iv;
            let pass = ratio >= 1.0 - tol && (!extremal || ratio <= 1.0 + tol);
            Ok(FidelityRow {
                region: region.label(),
                measure,
                content: per.value,
                profile_value: iv,
                ratio,
                extremal: *extremal,
                degenerate: per.degenerate,
                pass,
            })
        })
        .collect()
}

/// Balls, caps or half-lines appropriate to the space, flagged extremal where
/// they minimize perimeter for the natural profile. Half-disks in the
/// half-plane are not flagged: the half-plane profile used here is a lower
/// bound, a factor √2 below their perimeter.
pub fn extremal_family(space: &SampleSpace) -> Vec<(Region, bool)> {
    let origin = vec![0.0; space.dim()];
    match *space.spec() {
        SpaceSpec::EuclideanBox { halfwidth, .. } => (1..=8)
            .map(|k| (Region::Ball { center: origin.clone(), radius: halfwidth * 0.075 * k as f64 }, true))
            .collect(),
        SpaceSpec::EuclideanDisk { radius, .. } => (1..=8)
            .map(|k| (Region::Ball { center: origin.clone(), radius: radius * 0.1 * k as f64 }, true))
            .collect(),
        SpaceSpec::HalfPlane { halfwidth, .. } => (1..=8)
            .map(|k| (Region::Ball { center: origin.clone(), radius: halfwidth * 0.075 * k as f64 }, false))
            .collect(),
        SpaceSpec::Sphere { n, .. } => {
            let mut pole = vec![0.0; n + 1];
            pole[n] = 1.0;
            (0..10).map(|k| (Region::Ball { center: pole.clone(), radius: 0.4 + 0.25 * k as f64 }, true)).collect()
        }
        SpaceSpec::LogConcave { .. } => (0..9)
            .map(|k| (Region::HalfSpace { axis: 0, below: -2.0 + 0.5 * k as f64 }, true))
            .collect(),
    }
}
