//! Distribution functions, decreasing rearrangements, maximal averages,
//! medians and rearrangement-invariant norms.
//!
//! All norms of step functions are evaluated piece by piece in closed form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::quad;
use crate::spaces::{Field, SampleSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    Nonincreasing,
    General,
}

/// Right-continuous step function on `[0, domain_end)`: `values[i]` on
/// `[breaks[i], breaks[i+1])`, zero from the last breakpoint on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
    domain_end: f64,
    monotone: Monotone,
}

impl StepFunction {
    /// `breaks` must start at 0, increase strictly and hold one more entry
    /// than `values`.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>, domain_end: f64) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(Error::InvalidParams("need one more breakpoint than values".into()));
        }
        if breaks[0] != 0.0 {
            return Err(Error::InvalidParams("breakpoints must start at 0".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("breakpoints must increase strictly".into()));
        }
        if *breaks.last().expect("nonempty") > domain_end {
            return Err(Error::InvalidParams("last breakpoint exceeds the domain".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("step values must be finite".into()));
        }
        let monotone = if values.windows(2).all(|w| w[1] <= w[0]) && values.last().is_none_or(|v| *v >= 0.0) {
            Monotone::Nonincreasing
        } else {
            Monotone::General
        };
        Ok(StepFunction { breaks, values, domain_end, monotone })
    }

    /// `χ_[0,a)` on `[0, domain_end)`.
    pub fn indicator(a: f64, domain_end: f64) -> Result<Self> {
        if a <= 0.0 {
            return Self::zero(domain_end);
        }
        Self::new(vec![0.0, a], vec![1.0], domain_end)
    }

    pub fn constant(c: f64, domain_end: f64) -> Result<Self> {
        if c == 0.0 {
            return Self::zero(domain_end);
        }
        Self::new(vec![0.0, domain_end], vec![c], domain_end)
    }

    pub fn zero(domain_end: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![], domain_end)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn monotone(&self) -> Monotone {
        self.monotone
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.monotone == Monotone::Nonincreasing
    }

    /// End of the last nonzero piece.
    pub fn support_end(&self) -> f64 {
        *self.breaks.last().expect("nonempty")
    }

    /// `(a, b, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.breaks[i], self.breaks[i + 1], *v))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let k = self.breaks.partition_point(|b| *b <= t);
        if k == 0 || k > self.values.len() {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    /// `∫₀ᵗ sf`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for (a, b, v) in self.pieces() {
            if t <= a {
                break;
            }
            s += v * (b.min(t) - a);
        }
        s
    }

    /// `sf**(t) = (1/t) ∫₀ᵗ sf`.
    pub fn maximal(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::OutOfDomain { value: t, domain: "(0, inf)".into() });
        }
        Ok(self.integral_to(t) / t)
    }

    /// Lebesgue measure of `{s : sf(s) > level}`.
    pub fn level_measure(&self, level: f64) -> f64 {
        self.pieces().filter(|p| p.2 > level).map(|(a, b, _)| b - a).sum()
    }

    /// Pointwise product on the common refinement of the breakpoints.
    pub fn product(&self, other: &StepFunction) -> StepFunction {
        let end = self.support_end().min(other.support_end());
        let mut cuts: Vec<f64> = self
            .breaks
            .iter()
            .chain(&other.breaks)
            .copied()
            .filter(|b| *b <= end)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let values: Vec<f64> = cuts.windows(2).map(|w| self.eval(w[0]) * other.eval(w[0])).collect();
        StepFunction::new(cuts, values, self.domain_end.min(other.domain_end))
            .expect("refinement of valid step functions")
    }

    /// The same function with each value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> StepFunction {
        let values = self.values.iter().map(|v| v * c).collect();
        StepFunction::new(self.breaks.clone(), values, self.domain_end).expect("scaling keeps structure")
    }

    /// Restriction to `[0, t)`.
    pub fn truncated(&self, t: f64) -> StepFunction {
        let mut breaks = vec![0.0];
        let mut values = Vec::new();
        for (a, b, v) in self.pieces() {
            if a >= t {
                break;
            }
            breaks.push(b.min(t));
            values.push(v);
        }
        StepFunction::new(breaks, values, self.domain_end).expect("restriction keeps structure")
    }
}

/// Decreasing rearrangement of `|values|` against the atom masses.
pub fn rearrange_atoms(values: &[f64], weights: &[f64], domain_end: f64) -> StepFunction {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].abs().total_cmp(&values[i].abs()).then(i.cmp(&j)));
    let mut breaks = vec![0.0];
    let mut vals = Vec::new();
    let mut acc = 0.0;
    let mut k = 0;
    while k < order.len() {
        let v = values[order[k]].abs();
        if v == 0.0 {
            break;
        }
        while k < order.len() && values[order[k]].abs() == v {
            acc += weights[order[k]];
            k += 1;
        }
        breaks.push(acc);
        vals.push(v);
    }
    let end = domain_end.max(acc);
    StepFunction::new(breaks, vals, end).expect("sorted accumulation")
}

/// `f*`, computed by sorting `|f|` in decreasing order and accumulating masses.
pub fn decreasing_rearrangement(space: &SampleSpace, f: &Field) -> Result<StepFunction> {
    f.check_aligned(space)?;
    Ok(rearrange_atoms(f.values(), space.weights(), space.discrete_measure()))
}

/// `μ_f(t) = μ{|f| > t}` as a step function of `t ∈ [0, max |f|)`.
pub fn distribution_function(space: &SampleSpace, f: &Field) -> Result<StepFunction> {
    let star = decreasing_rearrangement(space, f)?;
    let top = star.values().first().copied().unwrap_or(0.0);
    let mut breaks = vec![0.0];
    let mut vals = Vec::new();
    // On [v_i, v_{i-1}) exactly the first i levels exceed t.
    for i in (0..star.values().len()).rev() {
        breaks.push(star.values()[i]);
        vals.push(star.breakpoints()[i + 1]);
    }
    StepFunction::new(breaks, vals, top)
}

/// Smallest attained value `m` with `μ{f ≤ m} ≥ μ/2`; it also satisfies
/// `μ{f ≥ m} ≥ μ/2`.
pub fn median(space: &SampleSpace, f: &Field) -> Result<f64> {
    if !space.is_finite() {
        return Err(Error::InfiniteMeasure);
    }
    f.check_aligned(space)?;
    median_atoms(f.values(), space.weights())
}

pub(crate) fn median_atoms(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParams("median of an empty field".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let total: f64 = weights.iter().sum();
    let half = 0.5 * total * (1.0 - 1e-12);
    let mut acc = 0.0;
    let mut k = 0;
    while k < order.len() {
        let v = values[order[k]];
        while k < order.len() && values[order[k]] == v {
            acc += weights[order[k]];
            k += 1;
        }
        if acc >= half {
            return Ok(v);
        }
    }
    Ok(values[order[order.len() - 1]])
}

/// Rearrangement-invariant norms, evaluated on decreasing rearrangements.
#[derive(Clone, Debug)]
pub enum RiNorm {
    Lp(f64),
    /// `(∫ (f*(s) s^{1/p})^q ds/s)^{1/q}`, so that `Lorentz(p, p) = Lp`.
    Lorentz { p: f64, q: f64 },
    /// `sup f*(t) Φ(t)`.
    Marcinkiewicz(Profile),
    /// `sup f*(t) t^{1/n} (1 + log(domain / t))`.
    LogLorentz { n: f64, domain: f64 },
}

impl RiNorm {
    pub fn label(&self) -> String {
        match self {
            RiNorm::Lp(p) => format!("L{p}"),
            RiNorm::Lorentz { p, q } => format!("L({p},{q})"),
            RiNorm::Marcinkiewicz(prof) => format!("M[{}]", prof.label()),
            RiNorm::LogLorentz { n, .. } => format!("Llog({n},inf)"),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::UnsupportedNorm(m.into()));
        match *self {
            RiNorm::Lp(p) if !(p >= 1.0) => bad("Lp needs p >= 1"),
            RiNorm::Lorentz { p, q } if !(p >= 1.0 && q >= 1.0) => bad("Lorentz needs p, q >= 1"),
            RiNorm::Lorentz { p, q } if p.is_infinite() && q.is_infinite() => {
                bad("Lorentz(inf, inf) is not supported")
            }
            RiNorm::LogLorentz { n, domain } if !(n >= 1.0 && domain > 0.0 && domain.is_finite()) => {
                bad("LogLorentz needs n >= 1 and a finite domain")
            }
            _ => Ok(()),
        }
    }
}

fn require_monotone(sf: &StepFunction) -> Result<()> {
    if !sf.is_nonincreasing() {
        return Err(Error::UnsupportedNorm("norms apply to nonincreasing step functions".into()));
    }
    Ok(())
}

/// `‖sf‖` for a nonincreasing step function (a decreasing rearrangement).
pub fn ri_norm(sf: &StepFunction, norm: &RiNorm) -> Result<f64> {
    require_monotone(sf)?;
    norm.validate()?;
    Ok(match norm {
        RiNorm::Lp(p) => lp(sf, *p),
        RiNorm::Lorentz { p, q } => {
            if p == q {
                lp(sf, *p)
            } else if q.is_infinite() {
                sf.pieces().map(|(_, b, v)| v * b.powf(1.0 / p)).fold(0.0, f64::max)
            } else if p.is_infinite() {
                if sf.pieces().any(|x| x.2 > 0.0) {
                    f64::INFINITY
                } else {
                    0.0
                }
            } else {
                let e = q / p;
                sf.pieces()
                    .map(|(a, b, v)| v.powf(*q) * (p / q) * (b.powf(e) - a.powf(e)))
                    .sum::<f64>()
                    .powf(1.0 / q)
            }
        }
        RiNorm::Marcinkiewicz(profile) => marcinkiewicz_sup(sf, profile, 0.0, f64::INFINITY).0,
        RiNorm::LogLorentz { n, domain } => {
            let tc = domain * (1.0 - n).exp();
            let w = |t: f64| t.powf(1.0 / n) * (1.0 + (domain / t).ln());
            sf.pieces()
                .filter(|p| p.0 < *domain)
                .map(|(a, b, v)| {
                    let b = b.min(*domain);
                    let t = if b <= tc {
                        b
                    } else if a >= tc {
                        a
                    } else {
                        tc
                    };
                    if t <= 0.0 {
                        0.0
                    } else {
                        v * w(t)
                    }
                })
                .fold(0.0, f64::max)
        }
    })
}

fn lp(sf: &StepFunction, p: f64) -> f64 {
    if p.is_infinite() {
        return sf.values().first().copied().unwrap_or(0.0);
    }
    if p == 1.0 {
        return sf.pieces().map(|(a, b, v)| v * (b - a)).sum();
    }
    sf.pieces().map(|(a, b, v)| v.powf(p) * (b - a)).sum::<f64>().powf(1.0 / p)
}

/// `sup f*(t) Φ(t)` restricted to pieces ending in `[min_t, max_t]`, with the
/// right endpoint where it is attained. `Φ` is continuous and nondecreasing,
/// so each piece contributes its value times `Φ` at its right end.
pub(crate) fn marcinkiewicz_sup(sf: &StepFunction, profile: &Profile, min_t: f64, max_t: f64) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for (_, b, v) in sf.pieces() {
        if b < min_t || b > max_t {
            continue;
        }
        let x = v * profile.phi(b);
        if x > best.0 {
            best = (x, b);
        }
    }
    best
}

/// Positive multiplier `h(t)` for [`ri_norm_weighted`].
pub enum Weighting<'a> {
    /// `coef · t^exponent`.
    Power { coef: f64, exponent: f64 },
    /// A general positive nonincreasing function.
    Function(&'a (dyn Fn(f64) -> f64 + Sync)),
}

/// `‖sf(t) h(t) χ_(0,cut)(t)‖` for nonincreasing `sf` and nonincreasing `h`;
/// the product is then its own rearrangement.
pub fn ri_norm_weighted(sf: &StepFunction, h: &Weighting, norm: &RiNorm, cut: f64) -> Result<f64> {
    require_monotone(sf)?;
    norm.validate()?;
    // ∫_a^b h(t)^q t^gamma dt.
    let piece_integral = |a: f64, b: f64, q: f64, gamma: f64| -> f64 {
        match h {
            Weighting::Power { coef, exponent } => {
                let k = exponent * q + gamma;
                let c = coef.powf(q);
                if (k + 1.0).abs() < 1e-14 {
                    if a == 0.0 {
                        f64::INFINITY
                    } else {
                        c * (b / a).ln()
                    }
                } else if k + 1.0 < 0.0 && a == 0.0 {
                    f64::INFINITY
                } else {
                    c * (b.powf(k + 1.0) - a.powf(k + 1.0)) / (k + 1.0)
                }
            }
            Weighting::Function(f) => {
                let g = |t: f64| f(t).powf(q) * t.powf(gamma);
                let logged = |y: f64| g(y.exp()) * y.exp();
                if a > 0.0 && b / a < 1.5 {
                    return quad::gauss_legendre(logged, a.ln(), b.ln());
                }
                let scale = if a > 0.0 { quad::gauss_legendre(logged, a.ln(), b.ln()).abs() } else { g(b).abs() * b };
                quad::integrate(g, a, b, 1e-9 * scale + 1e-300)
            }
        }
    };
    let pieces: Vec<(f64, f64, f64)> = sf
        .pieces()
        .filter(|p| p.0 < cut && p.2 > 0.0)
        .map(|(a, b, v)| (a, b.min(cut), v))
        .collect();
    let integral_norm = |q: f64, gamma: f64, factor: f64| -> f64 {
        pieces
            .iter()
            .map(|&(a, b, v)| v.powf(q) * factor * piece_integral(a, b, q, gamma))
            .sum::<f64>()
            .powf(1.0 / q)
    };
    match norm {
        RiNorm::Lp(p) if p.is_finite() => Ok(integral_norm(*p, 0.0, 1.0)),
        RiNorm::Lorentz { p, q } if q.is_finite() && p.is_finite() => Ok(integral_norm(*q, q / p - 1.0, 1.0)),
        RiNorm::Lp(_) | RiNorm::Lorentz { .. } => match (h, pieces.first()) {
            (_, None) => Ok(0.0),
            (Weighting::Power { coef, exponent }, Some(_)) => {
                let inv_p = match norm {
                    RiNorm::Lorentz { p, .. } => 1.0 / p,
                    _ => 0.0,
                };
                let e = exponent + inv_p;
                Ok(pieces
                    .iter()
                    .map(|&(a, b, v)| {
                        let t = if e >= 0.0 { b } else { a };
                        if t == 0.0 && e < 0.0 {
                            f64::INFINITY
                        } else {
                            v * coef * t.powf(e)
                        }
                    })
                    .fold(0.0, f64::max))
            }
            (Weighting::Function(_), Some(_)) => {
                Err(Error::UnsupportedNorm("sup-type norm of a general weighting".into()))
            }
        },
        RiNorm::Marcinkiewicz(_) | RiNorm::LogLorentz { .. } => {
            Err(Error::UnsupportedNorm("weighted evaluation supports Lp and Lorentz norms".into()))
        }
    }
}

/// `(∫₀ᵗ (uv)*, ∫₀ᵗ u* v*)`; the first never exceeds the second.
pub fn product_partial_integral(space: &SampleSpace, u: &Field, v: &Field, t: f64) -> Result<(f64, f64)> {
    let uv = u.zip_with(v, |a, b| a * b);
    let lhs = decreasing_rearrangement(space, &uv)?.integral_to(t);
    let us = decreasing_rearrangement(space, u)?;
    let vs = decreasing_rearrangement(space, v)?;
    Ok((lhs, us.product(&vs).integral_to(t)))
}
