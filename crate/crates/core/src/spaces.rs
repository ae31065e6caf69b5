//! Discretized metric measure spaces.
//!
//! Every space is a finite set of atoms with coordinates and masses. Unbounded
//! spaces are truncated; atoms near the truncation edge form a boundary layer
//! where compactly supported functions must vanish.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{unit_ball_volume, Profile};

/// Largest atom count accepted by [`build_space`].
pub const MAX_ATOMS: usize = 4_000_000;

/// Mass deficit tolerated when truncating a log-concave measure.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// Cartesian grid on `[-halfwidth, halfwidth]ⁿ`. Unless `bounded`, it stands
    /// for all of ℝⁿ truncated to the box.
    EuclideanBox {
        n: usize,
        halfwidth: f64,
        resolution: usize,
        #[serde(default)]
        bounded: bool,
    },
    /// ℝ² truncated to a disk and cut into annular cells of width
    /// `radius / resolution`.
    EuclideanDisk { radius: f64, resolution: usize },
    /// Upper half-plane truncated to `[-halfwidth, halfwidth] × [0, halfwidth]`.
    HalfPlane { halfwidth: f64, resolution: usize },
    /// Unit sphere Sⁿ (n = 1, 2) with the uniform probability measure.
    Sphere { n: usize, resolution: usize },
    /// Product of one-dimensional measures with density ∝ `exp(-|x|^p / p)`.
    LogConcave {
        p: f64,
        n: usize,
        resolution: usize,
        #[serde(default)]
        truncation: Option<f64>,
    },
}

impl SpaceSpec {
    pub fn label(&self) -> String {
        match self {
            SpaceSpec::EuclideanBox { n, halfwidth, resolution, bounded } => {
                let b = if *bounded { ",bounded" } else { "" };
                format!("euclidean_box(n={n},L={halfwidth},res={resolution}{b})")
            }
            SpaceSpec::EuclideanDisk { radius, resolution } => {
                format!("euclidean_disk(R={radius},res={resolution})")
            }
            SpaceSpec::HalfPlane { halfwidth, resolution } => {
                format!("half_plane(L={halfwidth},res={resolution})")
            }
            SpaceSpec::Sphere { n, resolution } => format!("sphere(n={n},res={resolution})"),
            SpaceSpec::LogConcave { p, n, resolution, .. } => {
                format!("log_concave(p={p},n={n},res={resolution})")
            }
        }
    }

    fn resolution(&self) -> usize {
        match *self {
            SpaceSpec::EuclideanBox { resolution, .. }
            | SpaceSpec::EuclideanDisk { resolution, .. }
            | SpaceSpec::HalfPlane { resolution, .. }
            | SpaceSpec::Sphere { resolution, .. }
            | SpaceSpec::LogConcave { resolution, .. } => resolution,
        }
    }
}

#[derive(Debug)]
struct Graph {
    offsets: Vec<usize>,
    idx: Vec<u32>,
}

/// A finite weighted point set approximating `(Ω, d, μ)`.
#[derive(Debug)]
pub struct SampleSpace {
    spec: SpaceSpec,
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    measure: f64,
    spacing: f64,
    geodesic: bool,
    layer: Vec<bool>,
    neighbor_radius: f64,
    graph: OnceLock<Graph>,
}

/// Estimated Minkowski content with the difference quotients behind it.
#[derive(Clone, Debug, Serialize)]
pub struct Perimeter {
    pub value: f64,
    /// `(h, (μ(A_h) - μ(A)) / h)` for each offset, largest `h` first.
    pub quotients: Vec<(f64, f64)>,
    pub degenerate: bool,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

/// Builds the discretization described by `spec`.
pub fn build_space(spec: &SpaceSpec) -> Result<SampleSpace> {
    let res = spec.resolution();
    if res < 8 {
        return Err(invalid(format!("resolution {res} is below the minimum of 8")));
    }
    match *spec {
        SpaceSpec::EuclideanBox { n, halfwidth, resolution, bounded } => {
            build_box(spec, n, halfwidth, resolution, bounded)
        }
        SpaceSpec::EuclideanDisk { radius, resolution } => build_disk(spec, radius, resolution),
        SpaceSpec::HalfPlane { halfwidth, resolution } => build_half_plane(spec, halfwidth, resolution),
        SpaceSpec::Sphere { n, resolution } => build_sphere(spec, n, resolution),
        SpaceSpec::LogConcave { p, n, resolution, truncation } => {
            build_log_concave(spec, p, n, resolution, truncation)
        }
    }
}

fn check_count(count: usize) -> Result<()> {
    if count > MAX_ATOMS {
        return Err(invalid(format!("{count} atoms exceed the limit of {MAX_ATOMS}")));
    }
    Ok(())
}

fn grid_coordinates(n: usize, res: usize, lo: f64, h: f64) -> Vec<f64> {
    let count = res.pow(n as u32);
    let mut coords = Vec::with_capacity(count * n);
    for flat in 0..count {
        let mut rem = flat;
        for _ in 0..n {
            coords.push(lo + ((rem % res) as f64 + 0.5) * h);
            rem /= res;
        }
    }
    coords
}

fn build_box(spec: &SpaceSpec, n: usize, halfwidth: f64, res: usize, bounded: bool) -> Result<SampleSpace> {
    if n == 0 || n > 3 {
        return Err(invalid(format!("box dimension {n} must be 1, 2 or 3")));
    }
    if !(halfwidth > 0.0 && halfwidth.is_finite()) {
        return Err(invalid("halfwidth must be positive"));
    }
    check_count(res.saturating_pow(n as u32))?;
    let h = 2.0 * halfwidth / res as f64;
    let coords = grid_coordinates(n, res, -halfwidth, h);
    let count = coords.len() / n;
    let weights = vec![h.powi(n as i32); count];
    let layer = if bounded {
        vec![false; count]
    } else {
        coords
            .chunks(n)
            .map(|x| x.iter().any(|c| c.abs() > halfwidth - 2.0 * h))
            .collect()
    };
    let measure = if bounded { (2.0 * halfwidth).powi(n as i32) } else { f64::INFINITY };
    let radius = if n == 3 { 1.8 * h } else if n == 2 { 5.1 * h } else { 1.5 * h };
    Ok(SampleSpace::assemble(spec, n, coords, weights, measure, h, false, layer, radius))
}

fn build_disk(spec: &SpaceSpec, radius: f64, res: usize) -> Result<SampleSpace> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("disk radius must be positive"));
    }
    let dr = radius / res as f64;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut layer = Vec::new();
    for k in 0..res {
        let mid = k as f64 + 0.5;
        let cells = ((2.0 * PI * mid).round() as usize).max(3);
        let rho = mid * dr;
        let w = PI * (2.0 * k as f64 + 1.0) * dr * dr / cells as f64;
        for j in 0..cells {
            let a = (j as f64 + 0.5) * 2.0 * PI / cells as f64;
            coords.push(rho * a.cos());
            coords.push(rho * a.sin());
            weights.push(w);
            layer.push(k + 2 >= res);
        }
        check_count(weights.len())?;
    }
    Ok(SampleSpace::assemble(spec, 2, coords, weights, f64::INFINITY, dr, false, layer, 5.1 * dr))
}

fn build_half_plane(spec: &SpaceSpec, halfwidth: f64, res: usize) -> Result<SampleSpace> {
    if !(halfwidth > 0.0 && halfwidth.is_finite()) {
        return Err(invalid("halfwidth must be positive"));
    }
    let rows = res / 2;
    check_count(res * rows)?;
    let h = 2.0 * halfwidth / res as f64;
    let mut coords = Vec::with_capacity(2 * res * rows);
    let mut layer = Vec::with_capacity(res * rows);
    for j in 0..rows {
        let y = (j as f64 + 0.5) * h;
        for i in 0..res {
            let x = -halfwidth + (i as f64 + 0.5) * h;
            coords.push(x);
            coords.push(y);
            layer.push(x.abs() > halfwidth - 2.0 * h || y > halfwidth - 2.0 * h);
        }
    }
    let weights = vec![h * h; res * rows];
    Ok(SampleSpace::assemble(spec, 2, coords, weights, f64::INFINITY, h, false, layer, 5.1 * h))
}

fn build_sphere(spec: &SpaceSpec, n: usize, res: usize) -> Result<SampleSpace> {
    match n {
        1 => {
            let mut coords = Vec::with_capacity(2 * res);
            for j in 0..res {
                let a = (j as f64 + 0.5) * 2.0 * PI / res as f64;
                coords.push(a.cos());
                coords.push(a.sin());
            }
            let h = 2.0 * PI / res as f64;
            let weights = vec![1.0 / res as f64; res];
            Ok(SampleSpace::assemble(spec, 2, coords, weights, 1.0, h, true, vec![false; res], 1.5 * h))
        }
        2 => {
            let dl = PI / res as f64;
            let mut coords = Vec::new();
            let mut weights = Vec::new();
            for j in 0..res {
                let lo = -PI / 2.0 + j as f64 * dl;
                let hi = lo + dl;
                let lat = lo + 0.5 * dl;
                let cells = ((2.0 * res as f64 * lat.cos()).round() as usize).max(3);
                let band = (hi.sin() - lo.sin()) / 2.0;
                for k in 0..cells {
                    let lon = (k as f64 + 0.5) * 2.0 * PI / cells as f64;
                    coords.push(lat.cos() * lon.cos());
                    coords.push(lat.cos() * lon.sin());
                    coords.push(lat.sin());
                    weights.push(band / cells as f64);
                }
                check_count(weights.len())?;
            }
            let count = weights.len();
            Ok(SampleSpace::assemble(spec, 3, coords, weights, 1.0, dl, true, vec![false; count], 5.1 * dl))
        }
        _ => Err(invalid(format!("sphere dimension {n} is not supported (use 1 or 2)"))),
    }
}

fn build_log_concave(
    spec: &SpaceSpec,
    p: f64,
    n: usize,
    res: usize,
    truncation: Option<f64>,
) -> Result<SampleSpace> {
    if !(1.0..=2.0).contains(&p) {
        return Err(invalid(format!("log-concave exponent p = {p} outside [1, 2]")));
    }
    if n == 0 || n > 2 {
        return Err(invalid(format!("log-concave dimension {n} must be 1 or 2")));
    }
    let t = truncation.unwrap_or_else(|| (25.0 * p).powf(1.0 / p));
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid("truncation must be positive"));
    }
    check_count(res.saturating_pow(n as u32))?;
    let profile = Profile::log_concave(p)?;
    let cdf = |x: f64| profile.cumulative(x).expect("line profile");
    let h = 2.0 * t / res as f64;
    let masses: Vec<f64> = (0..res)
        .map(|i| {
            let a = -t + i as f64 * h;
            let b = a + h;
            if a >= 0.0 {
                cdf(-a) - cdf(-b)
            } else {
                cdf(b) - cdf(a)
            }
        })
        .collect();
    let line_mass: f64 = masses.iter().sum();
    let deficit = 1.0 - line_mass.powi(n as i32);
    if deficit > TRUNCATION_TOLERANCE {
        return Err(Error::TruncationInsufficient { deficit, tolerance: TRUNCATION_TOLERANCE });
    }
    let coords = grid_coordinates(n, res, -t, h);
    let count = coords.len() / n;
    let mut weights = Vec::with_capacity(count);
    for flat in 0..count {
        let mut rem = flat;
        let mut w = 1.0;
        for _ in 0..n {
            w *= masses[rem % res];
            rem /= res;
        }
        weights.push(w);
    }
    // The truncated tails carry less mass than the tolerance and the cut
    // creates no perimeter, so no atom is treated as boundary.
    let layer = vec![false; count];
    let radius = if n == 2 { 5.1 * h } else { 1.5 * h };
    Ok(SampleSpace::assemble(spec, n, coords, weights, 1.0, h, false, layer, radius))
}

impl SampleSpace {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        spec: &SpaceSpec,
        dim: usize,
        coords: Vec<f64>,
        weights: Vec<f64>,
        measure: f64,
        spacing: f64,
        geodesic: bool,
        layer: Vec<bool>,
        neighbor_radius: f64,
    ) -> Self {
        SampleSpace {
            spec: spec.clone(),
            dim,
            coords,
            weights,
            measure,
            spacing,
            geodesic,
            layer,
            neighbor_radius,
            graph: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn label(&self) -> String {
        self.spec.label()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Number of ambient coordinates per atom.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `μ(Ω)`; `+inf` for truncated unbounded spaces.
    pub fn total_measure(&self) -> f64 {
        self.measure
    }

    /// Sum of all atom masses.
    pub fn discrete_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.measure.is_finite()
    }

    /// Characteristic cell size.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn in_boundary_layer(&self, i: usize) -> bool {
        self.layer[i]
    }

    pub fn boundary_layer(&self) -> &[bool] {
        &self.layer
    }

    /// The profile of the continuous space this discretization stands for.
    pub fn natural_profile(&self) -> Result<Profile> {
        match self.spec {
            SpaceSpec::EuclideanBox { n, bounded: false, .. } => Profile::euclidean(n as u32),
            SpaceSpec::EuclideanDisk { .. } => Profile::euclidean(2),
            SpaceSpec::HalfPlane { .. } => Ok(Profile::half_plane()),
            SpaceSpec::Sphere { n, .. } => Profile::sphere(n as u32),
            SpaceSpec::LogConcave { p, .. } => Profile::log_concave(p),
            SpaceSpec::EuclideanBox { bounded: true, .. } => Err(Error::UnsupportedKind("natural_profile")),
        }
    }

    /// Distance between two ambient points (geodesic on the sphere).
    pub fn metric(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.geodesic {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let cross = if self.dim == 3 {
                let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
            } else {
                (a[0] * b[1] - a[1] * b[0]).abs()
            };
            cross.atan2(dot)
        } else {
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        }
    }

    /// Distance between atoms `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric(self.point(i), self.point(j))
    }

    /// Distance from atom `i` to an ambient point (on the sphere, a unit vector).
    pub fn distance_to(&self, i: usize, x: &[f64]) -> f64 {
        self.metric(self.point(i), x)
    }

    /// Sum of masses of atoms whose coordinates satisfy `pred`.
    pub fn measure_of(&self, pred: impl Fn(&[f64]) -> bool) -> f64 {
        self.points().zip(&self.weights).filter(|(x, _)| pred(x)).map(|(_, w)| w).sum()
    }

    /// Membership mask of atoms whose coordinates satisfy `pred`.
    pub fn select(&self, pred: impl Fn(&[f64]) -> bool) -> Vec<bool> {
        self.points().map(pred).collect()
    }

    pub fn measure_mask(&self, mask: &[bool]) -> f64 {
        mask.iter().zip(&self.weights).filter(|(m, _)| **m).map(|(_, w)| w).sum()
    }

    /// `∫ v dμ`.
    pub fn integral(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `(∫ |v|^p dμ)^(1/p)`.
    pub fn lp_norm(&self, values: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return values.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        if p == 1.0 {
            return values.iter().zip(&self.weights).map(|(v, w)| v.abs() * w).sum();
        }
        values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Measure of the metric ball of radius `r` in the continuous space.
    pub fn ball_measure(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Ok(0.0);
        }
        match self.spec {
            SpaceSpec::EuclideanBox { n, .. } => Ok(unit_ball_volume(n as u32) * r.powi(n as i32)),
            SpaceSpec::EuclideanDisk { .. } => Ok(PI * r * r),
            SpaceSpec::Sphere { n: 1, .. } => Ok((r / PI).min(1.0)),
            SpaceSpec::Sphere { .. } => Ok(if r >= PI { 1.0 } else { (1.0 - r.cos()) / 2.0 }),
            SpaceSpec::HalfPlane { .. } | SpaceSpec::LogConcave { .. } => {
                Err(Error::UnsupportedKind("ball_measure"))
            }
        }
    }

    fn graph(&self) -> &Graph {
        self.graph.get_or_init(|| self.build_graph())
    }

    fn build_graph(&self) -> Graph {
        let r = self.neighbor_radius;
        // Chord length never exceeds geodesic distance, so ambient buckets of
        // side r contain every candidate.
        let key = |x: &[f64]| {
            let mut k = [0i64; 3];
            for (d, c) in x.iter().enumerate() {
                k[d] = (c / r).floor() as i64;
            }
            k
        };
        let mut buckets: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        for (i, x) in self.points().enumerate() {
            buckets.entry(key(x)).or_default().push(i as u32);
        }
        let dim = self.dim;
        // Sequential on purpose: this runs inside `OnceLock::get_or_init`, and a
        // rayon worker waiting here could steal a task that blocks on the same cell.
        let lists: Vec<Vec<u32>> = (0..self.len())
            .map(|i| {
                let x = self.point(i);
                let k = key(x);
                let mut out = Vec::new();
                let span = |d: usize| if d < dim { -1..=1 } else { 0..=0 };
                for a in span(0) {
                    for b in span(1) {
                        for c in span(2) {
                            if let Some(v) = buckets.get(&[k[0] + a, k[1] + b, k[2] + c]) {
                                for &j in v {
                                    let j = j as usize;
                                    if j != i && self.distance(i, j) <= r * (1.0 + 1e-12) {
                                        out.push(j as u32);
                                    }
                                }
                            }
                        }
                    }
                }
                out.sort_unstable();
                out
            })
            .collect();
        let mut offsets = Vec::with_capacity(self.len() + 1);
        offsets.push(0);
        let mut idx = Vec::new();
        for l in lists {
            idx.extend_from_slice(&l);
            offsets.push(idx.len());
        }
        Graph { offsets, idx }
    }

    /// Neighbors of atom `i` with their distances.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let g = self.graph();
        g.idx[g.offsets[i]..g.offsets[i + 1]]
            .iter()
            .map(move |&j| (j as usize, self.distance(i, j as usize)))
    }

    /// Modulus of the gradient of `f`: the supplied analytic values, or the
    /// largest difference quotient over the neighbor stencil.
    pub fn gradient_modulus(&self, f: &Field) -> Result<Field> {
        f.check_aligned(self)?;
        if let Some(g) = &f.gradient {
            return Ok(Field::new(g.clone()));
        }
        let vals = &f.values;
        let out: Vec<Option<f64>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let mut best: Option<f64> = None;
                for (j, d) in self.neighbors(i) {
                    let q = (vals[i] - vals[j]).abs() / d;
                    best = Some(best.map_or(q, |b| b.max(q)));
                }
                best
            })
            .collect();
        let mut g = Vec::with_capacity(out.len());
        for (i, v) in out.into_iter().enumerate() {
            g.push(v.ok_or(Error::MissingNeighbors(i))?);
        }
        Ok(Field::new(g))
    }

    /// Default offsets for [`Self::minkowski_content`]: 16, 8 and 4 cells.
    pub fn default_offsets(&self) -> Vec<f64> {
        vec![16.0 * self.spacing, 8.0 * self.spacing, 4.0 * self.spacing]
    }

    /// Minkowski content of the atom set `mask`.
    ///
    /// `A_h` collects the atoms within distance `h` of `A`, each entering
    /// gradually over a ramp of two cells so lattice layers parallel to the
    /// boundary do not make the count jump. On a grid the
    /// sampled boundary sits an unknown fraction of a cell inside the true
    /// one, so `μ(A_h) - μ(A)` is affine in `h` up to curvature terms with an
    /// unknown intercept. The content is taken from the slopes between the
    /// three smallest offsets, extrapolated linearly to zero.
    pub fn minkowski_content(&self, mask: &[bool], offsets: &[f64]) -> Result<Perimeter> {
        if mask.len() != self.len() {
            return Err(Error::Misaligned { expected: self.len(), got: mask.len() });
        }
        let mut hs: Vec<f64> = offsets.to_vec();
        hs.sort_by(|a, b| b.total_cmp(a));
        if hs.len() < 3 {
            return Err(invalid("at least three offsets are needed for extrapolation"));
        }
        if hs.iter().any(|&h| !(h >= 2.0 * self.spacing * (1.0 - 1e-12)) || !h.is_finite()) {
            return Err(invalid("offsets must be at least twice the grid spacing"));
        }
        if hs.windows(2).any(|w| w[0] <= w[1]) {
            return Err(invalid("offsets must be distinct"));
        }
        let near = 1.5 * self.spacing;
        let edge: Vec<usize> = (0..self.len())
            .filter(|&i| mask[i] && self.neighbors(i).any(|(j, d)| !mask[j] && d <= near))
            .collect();
        if edge.is_empty() {
            let quotients = hs.iter().map(|&h| (h, 0.0)).collect();
            return Ok(Perimeter { value: 0.0, quotients, degenerate: false });
        }
        let ramp = RAMP_CELLS * self.spacing;
        let reach = hs[0] + ramp;
        // Bounding box of the edge atoms, widened by the largest offset (in chord
        // length, which bounds geodesic length from below).
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for &e in &edge {
            for (d, c) in self.point(e).iter().enumerate() {
                lo[d] = lo[d].min(*c);
                hi[d] = hi[d].max(*c);
            }
        }
        let dist: Vec<f64> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                if mask[i] {
                    return f64::INFINITY;
                }
                let x = self.point(i);
                if x.iter().enumerate().any(|(d, c)| *c < lo[d] - reach || *c > hi[d] + reach) {
                    return f64::INFINITY;
                }
                edge.iter().map(|&e| self.distance(i, e)).fold(f64::INFINITY, f64::min)
            })
            .collect();
        let grown: Vec<f64> = hs
            .iter()
            .map(|&h| {
                dist.iter()
                    .zip(&self.weights)
                    .filter(|(d, _)| **d < h + ramp)
                    .map(|(d, w)| w * smooth_step((h - d) / ramp))
                    .sum()
            })
            .collect();
        let quotients: Vec<(f64, f64)> = hs.iter().zip(&grown).map(|(&h, &g)| (h, g / h)).collect();
        let m = hs.len();
        let (h0, h1, h2) = (hs[m - 1], hs[m - 2], hs[m - 3]);
        let (g0, g1, g2) = (grown[m - 1], grown[m - 2], grown[m - 3]);
        let s_near = (g1 - g0) / (h1 - h0);
        let s_far = (g2 - g1) / (h2 - h1);
        let (c_near, c_far) = (0.5 * (h0 + h1), 0.5 * (h1 + h2));
        let value = s_near - (s_far - s_near) * c_near / (c_far - c_near);
        let degenerate = s_near < 0.0
            || s_far < 0.0
            || value < 0.0
            || (s_far - s_near).abs() > 0.25 * s_near.abs().max(s_far.abs());
        if degenerate {
            return Ok(Perimeter { value: s_near.max(0.0), quotients, degenerate: true });
        }
        Ok(Perimeter { value, quotients, degenerate: false })
    }
}

/// Width, in cells, over which an atom enters the neighborhood `A_h`.
const RAMP_CELLS: f64 = 1.0;

/// Smoothed indicator of `u > 0` rising over `[-1, 1]`.
fn smooth_step(u: f64) -> f64 {
    if u <= -1.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else if u < 0.0 {
        0.5 * (1.0 + u) * (1.0 + u)
    } else {
        1.0 - 0.5 * (1.0 - u) * (1.0 - u)
    }
}

/// A subset of a space described by its geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    All,
    /// Closed metric ball (a geodesic cap on the sphere).
    Ball { center: Vec<f64>, radius: f64 },
    /// `{x : x[axis] ≤ below}`.
    HalfSpace { axis: usize, below: f64 },
    /// `{x : inner ≤ d(x, center) ≤ outer}`.
    Shell { center: Vec<f64>, inner: f64, outer: f64 },
}

impl Region {
    pub fn mask(&self, space: &SampleSpace) -> Result<Vec<bool>> {
        let check_center = |c: &[f64]| {
            if c.len() == space.dim() {
                Ok(())
            } else {
                Err(invalid(format!("region center has {} coordinates, the space {}", c.len(), space.dim())))
            }
        };
        Ok(match self {
            Region::All => vec![true; space.len()],
            Region::Ball { center, radius } => {
                check_center(center)?;
                (0..space.len()).map(|i| space.distance_to(i, center) <= *radius).collect()
            }
            Region::HalfSpace { axis, below } => {
                if *axis >= space.dim() {
                    return Err(invalid(format!("axis {axis} out of range")));
                }
                space.select(|x| x[*axis] <= *below)
            }
            Region::Shell { center, inner, outer } => {
                check_center(center)?;
                (0..space.len())
                    .map(|i| {
                        let d = space.distance_to(i, center);
                        *inner <= d && d <= *outer
                    })
                    .collect()
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            Region::All => "all".into(),
            Region::Ball { radius, .. } => format!("ball(r={radius})"),
            Region::HalfSpace { axis, below } => format!("x{axis}<={below}"),
            Region::Shell { inner, outer, .. } => format!("shell({inner},{outer})"),
        }
    }
}

/// A scalar function on the atoms of a space.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    values: Vec<f64>,
    gradient: Option<Vec<f64>>,
    compact_support: bool,
}

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field { values, gradient: None, compact_support: false }
    }

    /// A field with known gradient modulus at every atom.
    pub fn with_gradient(values: Vec<f64>, gradient: Vec<f64>) -> Self {
        Field { values, gradient: Some(gradient), compact_support: false }
    }

    pub fn from_fn(space: &SampleSpace, f: impl Fn(&[f64]) -> f64) -> Self {
        Field::new(space.points().map(f).collect())
    }

    /// Marks the field as vanishing on the boundary layer.
    pub fn compactly_supported(mut self) -> Self {
        self.compact_support = true;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn analytic_gradient(&self) -> Option<&[f64]> {
        self.gradient.as_deref()
    }

    pub fn has_compact_support(&self) -> bool {
        self.compact_support
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self + c`; the gradient is unchanged.
    pub fn shifted(&self, c: f64) -> Field {
        Field {
            values: self.values.iter().map(|v| v + c).collect(),
            gradient: self.gradient.clone(),
            compact_support: self.compact_support && c == 0.0,
        }
    }

    /// `c · self`.
    pub fn scaled(&self, c: f64) -> Field {
        Field {
            values: self.values.iter().map(|v| v * c).collect(),
            gradient: self.gradient.as_ref().map(|g| g.iter().map(|v| v * c.abs()).collect()),
            compact_support: self.compact_support,
        }
    }

    /// Pointwise `op(self, other)`, dropping gradient information.
    pub fn zip_with(&self, other: &Field, op: impl Fn(f64, f64) -> f64) -> Field {
        Field::new(self.values.iter().zip(&other.values).map(|(a, b)| op(*a, *b)).collect())
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Field {
        Field::new(self.values.iter().map(|v| op(*v)).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_aligned(&self, space: &SampleSpace) -> Result<()> {
        if self.values.len() != space.len() {
            return Err(Error::Misaligned { expected: space.len(), got: self.values.len() });
        }
        if let Some(g) = &self.gradient {
            if g.len() != space.len() {
                return Err(Error::Misaligned { expected: space.len(), got: g.len() });
            }
        }
        Ok(())
    }

    /// Checks alignment, finiteness and, when flagged, vanishing on the
    /// boundary layer.
    pub fn validate(&self, space: &SampleSpace) -> Result<()> {
        self.check_aligned(space)?;
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        if self.compact_support {
            let tol = 1e-12 * self.sup_norm().max(f64::MIN_POSITIVE);
            if let Some(i) = (0..space.len()).find(|&i| space.in_boundary_layer(i) && self.values[i].abs() > tol) {
                return Err(invalid(format!("compactly supported field is nonzero on boundary atom {i}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(res: usize) -> SampleSpace {
        build_space(&SpaceSpec::EuclideanBox { n: 2, halfwidth: 4.0, resolution: res, bounded: false }).unwrap()
    }

    #[test]
    fn total_measures() {
        let s = build_space(&SpaceSpec::Sphere { n: 2, resolution: 128 }).unwrap();
        assert!((s.discrete_measure() - 1.0).abs() < 1e-12);
        assert_eq!(s.total_measure(), 1.0);
        let b = plane(64);
        assert!((b.discrete_measure() - 64.0).abs() < 1e-10);
        assert!(b.total_measure().is_infinite());
        let g = build_space(&SpaceSpec::LogConcave { p: 2.0, n: 1, resolution: 4096, truncation: Some(8.0) }).unwrap();
        assert!((g.discrete_measure() - 1.0).abs() < 1e-6);
        let d = build_space(&SpaceSpec::EuclideanDisk { radius: 4.0, resolution: 64 }).unwrap();
        assert!((d.discrete_measure() - 16.0 * PI).abs() < 1e-10);
        let c = build_space(&SpaceSpec::Sphere { n: 1, resolution: 64 }).unwrap();
        assert!((c.discrete_measure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_errors() {
        assert!(build_space(&SpaceSpec::Sphere { n: 2, resolution: 4 }).is_err());
        assert!(build_space(&SpaceSpec::LogConcave { p: 3.0, n: 1, resolution: 64, truncation: None }).is_err());
        assert!(matches!(
            build_space(&SpaceSpec::LogConcave { p: 1.0, n: 1, resolution: 64, truncation: Some(5.0) }),
            Err(Error::TruncationInsufficient { .. })
        ));
    }

    #[test]
    fn measure_of_examples() {
        let b = plane(64);
        assert_eq!(b.measure_of(|_| false), 0.0);
        assert!((b.measure_of(|x| x[0] > 0.0) - 32.0).abs() < 1e-10);
        let g = build_space(&SpaceSpec::LogConcave { p: 2.0, n: 1, resolution: 4096, truncation: None }).unwrap();
        assert!((g.measure_of(|x| x[0] <= 0.0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn metric_is_symmetric() {
        let s = build_space(&SpaceSpec::Sphere { n: 2, resolution: 16 }).unwrap();
        for (i, j) in [(0, 5), (3, 100), (40, 41)] {
            assert_eq!(s.distance(i, j), s.distance(j, i));
            assert_eq!(s.distance(i, i), 0.0);
        }
    }

    #[test]
    fn gradients_of_linear_and_norm() {
        let b = plane(256);
        let f = Field::from_fn(&b, |x| x[0]);
        let g = b.gradient_modulus(&f).unwrap();
        for v in g.values() {
            assert!((v - 1.0).abs() < 1e-10);
        }
        let f = Field::from_fn(&b, |x| (x[0] * x[0] + x[1] * x[1]).sqrt());
        let g = b.gradient_modulus(&f).unwrap();
        for (i, x) in b.points().enumerate() {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r > 0.5 && !b.in_boundary_layer(i) {
                assert!((g.values()[i] - 1.0).abs() < 2.0 / 256.0, "{}", g.values()[i]);
            }
        }
        let c = b.gradient_modulus(&Field::new(vec![3.0; b.len()])).unwrap();
        assert!(c.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn analytic_gradient_passes_through() {
        let b = plane(16);
        let f = Field::with_gradient(vec![0.0; b.len()], vec![2.0; b.len()]);
        assert_eq!(b.gradient_modulus(&f).unwrap().values(), &vec![2.0; b.len()][..]);
    }

    #[test]
    fn minkowski_examples() {
        let b = plane(256);
        let empty = vec![false; b.len()];
        assert_eq!(b.minkowski_content(&empty, &b.default_offsets()).unwrap().value, 0.0);
        let half = b.select(|x| x[0] <= 0.0);
        let p = b.minkowski_content(&half, &b.default_offsets()).unwrap();
        assert!((p.value - 8.0).abs() < 0.4, "{p:?}");
        let disk = b.select(|x| x[0] * x[0] + x[1] * x[1] <= 1.0);
        let p = b.minkowski_content(&disk, &b.default_offsets()).unwrap();
        assert!((p.value / (2.0 * PI) - 1.0).abs() < 0.05, "{p:?}");
        assert!(b.minkowski_content(&disk, &[0.01, 0.02, 0.03]).is_err());
    }

    #[test]
    fn sphere_cap_perimeter() {
        let s = build_space(&SpaceSpec::Sphere { n: 2, resolution: 128 }).unwrap();
        for r in [0.4f64, 1.0, 1.5, 2.2] {
            let cap = s.select(|x| x[2] <= -r.cos());
            let p = s.minkowski_content(&cap, &s.default_offsets()).unwrap();
            let exact = r.sin() / 2.0;
            assert!((p.value / exact - 1.0).abs() < 0.05, "r={r} {p:?}");
        }
    }

    #[test]
    fn ball_measures() {
        let b = plane(16);
        assert!((b.ball_measure(1.0).unwrap() - PI).abs() < 1e-14);
        assert_eq!(b.ball_measure(0.0).unwrap(), 0.0);
        let s = build_space(&SpaceSpec::Sphere { n: 2, resolution: 16 }).unwrap();
        assert!((s.ball_measure(1.0).unwrap() - (1.0 - 1f64.cos()) / 2.0).abs() < 1e-14);
        let h = build_space(&SpaceSpec::HalfPlane { halfwidth: 2.0, resolution: 16 }).unwrap();
        assert!(matches!(h.ball_measure(1.0), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn compact_support_is_checked() {
        let b = plane(64);
        let tent = Field::from_fn(&b, |x| (1.0 - (x[0] * x[0] + x[1] * x[1]).sqrt()).max(0.0)).compactly_supported();
        assert!(tent.validate(&b).is_ok());
        let bad = Field::new(vec![1.0; b.len()]).compactly_supported();
        assert!(bad.validate(&b).is_err());
    }
}
