//! Quadrature and scalar root finding.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_3,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Ten-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..5 {
        s += GL_W[k] * (f(c - h * GL_X[k]) + f(c + h * GL_X[k]));
    }
    s * h
}

/// Gauss–Legendre on `pieces` equal subintervals.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| gauss_legendre(&f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

const MAX_SPLITS: usize = 20_000;

/// Globally adaptive quadrature: the panel with the largest error estimate
/// (ten-point rule against its two halves) is bisected until the summed
/// estimate drops below `tol` or the split budget runs out.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let eval = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let whole = gauss_legendre(&f, a, b);
        let halves = gauss_legendre(&f, a, m) + gauss_legendre(&f, m, b);
        Panel { a, b, value: halves, err: (halves - whole).abs() }
    };
    let first = 8;
    let h = (b - a) / first as f64;
    let mut heap: BinaryHeap<Panel> = (0..first)
        .map(|i| eval(a + i as f64 * h, if i + 1 == first { b } else { a + (i + 1) as f64 * h }))
        .collect();
    let mut done = Vec::new();
    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    for _ in 0..MAX_SPLITS {
        if total_err <= tol || !total_err.is_finite() {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        total_err -= p.err;
        if m <= p.a || m >= p.b {
            done.push(p);
            continue;
        }
        let (l, r) = (eval(p.a, m), eval(m, p.b));
        total_err += l.err + r.err;
        heap.push(l);
        heap.push(r);
    }
    done.extend(heap);
    done.sort_by(|x, y| x.a.total_cmp(&y.a));
    done.iter().map(|p| p.value).sum()
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then(other.a.total_cmp(&self.a))
    }
}

/// Integral of `f` over `(0, b]` for integrands with an integrable power-type
/// singularity at zero. Works in logarithmic coordinates and closes the tail
/// with a power-law fit. Returns `+inf` when the fitted exponent is `<= -1`.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, b: f64, tol: f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let span = 46.0;
    let y_hi = b.ln();
    let y_lo = y_hi - span;
    let body = adaptive(|y: f64| {
        let t = y.exp();
        f(t) * t
    }, y_lo, y_hi, tol);
    let t0 = y_lo.exp();
    let f0 = f(t0);
    if f0 == 0.0 {
        return body;
    }
    let f1 = f(2.0 * t0);
    let e = if f1 > 0.0 && f0 > 0.0 { (f1 / f0).log2() } else { 0.0 };
    if e <= -1.0 + 1e-9 {
        return f64::INFINITY;
    }
    body + f0 * t0 / (e + 1.0)
}

/// Integral of `f` over `[a, b]` with `0 <= a <= b`. Wide ranges are handled in
/// logarithmic coordinates.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a == 0.0 {
        return integrate_from_zero(f, b, tol);
    }
    if b / a > 4.0 {
        adaptive(|y: f64| {
            let t = y.exp();
            f(t) * t
        }, a.ln(), b.ln(), tol)
    } else {
        adaptive(f, a, b, tol)
    }
}

/// Solves `f(x) = target` for a monotone `f` on `[lo, hi]` by bisection.
pub fn invert_monotone<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    let increasing = fhi >= flo;
    let (min, max) = if increasing { (flo, fhi) } else { (fhi, flo) };
    if !(target >= min && target <= max) {
        return Err(Error::TargetOutOfBracket { target, lo: min, hi: max });
    }
    if target == flo {
        return Ok(lo);
    }
    if target == fhi {
        return Ok(hi);
    }
    let scale = min.abs().max(max.abs()).max(1.0);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if (fm - target).abs() <= 1e-12 * scale * 1e-3 {
            return Ok(m);
        }
        if (fm < target) == increasing {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let v = gauss_legendre(|x| x.powi(19) + 3.0 * x * x, -1.0, 2.0);
        let exact = (2f64.powi(20) - 1.0) / 20.0 + 9.0;
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn adaptive_sine() {
        let v = adaptive(f64::sin, 0.0, std::f64::consts::PI, 1e-13);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_integrand_from_zero() {
        let v = integrate_from_zero(|t| t.powf(-0.5), 4.0, 1e-13);
        assert!((v - 4.0).abs() < 1e-9, "{v}");
        let v = integrate_from_zero(|t| t.powf(-0.8), 1.0, 1e-13);
        assert!((v - 5.0).abs() < 1e-6, "{v}");
        assert!(integrate_from_zero(|t| 1.0 / t, 1.0, 1e-12).is_infinite());
    }

    #[test]
    fn bisection_examples() {
        let x = invert_monotone(|t| t * t, 4.0, 0.0, 3.0).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
        let x = invert_monotone(|t| (1.0 + t.sin()) / 2.0, 0.5, -1.5, 1.5).unwrap();
        assert!(x.abs() < 1e-12);
        assert!(matches!(
            invert_monotone(|t| t, 5.0, 0.0, 1.0),
            Err(Error::TargetOutOfBracket { .. })
        ));
    }
}
