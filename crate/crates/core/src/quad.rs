//! Adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Infinite endpoints are handled by the maps `x = a + s/(1-s)` and
//! `x = s/(1-s^2)`; Kronrod nodes never touch the endpoints, so integrable
//! endpoint singularities are fine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let (v, e) = gk15(f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    loop {
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::NonFinite(format!("integrand on [{a}, {b}]")));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, abs_error: err, evaluations });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::NonConvergence { value: total, abs_error: err, evaluations });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            return Err(Error::NonConvergence { value: total, abs_error: err, evaluations });
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        if err < 0.0 || heap.len() % 64 == 0 {
            // resum to keep the running totals from drifting
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Integrate `f` over `[a, b]`; either endpoint may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidParameter("integration limits must not be NaN".into()));
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(&f, a, b, opts),
        (true, false) => {
            let g = |s: f64| {
                let d = 1.0 - s;
                let x = a + s / d;
                if x.is_finite() {
                    f(x) / (d * d)
                } else {
                    0.0
                }
            };
            adaptive(&g, 0.0, 1.0, opts)
        }
        (false, true) => {
            let g = |s: f64| {
                let d = 1.0 - s;
                let x = b - s / d;
                if x.is_finite() {
                    f(x) / (d * d)
                } else {
                    0.0
                }
            };
            adaptive(&g, 0.0, 1.0, opts)
        }
        (false, false) => {
            let g = |s: f64| {
                let d = 1.0 - s * s;
                let x = s / d;
                if x.is_finite() {
                    f(x) * (1.0 + s * s) / (d * d)
                } else {
                    0.0
                }
            };
            adaptive(&g, -1.0, 1.0, opts)
        }
    }
}

/// Integrate over consecutive panels `[p_0, p_1], [p_1, p_2], ...`.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: &QuadOptions) -> Result<QuadResult> {
    let mut out = QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 };
    for w in points.windows(2) {
        let r = integrate(&f, w[0], w[1], opts)?;
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.evaluations += r.evaluations;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_whole_line() {
        let r = integrate(|x| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &QuadOptions::default()).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn algebraic_tail() {
        let r = integrate(|x| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, &QuadOptions::default()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let o = QuadOptions::default();
        let r = integrate(|x| x.exp(), 1.0, 0.0, &o).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let o = QuadOptions { abs_tol: 1e-300, rel_tol: 0.0, max_intervals: 4 };
        let r = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &o);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
