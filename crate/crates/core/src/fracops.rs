//! Fractional operators: Riesz-Feller derivatives (spectral, singular
//! integral and Grünwald-Letnikov), the time-shift operator, the
//! logarithmic operator and multivariate multipliers.

use std::f64::consts::PI;
use std::ops::Sub;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::gslaw::{stable_char_exponent, SpectralMeasure};
use crate::quad::{integrate, QuadOptions, QuadResult};
use crate::spectral::{apply_multiplier, Grid1D, MultiplierOutput};

fn check_feller(alpha: f64, gamma_skew: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    let bound = alpha.min(2.0 - alpha);
    if !(gamma_skew.abs() <= bound + 1e-12) {
        return Err(invalid(format!("|gamma| must not exceed min(alpha, 2 - alpha) = {bound}, got {gamma_skew}")));
    }
    if alpha == 1.0 && gamma_skew != 0.0 {
        return Err(Error::Unsupported("alpha = 1 requires a symmetric operator (gamma = 0)".into()));
    }
    Ok(())
}

/// `D^α_γ u` through the multiplier `ψ(θ) = -|θ|^α e^{iγπ sign(θ)/2}`.
pub fn riesz_feller_spectral(values: &[f64], grid: &Grid1D, alpha: f64, gamma_skew: f64) -> Result<MultiplierOutput> {
    check_feller(alpha, gamma_skew)?;
    apply_multiplier(values, grid, |th| stable_char_exponent(alpha, gamma_skew, th))
}

/// Symmetric Riesz derivative (multiplier `-|θ|^α`, `0 < α < 2`) as the
/// hypersingular integral
/// `Γ(1+α) sin(πα/2)/π ∫_0^∞ [u(x+y) - 2u(x) + u(x-y)] y^{-1-α} dy`.
///
/// `u` must be smooth near `x` with integrable tails.
pub fn riesz_regularized_quadrature<U: Fn(f64) -> f64>(u: U, x: f64, alpha: f64) -> Result<QuadResult> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(invalid(format!("quadrature form needs alpha in (0, 2), got {alpha}")));
    }
    let ux = u(x);
    if !ux.is_finite() {
        return Err(Error::NonFinite(format!("u({x})")));
    }
    let y0 = 1e-2;
    // near y = 0 the second difference is u''(x) y^2; u'' from a 5-point stencil
    let d = y0 / 4.0;
    let upp = (-u(x + 2.0 * d) + 16.0 * u(x + d) - 30.0 * ux + 16.0 * u(x - d) - u(x - 2.0 * d)) / (12.0 * d * d);
    let head = upp * y0.powf(2.0 - alpha) / (2.0 - alpha);

    let opts = QuadOptions { abs_tol: 1e-11, rel_tol: 1e-10, max_intervals: 2000 };
    let f = |y: f64| (u(x + y) + u(x - y) - 2.0 * ux) / y.powf(1.0 + alpha);
    let mut panels = vec![y0, 0.1, 0.5];
    let mut y = 1.0;
    while y <= (1u64 << 20) as f64 {
        panels.push(y);
        y *= 2.0;
    }
    let mut out = QuadResult { value: head, abs_error: 0.0, evaluations: 5 };
    for w in panels.windows(2) {
        let r = match integrate(f, w[0], w[1], &opts) {
            Ok(r) => r,
            // long oscillatory panels: keep a small-but-unconverged contribution
            Err(Error::NonConvergence { value, abs_error, evaluations }) if abs_error < 1e-7 => {
                QuadResult { value, abs_error, evaluations }
            }
            Err(e) => return Err(e),
        };
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.evaluations += r.evaluations;
    }
    // beyond the last panel only the -2u(x) part survives
    let y_max = *panels.last().unwrap();
    out.value += -2.0 * ux * y_max.powf(-alpha) / alpha;
    let c = gamma(1.0 + alpha) * (PI * alpha / 2.0).sin() / PI;
    out.value *= c;
    out.abs_error *= c;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Values outside the grid are zero; both ends must already be negligible.
    ZeroExtended,
    /// Values repeat with the grid period; the infinite stencil is wrapped exactly.
    Periodic,
}

/// `w_0 = 1`, `w_k = w_{k-1} (1 - (α+1)/k)`: coefficients of `(1 - z)^α`.
pub fn gl_weights(alpha: f64, count: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(count);
    let mut prev = 1.0;
    for k in 0..count {
        if k > 0 {
            prev *= 1.0 - (alpha + 1.0) / k as f64;
        }
        w.push(prev);
    }
    w
}

/// Weights of the α = 1 scheme: coefficients of `(1 - z) log(1 - z)`.
fn log_weights(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| match k {
            0 => 0.0,
            1 => -1.0,
            _ => 1.0 / (k as f64 * (k as f64 - 1.0)),
        })
        .collect()
}

/// Two one-sided sums `A Σ a_k u_{i-k+p} + B Σ a_k u_{i+k-q}`, times `scale`.
struct Stencil {
    alpha: f64,
    a: f64,
    b: f64,
    p: usize,
    q: usize,
    scale: f64,
    log_kind: bool,
}

impl Stencil {
    fn new(alpha: f64, gamma_skew: f64, h: f64) -> Self {
        if alpha == 1.0 {
            // limit α → 1 of the shifted pair; first order, symmetric only
            return Self { alpha, a: 1.0, b: 1.0, p: 0, q: 1, scale: 1.0 / (PI * h), log_kind: true };
        }
        let (a, b) = if alpha == 2.0 {
            (0.5, 0.5)
        } else {
            let s = (alpha * PI).sin();
            (-((alpha - gamma_skew) * PI / 2.0).sin() / s, -((alpha + gamma_skew) * PI / 2.0).sin() / s)
        };
        let shift = if alpha > 1.0 { 1 } else { 0 };
        Self { alpha, a, b, p: shift, q: shift, scale: h.powf(-alpha), log_kind: false }
    }

    fn weights(&self, count: usize) -> Vec<f64> {
        if self.log_kind {
            log_weights(count)
        } else {
            gl_weights(self.alpha, count)
        }
    }

    /// Generating function of the weights at `z` on the unit circle.
    fn symbol(&self, z: Complex64) -> Complex64 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        if one_minus.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if self.log_kind {
            one_minus * one_minus.ln()
        } else {
            one_minus.powf(self.alpha)
        }
    }
}

/// Circular convolution of two equal-length real sequences.
fn circular_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    fa.iter().map(|c| c.re / n as f64).collect()
}

/// Shifted Grünwald-Letnikov discretisation of the Riesz-Feller derivative
/// with symbol `ψ(θ) = -|θ|^α e^{iγπ sign(θ)/2}`.
///
/// Shift 1 for `α > 1`, none for `α < 1`; `α = 2` reduces to the 3-point
/// Laplacian and `α = 1` (γ = 0) uses a log-weight stencil. First order
/// except at `α = 2`.
pub fn grunwald_letnikov_rf(values: &[f64], h: f64, alpha: f64, gamma_skew: f64, boundary: Boundary) -> Result<Vec<f64>> {
    check_feller(alpha, gamma_skew)?;
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("grid spacing must be positive, got {h}")));
    }
    let n = values.len();
    if n < 4 {
        return Err(invalid("need at least 4 grid values"));
    }
    let st = Stencil::new(alpha, gamma_skew, h);
    let rev: Vec<f64> = values.iter().rev().copied().collect();
    let (left, right) = match boundary {
        Boundary::ZeroExtended => {
            let umax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let edge = values[0].abs().max(values[n - 1].abs());
            if edge > 1e-10 * umax {
                return Err(invalid(format!("zero extension needs negligible end values, got {edge:e} against max {umax:e}")));
            }
            let len = (2 * n + 2).next_power_of_two();
            let mut w = st.weights(n + 2);
            w.resize(len, 0.0);
            let mut u = values.to_vec();
            u.resize(len, 0.0);
            let mut ur = rev;
            ur.resize(len, 0.0);
            (circular_convolve(&w, &u), circular_convolve(&w, &ur))
        }
        Boundary::Periodic => {
            // wrapped weights W_j = Σ_m a_{j+mn}, exactly, from the generating function
            let mut sym: Vec<Complex64> = (0..n).map(|k| st.symbol(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))).collect();
            FftPlanner::new().plan_fft_forward(n).process(&mut sym);
            let w: Vec<f64> = sym.iter().map(|c| c.re / n as f64).collect();
            (circular_convolve(&w, values), circular_convolve(&w, &rev))
        }
    };
    let m = left.len();
    let out = (0..n)
        .map(|i| {
            let l = left[(i + st.p) % m];
            let r = right[(n - 1 - i + st.q) % m];
            st.scale * (st.a * l + st.b * r)
        })
        .collect();
    Ok(out)
}

/// Admissible range for the time argument of an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomain {
    pub lower: f64,
    pub inclusive: bool,
}

impl TimeDomain {
    /// `t > 0`, e.g. Gamma densities in their shape parameter.
    pub const POSITIVE: TimeDomain = TimeDomain { lower: 0.0, inclusive: false };
    /// Any real time, e.g. characteristic functions continued in `t`.
    pub const REAL: TimeDomain = TimeDomain { lower: f64::NEG_INFINITY, inclusive: true };

    pub fn contains(&self, t: f64) -> bool {
        t.is_finite() && (t > self.lower || (self.inclusive && t == self.lower))
    }
}

/// `B^k F(t) = F(t - k)`.
pub fn shift_op<T, F: Fn(f64) -> T>(f: F, t: f64, k: f64, domain: &TimeDomain) -> Result<T> {
    if !k.is_finite() {
        return Err(invalid(format!("shift must be finite, got {k}")));
    }
    if !domain.contains(t - k) {
        return Err(invalid(format!("shifted time t - k = {} lies outside the domain of F", t - k)));
    }
    Ok(f(t - k))
}

/// `(1 - B^k) F(t) = F(t) - F(t - k)`.
pub fn one_minus_shift<T: Sub<Output = T>, F: Fn(f64) -> T>(f: F, t: f64, k: f64, domain: &TimeDomain) -> Result<T> {
    if !domain.contains(t) {
        return Err(invalid(format!("t = {t} lies outside the domain of F")));
    }
    let shifted = shift_op(&f, t, k, domain)?;
    Ok(f(t) - shifted)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesOutput {
    pub values: Vec<f64>,
    /// `‖last term‖∞ / ‖first term‖∞`.
    pub last_term_ratio: f64,
    pub warning: Option<String>,
}

/// Truncated series `Σ_{j=1}^{L} (-1)^{j+1} D_h^j u / (j k^j)` for
/// `log(1 + D/k)`, with `D_h` the periodic centred difference. Converges
/// for inputs band-limited to `|θ| < k`.
pub fn log_operator_series(values: &[f64], h: f64, k: f64, terms: usize) -> Result<SeriesOutput> {
    if !(k.is_finite() && k > 0.0) {
        return Err(invalid(format!("k must be positive, got {k}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("grid spacing must be positive, got {h}")));
    }
    if terms == 0 {
        return Err(invalid("need at least one series term"));
    }
    let n = values.len();
    if n < 3 {
        return Err(invalid("need at least 3 grid values"));
    }
    let mut power = values.to_vec();
    let mut acc = vec![0.0; n];
    let mut first = 0.0;
    let mut last = 0.0;
    for j in 1..=terms {
        let next: Vec<f64> = (0..n).map(|i| (power[(i + 1) % n] - power[(i + n - 1) % n]) / (2.0 * h)).collect();
        power = next;
        let coef = if j % 2 == 1 { 1.0 } else { -1.0 } / (j as f64 * k.powi(j as i32));
        let mut norm = 0.0f64;
        for (a, p) in acc.iter_mut().zip(&power) {
            *a += coef * p;
            norm = norm.max((coef * p).abs());
        }
        if j == 1 {
            first = norm;
        }
        last = norm;
    }
    let last_term_ratio = if first > 0.0 { last / first } else { 0.0 };
    let warning = (last_term_ratio > 0.5)
        .then(|| format!("series not converging: last term is {last_term_ratio:.3} of the first; input is not band-limited below k"));
    Ok(SeriesOutput { values: acc, last_term_ratio, warning })
}

/// As [`log_operator_series`] on a periodic grid, projecting onto
/// `|θ| ≤ cutoff` before the first and after every difference. The
/// projection is idempotent and commutes with `D_h`, so for input already
/// band-limited below `cutoff` it only removes round-off that `D_h^j`
/// would otherwise amplify by `(hk)^{-j}`.
pub fn log_operator_series_projected(values: &[f64], grid: &Grid1D, k: f64, terms: usize, cutoff: f64) -> Result<SeriesOutput> {
    if !(k.is_finite() && k > 0.0) {
        return Err(invalid(format!("k must be positive, got {k}")));
    }
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    if terms == 0 {
        return Err(invalid("need at least one series term"));
    }
    let n = grid.n;
    let h = grid.h();
    let project = |v: &[f64]| -> Result<Vec<f64>> {
        Ok(apply_multiplier(v, grid, |th| Complex64::new(if th.abs() <= cutoff { 1.0 } else { 0.0 }, 0.0))?.values)
    };
    let mut power = project(values)?;
    let mut acc = vec![0.0; n];
    let (mut first, mut last) = (0.0, 0.0);
    for j in 1..=terms {
        let next: Vec<f64> = (0..n).map(|i| (power[(i + 1) % n] - power[(i + n - 1) % n]) / (2.0 * h)).collect();
        power = project(&next)?;
        let coef = if j % 2 == 1 { 1.0 } else { -1.0 } / (j as f64 * k.powi(j as i32));
        let mut norm = 0.0f64;
        for (a, p) in acc.iter_mut().zip(&power) {
            *a += coef * p;
            norm = norm.max((coef * p).abs());
        }
        if j == 1 {
            first = norm;
        }
        last = norm;
    }
    let last_term_ratio = if first > 0.0 { last / first } else { 0.0 };
    let warning = (last_term_ratio > 0.5)
        .then(|| format!("series not converging: last term is {last_term_ratio:.3} of the first; cutoff is too close to k"));
    Ok(SeriesOutput { values: acc, last_term_ratio, warning })
}

/// Symbol `log(1 - iθ/k)` of `log(1 + D/k)`.
pub fn log_operator_multiplier(k: f64, theta: f64) -> Complex64 {
    Complex64::new(1.0, -theta / k).ln()
}

/// Symbol `-log(1 + c|θ|^α)` of the time generator of the symmetric GS law.
pub fn symmetric_log_multiplier(alpha: f64, c: f64, theta: f64) -> Complex64 {
    Complex64::new(-(c * theta.abs().powf(alpha)).ln_1p(), 0.0)
}

/// Multiplier of the multivariate operator `∇_M^α`:
/// `-cos(πα/2) Σ_j w_j |⟨θ,z_j⟩|^α ω_{α,1}(⟨θ,z_j⟩)` for a discrete measure,
/// `-‖θ‖^α` for the isotropic one.
pub fn nabla_m_multiplier(alpha: f64, m: &SpectralMeasure, theta: &[f64]) -> Result<Complex64> {
    let b = m.bracket(alpha, theta)?;
    if m.is_isotropic() {
        Ok(-b)
    } else {
        Ok(-(PI * alpha / 2.0).cos() * b)
    }
}
