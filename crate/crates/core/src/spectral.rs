//! Uniform grids, FFT inversion of characteristic functions and Fourier
//! multipliers.
//!
//! On a grid `x_j = x_min + j h`, `j < n`, with `θ_k = 2π k' / (n h)` and
//! `k'` the signed index, the forward transform `h Σ_j u_j e^{iθ_k x_j}`
//! is the unnormalised *backward* DFT of `u` times the phase `e^{iθ_k x_min}`,
//! and inversion `(1/(nh)) Σ_k û_k e^{-iθ_k x_j}` is the *forward* DFT.
//! Swapping the two directions is the only conjugation needed for the
//! `e^{+iθx}` convention.
//!
//! The Nyquist bin is shared by `±π/h`; it is always given the symmetric
//! (real) value so that real inputs stay real.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gslaw::{gamma_density, GammaParams};
use crate::quad::{integrate, QuadOptions, QuadResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    /// `n` points of spacing `(x_max - x_min)/n`; the right end is the
    /// periodic image of `x_min` and is not stored.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(invalid(format!("grid needs finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(invalid(format!("grid size must be a power of two >= 8, got {n}")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Symmetric default grid `[-40, 40]` with `2^14` points.
    pub fn standard() -> Self {
        Self { x_min: -40.0, x_max: 40.0, n: 1 << 14 }
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.h()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / (self.x_max - self.x_min)
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.h()
    }

    /// Frequency of bin `k` in FFT order; bin `n/2` is reported as `-π/h`.
    pub fn theta(&self, k: usize) -> f64 {
        let signed = if k < self.n / 2 { k as f64 } else { k as f64 - self.n as f64 };
        signed * self.dtheta()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.theta(k)).collect()
    }

    /// Same interval with twice the points.
    pub fn refined(&self) -> Self {
        Self { n: self.n * 2, ..*self }
    }

    /// Index of the grid point nearest to `x`, if inside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let j = ((x - self.x_min) / self.h()).round();
        if j >= 0.0 && (j as usize) < self.n {
            Some(j as usize)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FftInversion,
    ClosedForm,
    Quadrature,
    FiniteDifference,
    Spectral,
    Series,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::FftInversion => "fft_inversion",
            Provenance::ClosedForm => "closed_form",
            Provenance::Quadrature => "quadrature",
            Provenance::FiniteDifference => "finite_difference",
            Provenance::Spectral => "spectral",
            Provenance::Series => "series",
        }
    }
}

/// Smooth low-pass `exp(-strength (|θ| h / π)^{2 order})`.
///
/// Convolution commutes with every operator in this crate, so filtering
/// both sides of an identity leaves it intact while removing Gibbs ringing
/// from kinks and jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFilter {
    pub order: u32,
    pub strength: f64,
}

impl Default for SpectralFilter {
    fn default() -> Self {
        Self { order: 4, strength: 36.0 }
    }
}

impl SpectralFilter {
    pub fn factor(&self, theta: f64, h: f64) -> f64 {
        let eta = theta.abs() * h / PI;
        (-self.strength * eta.powi(2 * self.order as i32)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub t: f64,
    pub provenance: Provenance,
    /// Largest imaginary part discarded by the final inverse transform.
    pub imag_residual: f64,
}

impl DensityField {
    pub fn from_fn(grid: Grid1D, t: f64, provenance: Provenance, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.xs().into_iter().map(f).collect();
        Self { grid, values, t, provenance, imag_residual: 0.0 }
    }

    /// Trapezoid mass; on a periodic grid this is `h Σ u_j`.
    pub fn trapezoid_mass(&self) -> f64 {
        self.grid.h() * self.values.iter().sum::<f64>()
    }

    /// Negative values clipped to zero and rescaled to unit mass.
    pub fn normalized_view(&self) -> Vec<f64> {
        let clipped: Vec<f64> = self.values.iter().map(|v| v.max(0.0)).collect();
        let mass = self.grid.h() * clipped.iter().sum::<f64>();
        if mass > 0.0 {
            clipped.into_iter().map(|v| v / mass).collect()
        } else {
            clipped
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,density,t,provenance")?;
        let tag = self.provenance.as_str();
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{}", self.grid.x(j), v, self.t, tag)?;
        }
        Ok(())
    }
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    }
}

/// `û(θ_k) ≈ h Σ_j u_j e^{iθ_k x_j}` in FFT order.
pub fn forward(values: &[f64], grid: &Grid1D) -> Result<Vec<Complex64>> {
    if values.len() != grid.n {
        return Err(invalid(format!("{} values on a grid of {} points", values.len(), grid.n)));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(grid.n, false).process(&mut buf);
    let h = grid.h();
    for (k, b) in buf.iter_mut().enumerate() {
        *b *= h * Complex64::from_polar(1.0, grid.theta(k) * grid.x_min);
    }
    Ok(buf)
}

/// Inverse of [`forward`]; returns the real part and the largest discarded
/// imaginary part.
pub fn inverse(spectrum: &[Complex64], grid: &Grid1D) -> Result<(Vec<f64>, f64)> {
    if spectrum.len() != grid.n {
        return Err(invalid(format!("{} coefficients on a grid of {} points", spectrum.len(), grid.n)));
    }
    let mut buf: Vec<Complex64> =
        spectrum.iter().enumerate().map(|(k, &s)| s * Complex64::from_polar(1.0, -grid.theta(k) * grid.x_min)).collect();
    plan(grid.n, true).process(&mut buf);
    let scale = 1.0 / (grid.n as f64 * grid.h());
    let mut imag = 0.0f64;
    let re = buf
        .iter()
        .map(|c| {
            imag = imag.max((c.im * scale).abs());
            c.re * scale
        })
        .collect();
    Ok((re, imag))
}

fn check_hermitian<F: Fn(f64) -> Complex64>(phi: &F, grid: &Grid1D) -> Result<()> {
    let dt = grid.dtheta();
    for &m in &[1.0, 3.0, 17.0, (grid.n / 8) as f64] {
        let th = m * dt;
        let (p, q) = (phi(th), phi(-th));
        if !(p.is_finite() && q.is_finite()) {
            return Err(Error::NonFinite(format!("characteristic function at θ = ±{th}")));
        }
        if (q - p.conj()).norm() > 1e-10 * p.norm().max(1.0) {
            return Err(invalid(format!("characteristic function is not Hermitian at θ = {th}: φ(-θ) = {q}, conj φ(θ) = {}", p.conj())));
        }
    }
    let p0 = phi(0.0);
    if (p0 - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(invalid(format!("characteristic function at 0 is {p0}, expected 1")));
    }
    Ok(())
}

/// Options for [`invert_charfn_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InversionOptions {
    pub filter: Option<SpectralFilter>,
    /// Number `M` of aliased copies `θ + 2πm/h`, `0 < |m| ≤ M`, folded into
    /// each bin. The folded sum is the Fourier series of the periodised
    /// density, which removes the truncation error at kinks.
    pub alias_fold: usize,
}

/// Density on `grid` from the characteristic function `phi`.
pub fn invert_charfn<F>(phi: F, grid: &Grid1D, t: f64) -> Result<DensityField>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    invert_charfn_with(phi, grid, t, &InversionOptions::default())
}

pub fn invert_charfn_filtered<F>(phi: F, grid: &Grid1D, t: f64, filter: Option<&SpectralFilter>) -> Result<DensityField>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    invert_charfn_with(phi, grid, t, &InversionOptions { filter: filter.copied(), alias_fold: 0 })
}

pub fn invert_charfn_with<F>(phi: F, grid: &Grid1D, t: f64, opts: &InversionOptions) -> Result<DensityField>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    check_hermitian(&phi, grid)?;
    let h = grid.h();
    let half = grid.n / 2;
    let period = 2.0 * PI / h;
    let fold_m = opts.alias_fold as i64;
    let phases: Vec<Complex64> = (1..=fold_m).map(|m| Complex64::from_polar(1.0, -(m as f64) * period * grid.x_min)).collect();
    let folded = |th: f64| -> Complex64 {
        let mut acc = phi(th);
        for (m, ph) in phases.iter().enumerate() {
            let m = (m + 1) as f64;
            acc += phi(th + m * period) * ph + phi(th - m * period) * ph.conj();
        }
        acc
    };
    let spectrum: Vec<Complex64> = (0..grid.n)
        .into_par_iter()
        .map(|k| {
            let th = grid.theta(k);
            let f = opts.filter.map_or(1.0, |f| f.factor(th, h));
            if k == half {
                // symmetric Nyquist value: Re(φ(π/h) e^{-iπ x_min/h}) once the phase is undone
                let nyq = -th;
                let v = folded(nyq) * Complex64::from_polar(1.0, -nyq * grid.x_min);
                Complex64::new(f * v.re, 0.0) * Complex64::from_polar(1.0, th * grid.x_min)
            } else {
                f * folded(th)
            }
        })
        .collect();
    if let Some(bad) = spectrum.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite(format!("characteristic function at θ = {}", grid.theta(bad))));
    }
    let (values, imag_residual) = inverse(&spectrum, grid)?;
    Ok(DensityField { grid: *grid, values, t, provenance: Provenance::FftInversion, imag_residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierOutput {
    pub values: Vec<f64>,
    pub imag_residual: f64,
}

/// `F^{-1}[m · F u]` on the periodic grid.
pub fn apply_multiplier<M>(values: &[f64], grid: &Grid1D, m: M) -> Result<MultiplierOutput>
where
    M: Fn(f64) -> Complex64 + Sync,
{
    let mut spec = forward(values, grid)?;
    let half = grid.n / 2;
    spec.par_iter_mut().enumerate().for_each(|(k, s)| {
        let th = grid.theta(k);
        let mk = if k == half { Complex64::new(m(-th).re, 0.0) } else { m(th) };
        *s *= mk;
    });
    if spec.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("multiplier produced a non-finite coefficient".into()));
    }
    let (values, imag_residual) = inverse(&spec, grid)?;
    Ok(MultiplierOutput { values, imag_residual })
}

/// Apply a smooth low-pass filter to grid values.
pub fn filter_values(values: &[f64], grid: &Grid1D, filter: &SpectralFilter) -> Result<Vec<f64>> {
    let h = grid.h();
    Ok(apply_multiplier(values, grid, |th| Complex64::new(filter.factor(th, h), 0.0))?.values)
}

/// `∫_0^∞ p(x, z) f_Γ(z; t, b) dz` for a stable density `p(x, z)` at
/// operational time `z`.
pub fn quadrature_subordinate<P>(stable_density: P, g: &GammaParams, x: f64, t: f64) -> Result<QuadResult>
where
    P: Fn(f64, f64) -> f64,
{
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("t must be positive, got {t}")));
    }
    let b = g.b();
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 };
    // z = u^m on [0, 1] regularises both z^{t-1} and a z^{-1/2}-type kernel singularity
    let m = 2.0 / t.min(1.0);
    let log_norm = t * b.ln() - statrs::function::gamma::ln_gamma(t);
    let head = integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let z = u.powf(m);
            if z <= 0.0 {
                return 0.0;
            }
            let w = (log_norm + (m * t - 1.0) * u.ln() - b * z).exp() * m;
            stable_density(x, z) * w
        },
        0.0,
        1.0,
        &opts,
    )?;
    let tail = integrate(|z| stable_density(x, z) * gamma_density(g, z, t).unwrap_or(0.0), 1.0, f64::INFINITY, &opts)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        abs_error: head.abs_error + tail.abs_error,
        evaluations: head.evaluations + tail.evaluations,
    })
}

/// Square grid with the same 1-D grid on both axes; values are row-major
/// with `x` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub axis: Grid1D,
}

impl Grid2D {
    pub fn new(axis: Grid1D) -> Self {
        Self { axis }
    }
    pub fn len(&self) -> usize {
        self.axis.n * self.axis.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
}

fn fft2(buf: &mut [Complex64], n: usize, forward_dir: bool) {
    let fft = plan(n, forward_dir);
    buf.par_chunks_mut(n).for_each(|row| fft.process(row));
    let mut tr = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            tr[j * n + i] = buf[i * n + j];
        }
    }
    tr.par_chunks_mut(n).for_each(|row| fft.process(row));
    for i in 0..n {
        for j in 0..n {
            buf[j * n + i] = tr[i * n + j];
        }
    }
}

fn spectral_2d<M>(buf: &mut [Complex64], grid: &Grid2D, m: M)
where
    M: Fn(f64, f64) -> Complex64 + Sync,
{
    let g = grid.axis;
    let n = g.n;
    buf.par_chunks_mut(n).enumerate().for_each(|(ky, row)| {
        for (kx, v) in row.iter_mut().enumerate() {
            // Nyquist lines are dropped: they carry no content after filtering
            *v = if kx == n / 2 || ky == n / 2 { Complex64::new(0.0, 0.0) } else { m(g.theta(kx), g.theta(ky)) };
        }
    });
}

fn finish_2d(buf: &mut [Complex64], grid: &Grid2D) -> (Vec<f64>, f64) {
    let g = grid.axis;
    let n = g.n;
    for ky in 0..n {
        for kx in 0..n {
            buf[ky * n + kx] *= Complex64::from_polar(1.0, -(g.theta(kx) + g.theta(ky)) * g.x_min);
        }
    }
    fft2(buf, n, true);
    let scale = 1.0 / (n as f64 * g.h()).powi(2);
    let mut imag = 0.0f64;
    let re = buf
        .iter()
        .map(|c| {
            imag = imag.max((c.im * scale).abs());
            c.re * scale
        })
        .collect();
    (re, imag)
}

/// Density of a bivariate law on a square grid.
pub fn invert_charfn_2d<F>(phi: F, grid: &Grid2D) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
    spectral_2d(&mut buf, grid, phi);
    if buf.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("bivariate characteristic function".into()));
    }
    Ok(finish_2d(&mut buf, grid))
}

/// `F^{-1}[m · F u]` on a square periodic grid.
pub fn apply_multiplier_2d<M>(values: &[f64], grid: &Grid2D, m: M) -> Result<(Vec<f64>, f64)>
where
    M: Fn(f64, f64) -> Complex64 + Sync,
{
    let g = grid.axis;
    let n = g.n;
    if values.len() != grid.len() {
        return Err(invalid("value count does not match the 2-D grid"));
    }
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, n, false);
    let h2 = g.h() * g.h();
    for ky in 0..n {
        for kx in 0..n {
            let (tx, ty) = (g.theta(kx), g.theta(ky));
            let mk = if kx == n / 2 || ky == n / 2 { Complex64::new(0.0, 0.0) } else { m(tx, ty) };
            buf[ky * n + kx] *= h2 * Complex64::from_polar(1.0, (tx + ty) * g.x_min) * mk;
        }
    }
    Ok(finish_2d(&mut buf, grid))
}
