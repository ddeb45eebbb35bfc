//! Samplers for stable, Gamma, GS, isotropic GS and first-passage laws,
//! plus goodness-of-fit statistics.
//!
//! Samples are drawn in fixed chunks; each chunk and each law component
//! (Gamma clock, stable increment, ...) owns a ChaCha20 stream derived from
//! the master seed, so output is identical for any thread count.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{invalid, Result};
use crate::gslaw::{GammaParams, StableParams};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "law")]
pub enum Law {
    Stable { alpha: f64, beta: f64, sigma: f64 },
    Gamma { b: f64 },
    Gs { alpha: f64, beta: f64, sigma: f64 },
    IsotropicGs { alpha: f64, dim: usize },
    FirstPassage,
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::Stable { .. } => "stable",
            Law::Gamma { .. } => "gamma",
            Law::Gs { .. } => "gs",
            Law::IsotropicGs { .. } => "isotropic_gs",
            Law::FirstPassage => "first_passage",
        }
    }

    pub fn params(&self) -> serde_json::Value {
        match *self {
            Law::Stable { alpha, beta, sigma } | Law::Gs { alpha, beta, sigma } => {
                json!({ "alpha": alpha, "beta": beta, "sigma": sigma })
            }
            Law::Gamma { b } => json!({ "b": b }),
            Law::IsotropicGs { alpha, dim } => json!({ "alpha": alpha, "dim": dim }),
            Law::FirstPassage => json!({ "alpha": 0.5, "beta": 1.0, "sigma": 1.0 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub law: Law,
    pub t: f64,
    pub seed: u64,
    pub dim: usize,
    /// Row-major, `dim` values per draw.
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Coordinate `k` of every draw.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values.iter().skip(k).step_by(self.dim).copied().collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.dim == 1 {
            writeln!(w, "index,value")?;
        } else {
            let cols: Vec<String> = (1..=self.dim).map(|k| format!("v{k}")).collect();
            writeln!(w, "index,{}", cols.join(","))?;
        }
        for i in 0..self.len() {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{i},{}", row.join(","))?;
        }
        Ok(())
    }

    /// Metadata written next to the CSV.
    pub fn sidecar(&self) -> serde_json::Value {
        json!({
            "law": self.law.name(),
            "params": self.law.params(),
            "t": self.t,
            "n": self.len(),
            "dim": self.dim,
            "seed": self.seed,
        })
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("t must be positive and finite, got {t}")))
    }
}

fn stream(seed: u64, chunk: usize, component: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((chunk as u64) << 8) | component);
    rng
}

/// Draw `n` rows of width `dim`; `fill(rngs, row)` gets one RNG per component.
fn chunked<F>(n: usize, dim: usize, seed: u64, components: u64, fill: F) -> Vec<f64>
where
    F: Fn(&mut [ChaCha20Rng], &mut [f64]) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let rows = CHUNK.min(n - c * CHUNK);
            let mut rngs: Vec<ChaCha20Rng> = (0..components).map(|k| stream(seed, c, k)).collect();
            let mut out = vec![0.0; rows * dim];
            for row in out.chunks_mut(dim) {
                fill(&mut rngs, row);
            }
            out
        })
        .collect();
    parts.concat()
}

/// Standard stable variate with `E e^{iθX} = exp(-|θ|^α ω_{α,β}(θ))`
/// (Chambers-Mallows-Stuck).
#[derive(Debug, Clone, Copy)]
struct Cms {
    alpha: f64,
    b: f64,
    s: f64,
}

impl Cms {
    fn new(alpha: f64, beta: f64) -> Self {
        if alpha == 1.0 || alpha == 2.0 {
            return Self { alpha, b: 0.0, s: 1.0 };
        }
        let tan = (PI * alpha / 2.0).tan();
        let b = (beta * tan).atan() / alpha;
        let s = (1.0 + beta * beta * tan * tan).powf(1.0 / (2.0 * alpha));
        Self { alpha, b, s }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        let v = PI * (u - 0.5);
        if self.alpha == 1.0 {
            return v.tan();
        }
        let w: f64 = Exp1.sample(rng);
        let a = self.alpha;
        let vb = a * (v + self.b);
        self.s * vb.sin() / v.cos().powf(1.0 / a) * ((v - vb).cos() / w).powf((1.0 - a) / a)
    }
}

pub fn sample_stable(p: &StableParams, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let cms = Cms::new(p.alpha(), p.beta());
    let scale = p.sigma() * t.powf(1.0 / p.alpha());
    let values = chunked(n, 1, seed, 1, |r, row| row[0] = scale * cms.draw(&mut r[0]));
    Ok(SampleBatch { law: Law::Stable { alpha: p.alpha(), beta: p.beta(), sigma: p.sigma() }, t, seed, dim: 1, values })
}

pub fn sample_gamma(g: &GammaParams, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let dist = Gamma::new(t, 1.0 / g.b()).map_err(|e| invalid(format!("Gamma({t}, {}): {e}", g.b())))?;
    let values = chunked(n, 1, seed, 1, |r, row| row[0] = dist.sample(&mut r[0]));
    Ok(SampleBatch { law: Law::Gamma { b: g.b() }, t, seed, dim: 1, values })
}

/// Stable law run to a Gamma(t, 1) random time.
pub fn sample_gs(p: &StableParams, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let clock = Gamma::new(t, 1.0).map_err(|e| invalid(format!("Gamma({t}, 1): {e}")))?;
    let cms = Cms::new(p.alpha(), p.beta());
    let (sigma, inv_a) = (p.sigma(), 1.0 / p.alpha());
    let values = chunked(n, 1, seed, 2, |r, row| {
        let z: f64 = clock.sample(&mut r[0]);
        row[0] = sigma * z.powf(inv_a) * cms.draw(&mut r[1]);
    });
    Ok(SampleBatch { law: Law::Gs { alpha: p.alpha(), beta: p.beta(), sigma: p.sigma() }, t, seed, dim: 1, values })
}

/// Isotropic GS in `dim` dimensions, `E e^{i⟨θ,X⟩} = (1 + ‖θ‖^α)^{-t}`, as
/// `z^{1/α} √A G` with `z ~ Gamma(t, 1)`, `A` positive `(α/2)`-stable with
/// `E e^{-sA} = e^{-s^{α/2}}` and `G ~ N(0, 2I)`.
pub fn sample_isotropic_gs(alpha: f64, dim: usize, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    if !(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0 {
        return Err(invalid(format!("isotropic sampler needs alpha in (0, 2] without 1, got {alpha}")));
    }
    if dim == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let clock = Gamma::new(t, 1.0).map_err(|e| invalid(format!("Gamma({t}, 1): {e}")))?;
    let half = alpha / 2.0;
    let amp = Cms::new(half, 1.0);
    let amp_scale = if alpha == 2.0 { 1.0 } else { (PI * half / 2.0).cos().powf(1.0 / half) };
    let values = chunked(n, dim, seed, 3, |r, row| {
        let z: f64 = clock.sample(&mut r[0]);
        let a = if alpha == 2.0 { 1.0 } else { amp_scale * amp.draw(&mut r[1]) };
        let scale = z.powf(1.0 / alpha) * a.sqrt() * 2f64.sqrt();
        for v in row.iter_mut() {
            let g: f64 = StandardNormal.sample(&mut r[2]);
            *v = scale * g;
        }
    });
    Ok(SampleBatch { law: Law::IsotropicGs { alpha, dim }, t, seed, dim, values })
}

/// First time Brownian motion reaches an independent Gamma(t, 1) level:
/// `z^2 / N^2` with `N` standard normal.
pub fn sample_first_passage_gamma_barrier(t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_t(t)?;
    let clock = Gamma::new(t, 1.0).map_err(|e| invalid(format!("Gamma({t}, 1): {e}")))?;
    let values = chunked(n, 1, seed, 2, |r, row| {
        let z: f64 = clock.sample(&mut r[0]);
        let g: f64 = StandardNormal.sample(&mut r[1]);
        row[0] = z * z / (g * g);
    });
    Ok(SampleBatch { law: Law::FirstPassage, t, seed, dim: 1, values })
}

/// One-sample Kolmogorov-Smirnov distance against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64 + Sync>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid("empty sample"));
    }
    if sample.iter().any(|v| v.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    let mut s = sample.to_vec();
    s.par_sort_unstable_by(f64::total_cmp);
    let n = s.len() as f64;
    let d = s
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
        })
        .reduce(|| 0.0, f64::max);
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("empty sample"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_unstable_by(f64::total_cmp);
    y.sort_unstable_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Asymptotic 1% critical value of the one-sample KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Asymptotic 1% critical value of the two-sample KS distance.
pub fn ks_critical_1pct_two_sample(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.63 * ((n + m) / (n * m)).sqrt()
}

/// `(1/n) Σ e^{iθX_j}`.
pub fn empirical_charfn(sample: &[f64], theta: f64) -> Complex64 {
    let s: Complex64 = sample.par_iter().map(|&x| Complex64::from_polar(1.0, theta * x)).sum();
    s / sample.len() as f64
}

/// `(1/n) Σ e^{i⟨θ,X_j⟩}` for a vector batch.
pub fn empirical_charfn_nd(batch: &SampleBatch, theta: &[f64]) -> Result<Complex64> {
    if theta.len() != batch.dim {
        return Err(invalid("theta dimension does not match the batch"));
    }
    let s: Complex64 =
        batch.values.par_chunks(batch.dim).map(|row| Complex64::from_polar(1.0, row.iter().zip(theta).map(|(a, b)| a * b).sum())).sum();
    Ok(s / batch.len() as f64)
}
