//! Stable, Gamma and geometric stable laws.
//!
//! Fourier convention: `F{u}(θ) = ∫ e^{iθx} u(x) dx`, so every
//! characteristic function here is `E[e^{iθX}]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate, QuadOptions};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `tan(πα/2)` with the α = 2 endpoint pinned to 0.
fn tan_half_pi(alpha: f64) -> f64 {
    if alpha == 2.0 {
        0.0
    } else {
        (PI * alpha / 2.0).tan()
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (0, 2], got {alpha}")))
    }
}

fn check_beta(alpha: f64, beta: f64) -> Result<()> {
    if !(beta.is_finite() && (-1.0..=1.0).contains(&beta)) {
        return Err(invalid(format!("beta must lie in [-1, 1], got {beta}")));
    }
    if alpha == 1.0 && beta != 0.0 {
        return Err(Error::Unsupported(format!(
            "alpha = 1 requires beta = 0 (asymmetric alpha = 1 laws carry a logarithmic \
             term that is outside this model), got beta = {beta}"
        )));
    }
    Ok(())
}

/// Skewness factor `ω_{α,β}(θ) = 1 - iβ sign(θ) tan(πα/2)`.
pub fn omega(alpha: f64, beta: f64, theta: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    check_beta(alpha, beta)?;
    if beta == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(Complex64::new(1.0, -beta * sign(theta) * tan_half_pi(alpha)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStable", into = "RawStable")]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
    feller: FellerParams,
}

#[derive(Serialize, Deserialize)]
struct RawStable {
    alpha: f64,
    beta: f64,
    sigma: f64,
}

impl TryFrom<RawStable> for StableParams {
    type Error = Error;
    fn try_from(r: RawStable) -> Result<Self> {
        StableParams::new(r.alpha, r.beta, r.sigma)
    }
}

impl From<StableParams> for RawStable {
    fn from(p: StableParams) -> Self {
        RawStable { alpha: p.alpha, beta: p.beta, sigma: p.sigma }
    }
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_beta(alpha, beta)?;
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        let feller = feller_pair(alpha, beta, sigma);
        Ok(Self { alpha, beta, sigma, feller })
    }

    pub fn symmetric(alpha: f64, sigma: f64) -> Result<Self> {
        Self::new(alpha, 0.0, sigma)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn feller(&self) -> FellerParams {
        self.feller
    }

    /// Totally skewed to the right with α < 1: the law lives on `[0, ∞)`.
    pub fn is_subordinator(&self) -> bool {
        self.alpha < 1.0 && self.beta == 1.0
    }
}

/// Feller form: skewness `γ` and scale `c` with `exp(cψ) = exp(-σ^α|θ|^α ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FellerParams {
    pub gamma_skew: f64,
    pub c: f64,
}

pub fn feller_from_params(p: &StableParams) -> FellerParams {
    p.feller
}

fn feller_pair(alpha: f64, beta: f64, sigma: f64) -> FellerParams {
    let gamma_skew = if beta == 0.0 || alpha == 2.0 { 0.0 } else { (2.0 / PI) * (-beta * tan_half_pi(alpha)).atan() };
    let c = sigma.powf(alpha) / (PI * gamma_skew / 2.0).cos();
    FellerParams { gamma_skew, c }
}

/// `ψ(θ) = -|θ|^α e^{iγπ sign(θ)/2}`, the Riesz-Feller symbol.
pub fn stable_char_exponent(alpha: f64, gamma_skew: f64, theta: f64) -> Complex64 {
    if theta == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = gamma_skew * PI * sign(theta) / 2.0;
    -theta.abs().powf(alpha) * Complex64::from_polar(1.0, phase)
}

fn c_psi(p: &StableParams, theta: f64) -> Complex64 {
    let f = p.feller();
    f.c * stable_char_exponent(p.alpha, f.gamma_skew, theta)
}

pub fn stable_charfn(p: &StableParams, theta: f64, t: f64) -> Complex64 {
    stable_charfn_complex_time(p, theta, t.into())
}

pub fn stable_charfn_complex_time(p: &StableParams, theta: f64, t: Complex64) -> Complex64 {
    (t * c_psi(p, theta)).exp()
}

/// `(1 - cψ(θ))^{-t}`: stable law of the same parameters subordinated to Gamma(t, 1).
pub fn gs_charfn(p: &StableParams, theta: f64, t: f64) -> Complex64 {
    if p.feller.gamma_skew == 0.0 {
        // ψ is real: (1 + c|θ|^α)^{-t}
        let v = (-t * (p.feller.c * theta.abs().powf(p.alpha)).ln_1p()).exp();
        return Complex64::new(v, 0.0);
    }
    gs_charfn_complex_time(p, theta, t.into())
}

pub fn gs_charfn_complex_time(p: &StableParams, theta: f64, t: Complex64) -> Complex64 {
    (-t * (1.0 - c_psi(p, theta)).ln()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    b: f64,
}

impl GammaParams {
    pub fn new(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(invalid(format!("Gamma rate b must be positive and finite, got {b}")));
        }
        Ok(Self { b })
    }
    pub fn b(&self) -> f64 {
        self.b
    }
}

impl Default for GammaParams {
    fn default() -> Self {
        Self { b: 1.0 }
    }
}

/// Gamma(t, b) density `b^t x^{t-1} e^{-bx} / Γ(t)`; zero for `x < 0`.
pub fn gamma_density(g: &GammaParams, x: f64, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("Gamma shape t must be positive, got {t}")));
    }
    if x.is_nan() {
        return Err(invalid("x is NaN"));
    }
    let b = g.b;
    if x < 0.0 {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(match t.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => b,
            _ => 0.0,
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if t <= 150.0 {
        let v = b.powf(t) * x.powf(t - 1.0) * (-b * x).exp() / gamma(t);
        if v.is_finite() && v > 1e-280 {
            return Ok(v);
        }
    }
    Ok((t * b.ln() + (t - 1.0) * x.ln() - b * x - ln_gamma(t)).exp())
}

pub fn gamma_charfn(g: &GammaParams, theta: f64, t: f64) -> Complex64 {
    gamma_charfn_complex_time(g, theta, t.into())
}

pub fn gamma_charfn_complex_time(g: &GammaParams, theta: f64, t: Complex64) -> Complex64 {
    (-t * (1.0 - I * theta / g.b).ln()).exp()
}

/// Density of the first time standard Brownian motion reaches level `z > 0`.
pub fn levy_fp_density(x: f64, z: f64) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(invalid(format!("barrier z must be positive, got {z}")));
    }
    if !(x > 0.0) {
        return Err(invalid(format!("first-passage density needs x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok((z.ln() - 0.5 * (2.0 * PI).ln() - 1.5 * x.ln() - z * z / (2.0 * x)).exp())
}

/// Below this |z| the power series is used; beyond it the Laplace-type integral.
const ML_SERIES_RADIUS: f64 = 1.0;

/// `E_α(z)` for `0 < α ≤ 1`, `z ≤ 0`.
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("Mittag-Leffler needs alpha in (0, 1], got {alpha}")));
    }
    if !z.is_finite() || z > 0.0 {
        return Err(invalid(format!("Mittag-Leffler argument must be finite and <= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(z.exp());
    }
    if z.abs() <= ML_SERIES_RADIUS {
        return Ok(ml_series(alpha, z));
    }
    ml_integral(alpha, -z)
}

fn ml_series(alpha: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 0..400 {
        let term = zk / gamma(alpha * k as f64 + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 4 {
            break;
        }
        zk *= z;
    }
    sum
}

fn ml_integral(alpha: f64, x: f64) -> Result<f64> {
    // E_α(-x) = ∫_0^∞ exp(-r x^{1/α}) K_α(r) dr
    let s = x.powf(1.0 / alpha);
    let (sa, ca) = (alpha * PI).sin_cos();
    let opts = QuadOptions { abs_tol: 1e-16, rel_tol: 1e-13, max_intervals: 4000 };
    // r = v^{1/α} on [0, 1] absorbs the r^{α-1} endpoint singularity
    let head = integrate(
        |v| {
            let r = v.powf(1.0 / alpha);
            (-r * s).exp() * sa / (PI * alpha * (v * v + 2.0 * v * ca + 1.0))
        },
        0.0,
        1.0,
        &opts,
    )?;
    let tail = integrate(
        |r| {
            let ra = r.powf(alpha);
            (-r * s).exp() * r.powf(alpha - 1.0) * sa / (PI * (ra * ra + 2.0 * ra * ca + 1.0))
        },
        1.0,
        f64::INFINITY,
        &opts,
    )?;
    Ok(head.value + tail.value)
}

/// CDF at time 1 of the GS subordinator (β = 1, α < 1):
/// `P(X ≤ x) = 1 - E_α(-x^α / c)` with `c = σ^α / cos(πα/2)`.
pub fn gs_subordinator_cdf(p: &StableParams, x: f64) -> Result<f64> {
    if !p.is_subordinator() {
        return Err(invalid("Mittag-Leffler CDF applies to beta = 1, alpha < 1 only"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let c = p.feller().c;
    Ok(1.0 - mittag_leffler(p.alpha, -x.powf(p.alpha) / c)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub direction: Vec<f64>,
    pub weight: f64,
}

/// Spectral measure on the unit sphere: a finite set of weighted directions,
/// or the uniform (isotropic) case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMeasure {
    dim: usize,
    isotropic: bool,
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawMeasure {
    dim: usize,
    #[serde(default)]
    isotropic: bool,
    #[serde(default)]
    atoms: Vec<Atom>,
}

impl SpectralMeasure {
    pub fn isotropic(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self { dim, isotropic: true, atoms: Vec::new() })
    }

    /// Directions are normalized; zero vectors and negative weights are rejected.
    pub fn discrete(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if atoms.is_empty() {
            return Err(invalid("a discrete spectral measure needs at least one atom"));
        }
        let mut out = Vec::with_capacity(atoms.len());
        for (k, a) in atoms.into_iter().enumerate() {
            if a.direction.len() != dim {
                return Err(invalid(format!("atom {k} has dimension {}, expected {dim}", a.direction.len())));
            }
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(invalid(format!("atom {k} weight must be finite and >= 0")));
            }
            let norm = a.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(invalid(format!("atom {k} direction is the zero vector")));
            }
            out.push(Atom { direction: a.direction.iter().map(|v| v / norm).collect(), weight: a.weight });
        }
        if out.iter().map(|a| a.weight).sum::<f64>() <= 0.0 {
            return Err(invalid("spectral measure has zero total mass"));
        }
        Ok(Self { dim, isotropic: false, atoms: out })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawMeasure = serde_json::from_str(s)?;
        if raw.isotropic {
            Self::isotropic(raw.dim)
        } else {
            Self::discrete(raw.dim, raw.atoms)
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `Σ_j w_j |⟨θ, z_j⟩|^α ω_{α,1}(⟨θ, z_j⟩)`, or `‖θ‖^α` when isotropic.
    pub fn bracket(&self, alpha: f64, theta: &[f64]) -> Result<Complex64> {
        check_alpha(alpha)?;
        if alpha == 1.0 {
            return Err(Error::Unsupported("alpha = 1 is excluded for multivariate laws (omega with beta = 1 is singular)".into()));
        }
        if theta.len() != self.dim {
            return Err(invalid(format!("theta has dimension {}, measure has dimension {}", theta.len(), self.dim)));
        }
        if self.isotropic {
            let r = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
            return Ok(Complex64::new(r.powf(alpha), 0.0));
        }
        let tan = tan_half_pi(alpha);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let u: f64 = a.direction.iter().zip(theta).map(|(z, t)| z * t).sum();
            if u != 0.0 {
                acc += a.weight * u.abs().powf(alpha) * Complex64::new(1.0, -sign(u) * tan);
            }
        }
        Ok(acc)
    }
}

/// `(1 + Σ_j w_j |⟨θ,z_j⟩|^α ω_{α,1}(⟨θ,z_j⟩))^{-t}`.
pub fn multivariate_gs_charfn(alpha: f64, m: &SpectralMeasure, theta: &[f64], t: f64) -> Result<Complex64> {
    multivariate_gs_charfn_complex_time(alpha, m, theta, t.into())
}

pub fn multivariate_gs_charfn_complex_time(alpha: f64, m: &SpectralMeasure, theta: &[f64], t: Complex64) -> Result<Complex64> {
    let b = m.bracket(alpha, theta)?;
    Ok((-t * (1.0 + b).ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn omega_reference_values() {
        assert!(close(omega(1.5, 0.0, 3.0).unwrap(), Complex64::new(1.0, 0.0), 0.0));
        let w = omega(0.5, 1.0, 2.0).unwrap();
        assert!(close(w, Complex64::new(1.0, -1.0), 1e-15));
        assert!(close(omega(2.0, 0.7, 1.0).unwrap(), Complex64::new(1.0, 0.0), 0.0));
        assert!(close(omega(0.5, 1.0, 0.0).unwrap(), Complex64::new(1.0, 0.0), 0.0));
    }

    #[test]
    fn asymmetric_cauchy_rejected() {
        let e = StableParams::new(1.0, 0.5, 1.0).unwrap_err();
        assert!(e.to_string().contains("alpha = 1 requires beta = 0"));
        assert!(omega(1.0, 0.3, 1.0).is_err());
        assert!(omega(1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn parameter_domains() {
        assert!(StableParams::new(0.0, 0.0, 1.0).is_err());
        assert!(StableParams::new(2.1, 0.0, 1.0).is_err());
        assert!(StableParams::new(1.5, 1.2, 1.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0).is_err());
        assert!(GammaParams::new(-1.0).is_err());
    }

    #[test]
    fn feller_first_passage_case() {
        let f = StableParams::new(0.5, 1.0, 1.0).unwrap().feller();
        assert!((f.gamma_skew + 0.5).abs() < 1e-14);
        assert!((f.c - 2f64.sqrt()).abs() < 1e-14);
        let cpsi = f.c * stable_char_exponent(0.5, f.gamma_skew, 1.0);
        assert!(close(cpsi, Complex64::new(-1.0, 1.0), 1e-14));
    }

    #[test]
    fn feller_edges() {
        let f = StableParams::new(2.0, 0.9, 1.3).unwrap().feller();
        assert_eq!(f.gamma_skew, 0.0);
        assert!((f.c - 1.69).abs() < 1e-14);
        let f = StableParams::new(1.0, 0.0, 2.0).unwrap().feller();
        assert_eq!(f.gamma_skew, 0.0);
        assert!((f.c - 2.0).abs() < 1e-15);
        let f = StableParams::new(1.5, 1.0, 1.0).unwrap().feller();
        assert!((f.gamma_skew - 0.5).abs() < 1e-14);
    }

    #[test]
    fn char_exponent_matches_omega_form() {
        for &(a, b, s) in &[(1.5, 0.5, 1.0), (0.7, -0.4, 2.0), (1.2, 1.0, 0.5), (0.3, 1.0, 1.0)] {
            let p = StableParams::new(a, b, s).unwrap();
            for &th in &[-3.0, -0.2, 0.5, 7.0] {
                let direct = -(s.powf(a)) * f64::abs(th).powf(a) * omega(a, b, th).unwrap();
                let feller = c_psi(&p, th);
                assert!(close(direct, feller, 1e-12 * direct.norm().max(1.0)), "{a} {b} {th}");
            }
        }
    }

    #[test]
    fn gaussian_and_cauchy_charfns() {
        let g = StableParams::new(2.0, 0.0, 1.0).unwrap();
        assert!((stable_charfn(&g, 1.0, 1.0).re - (-1f64).exp()).abs() < 1e-15);
        let c = StableParams::new(1.0, 0.0, 1.0).unwrap();
        assert!((stable_charfn(&c, 2.0, 1.5).re - (-3f64).exp()).abs() < 1e-15);
        assert!((gs_charfn(&g, 1.0, 1.0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(gs_charfn(&g, 0.0, 3.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn gamma_charfn_reference() {
        let g = GammaParams::new(1.0).unwrap();
        let v = gamma_charfn(&g, 1.0, 1.0);
        assert!((v - Complex64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn gamma_density_reference() {
        let g = GammaParams::default();
        assert!((gamma_density(&g, 1.0, 2.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(gamma_density(&g, -1.0, 2.0).unwrap(), 0.0);
        assert_eq!(gamma_density(&g, 0.0, 1.5).unwrap(), 0.0);
        assert_eq!(gamma_density(&g, 0.0, 1.0).unwrap(), 1.0);
        assert!(gamma_density(&g, 0.0, 0.5).unwrap().is_infinite());
        assert!(gamma_density(&g, 1.0, 0.0).is_err());
        let big = gamma_density(&g, 300.0, 300.0).unwrap();
        let expect = (299.0 * 300f64.ln() - 300.0 - ln_gamma(300.0)).exp();
        assert!((big - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn levy_density_reference() {
        let v = levy_fp_density(1.0, 1.0).unwrap();
        assert!((v - 0.241_970_724_519_143_37).abs() < 1e-15);
        assert_eq!(levy_fp_density(1e-300, 1.0).unwrap(), 0.0);
        assert!(levy_fp_density(0.0, 1.0).is_err());
        assert!(levy_fp_density(1.0, 0.0).is_err());
    }

    #[test]
    fn mittag_leffler_reference_values() {
        // E_{1/2}(-x) = e^{x²} erfc(x), and direct high-precision sums
        let half = [
            (0.1, 0.896_456_979_969_126_6),
            (0.5, 0.615_690_344_192_925_9),
            (0.9, 0.456_531_651_323_117_04),
            (1.0, 0.427_583_576_155_807),
            (1.5, 0.321_585_416_454_317_5),
            (3.0, 0.179_001_151_181_389_95),
            (6.0, 0.092_776_567_800_538_35),
            (20.0, 0.028_174_348_741_051_32),
        ];
        for &(x, want) in &half {
            let got = mittag_leffler(0.5, -x).unwrap();
            assert!((got - want).abs() <= 1e-10 * want, "x={x} got={got} want={want}");
        }
        let other = [
            (0.3, 2.0, 0.290_232_226_167_875_35),
            (0.8, 4.0, 0.077_048_679_930_344_75),
            (0.95, 10.0, 0.006_507_135_312_256_063),
            (0.7, 0.5, 0.605_147_592_059_564_3),
        ];
        for &(a, x, want) in &other {
            let got = mittag_leffler(a, -x).unwrap();
            assert!((got - want).abs() <= 1e-10 * want, "alpha={a} x={x} got={got} want={want}");
        }
    }

    #[test]
    fn mittag_leffler_edges() {
        assert_eq!(mittag_leffler(0.7, 0.0).unwrap(), 1.0);
        assert!((mittag_leffler(1.0, -2.0).unwrap() - (-2f64).exp()).abs() < 1e-16);
        assert!(mittag_leffler(1.5, -1.0).is_err());
        assert!(mittag_leffler(0.5, 1.0).is_err());
    }

    #[test]
    fn mittag_leffler_continuous_across_switch() {
        for &a in &[0.3, 0.5, 0.8, 0.95] {
            let below = ml_series(a, -ML_SERIES_RADIUS);
            let above = ml_integral(a, ML_SERIES_RADIUS).unwrap();
            assert!((below - above).abs() < 1e-12, "alpha={a}: {below} vs {above}");
        }
    }

    #[test]
    fn spectral_measure_normalizes_and_validates() {
        let m = SpectralMeasure::discrete(2, vec![Atom { direction: vec![3.0, 4.0], weight: 0.5 }]).unwrap();
        let d = &m.atoms()[0].direction;
        assert!(((d[0] * d[0] + d[1] * d[1]).sqrt() - 1.0).abs() < 1e-15);
        assert!(SpectralMeasure::discrete(2, vec![Atom { direction: vec![0.0, 0.0], weight: 1.0 }]).is_err());
        assert!(SpectralMeasure::discrete(2, vec![Atom { direction: vec![1.0], weight: 1.0 }]).is_err());
        let j = r#"{"dim":2,"isotropic":false,"atoms":[{"direction":[2.0,0.0],"weight":1.0}]}"#;
        let m = SpectralMeasure::from_json(j).unwrap();
        assert_eq!(m.atoms()[0].direction, vec![1.0, 0.0]);
        let back = SpectralMeasure::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(SpectralMeasure::from_json(r#"{"dim":2,"atoms":[{"direction":[0,0],"weight":1}]}"#).is_err());
    }

    #[test]
    fn multivariate_reduces_to_univariate() {
        // one atom along e_1 with weight σ^α gives the skewed univariate GS law
        let a = 1.5;
        let m = SpectralMeasure::discrete(2, vec![Atom { direction: vec![1.0, 0.0], weight: 1.0 }]).unwrap();
        let p = StableParams::new(a, 1.0, 1.0).unwrap();
        for &th in &[-2.0, 0.3, 4.0] {
            let mv = multivariate_gs_charfn(a, &m, &[th, 0.7], 1.5).unwrap();
            let uv = gs_charfn(&p, th, 1.5);
            assert!((mv - uv).norm() < 1e-13);
        }
        let iso = SpectralMeasure::isotropic(3).unwrap();
        let v = multivariate_gs_charfn(1.2, &iso, &[1.0, 2.0, 2.0], 1.0).unwrap();
        assert!((v.re - 1.0 / (1.0 + 3f64.powf(1.2))).abs() < 1e-15);
        assert!(multivariate_gs_charfn(1.0, &iso, &[1.0, 0.0, 0.0], 1.0).is_err());
    }
}
