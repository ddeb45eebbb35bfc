//! Fourier-side identities, checked pointwise on θ grids.
//!
//! Time derivatives are Cauchy contour integrals over complex `t`, so they
//! never reuse the closed-form generator being tested.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::{relative_residual, EquationId, ResidualReport, SideProvenance, SubCheck};
use crate::error::{invalid, Result};
use crate::fracops::{log_operator_multiplier, nabla_m_multiplier, one_minus_shift, symmetric_log_multiplier, TimeDomain};
use crate::gslaw::{
    gamma_charfn_complex_time, gs_charfn, gs_charfn_complex_time, multivariate_gs_charfn, stable_char_exponent, stable_charfn_complex_time,
    GammaParams, SpectralMeasure, StableParams,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub enum EquationParams {
    Stable(StableParams),
    Gamma(GammaParams),
    Multivariate { alpha: f64, measure: SpectralMeasure },
}

/// 1001 equispaced points on `[-50, 50]`.
pub fn standard_thetas() -> Vec<f64> {
    (0..1001).map(|k| -50.0 + 0.1 * k as f64).collect()
}

pub const STANDARD_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

/// `f'(t)` from the trapezoid rule on `|s - t| = r`; `rate` is a rough
/// size of `|f'/f|` used to pick `r` so that `r·rate ≲ 1/2`.
pub fn cauchy_time_derivative<F: Fn(Complex64) -> Complex64>(f: F, t: f64, rate: f64) -> Complex64 {
    let r = 0.5 / (1.0 + rate.abs());
    let nodes = 48;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
        acc += f(t + r * w) / (r * w);
    }
    acc / nodes as f64
}

fn require_stable(eq: EquationId, params: &EquationParams) -> Result<StableParams> {
    match params {
        EquationParams::Stable(p) => Ok(*p),
        _ => Err(invalid(format!("{eq} needs stable parameters"))),
    }
}

fn require_symmetric(eq: EquationId, params: &EquationParams) -> Result<StableParams> {
    let p = require_stable(eq, params)?;
    if p.beta() != 0.0 {
        return Err(invalid(format!("{eq} is the symmetric case and needs beta = 0")));
    }
    Ok(p)
}

/// Directions used to turn a 1-D θ grid into points in `dim` dimensions.
fn directions(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        out.push(e);
    }
    if dim > 1 {
        out.push(vec![1.0 / (dim as f64).sqrt(); dim]);
        let mut d = vec![0.0; dim];
        d[0] = 1.0 / 5f64.sqrt();
        d[1] = -2.0 / 5f64.sqrt();
        out.push(d);
    }
    out
}

/// Multivariate residual of `N(θ) Ĝ_t = K (Ĝ_t - Ĝ_{t-1})`.
pub fn multivariate_spectral_residual(alpha: f64, m: &SpectralMeasure, thetas: &[f64], ts: &[f64], k_const: f64) -> Result<(f64, f64)> {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for d in directions(m.dim()) {
        for &th in thetas {
            let point: Vec<f64> = d.iter().map(|v| v * th).collect();
            let nab = nabla_m_multiplier(alpha, m, &point)?;
            for &t in ts {
                let g = |s: f64| multivariate_gs_charfn(alpha, m, &point, s).expect("validated above");
                lhs.push(nab * g(t));
                rhs.push(k_const * one_minus_shift(g, t, 1.0, &TimeDomain::REAL)?);
            }
        }
    }
    Ok(relative_residual(&lhs, &rhs))
}

impl EquationParams {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            EquationParams::Stable(p) => serde_json::json!({"alpha": p.alpha(), "beta": p.beta(), "sigma": p.sigma()}),
            EquationParams::Gamma(g) => serde_json::json!({"b": g.b()}),
            EquationParams::Multivariate { alpha, measure } => serde_json::json!({"alpha": alpha, "measure": measure}),
        }
    }
}

/// Report form of [`spectral_identity_check`].
pub fn verify_spectral_identity(eq: EquationId, params: &EquationParams, thetas: &[f64], ts: &[f64]) -> Result<ResidualReport> {
    let check = spectral_identity_check(eq, params, thetas, ts)?;
    Ok(ResidualReport::from_checks(eq, params.to_json(), ts.to_vec(), vec![check], Vec::new()))
}

/// Pointwise check of one equation's Fourier-side form over `thetas × ts`.
pub fn spectral_identity_check(eq: EquationId, params: &EquationParams, thetas: &[f64], ts: &[f64]) -> Result<SubCheck> {
    if thetas.is_empty() || ts.is_empty() {
        return Err(invalid("need at least one θ and one t"));
    }
    if ts.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(invalid("times must be positive"));
    }
    let mut lhs: Vec<Complex64> = Vec::new();
    let mut rhs: Vec<Complex64> = Vec::new();
    let mut initial = 0.0f64;
    let prov;
    let tol = 1e-12;
    match eq {
        EquationId::Lemma1GammaShift | EquationId::Lemma2GammaLog => {
            let g = match params {
                EquationParams::Gamma(g) => *g,
                _ => return Err(invalid(format!("{eq} needs Gamma parameters"))),
            };
            let b = g.b();
            for &th in thetas {
                let f = |s: Complex64| gamma_charfn_complex_time(&g, th, s);
                initial = initial.max((f(0.0.into()) - 1.0).norm());
                for &t in ts {
                    if eq == EquationId::Lemma1GammaShift {
                        lhs.push(-I * th * f(t.into()));
                        rhs.push(-b * one_minus_shift(|s| f(s.into()), t, 1.0, &TimeDomain::REAL)?);
                    } else {
                        let rate = log_operator_multiplier(b, th).norm();
                        lhs.push(cauchy_time_derivative(f, t, rate));
                        rhs.push(-log_operator_multiplier(b, th) * f(t.into()));
                    }
                }
            }
            prov = if eq == EquationId::Lemma1GammaShift {
                SideProvenance::new("spectral: -iθ f̂", "spectral: -b(1 - B) f̂")
            } else {
                SideProvenance::new("spectral: contour derivative in t", "spectral: -log(1 - iθ/b) f̂")
            };
        }
        EquationId::Prop3GsRieszFeller
        | EquationId::Cor4SymmetricRiesz
        | EquationId::RemarkCauchyGamma
        | EquationId::RemarkVarianceGamma
        | EquationId::Cor6Subordinator
        | EquationId::Remark7FirstPassage => {
            let p = require_stable(eq, params)?;
            let (alpha, sigma) = (p.alpha(), p.sigma());
            // operator symbol and constant, each built from the form the equation states
            let (symbol, c): (Box<dyn Fn(f64) -> Complex64>, f64) = match eq {
                EquationId::Prop3GsRieszFeller => {
                    let f = p.feller();
                    (Box::new(move |th| stable_char_exponent(alpha, f.gamma_skew, th)), f.c)
                }
                EquationId::Cor4SymmetricRiesz | EquationId::RemarkCauchyGamma | EquationId::RemarkVarianceGamma => {
                    let p = require_symmetric(eq, params)?;
                    if eq == EquationId::RemarkCauchyGamma && alpha != 1.0 {
                        return Err(invalid("Cauchy-Gamma case needs alpha = 1"));
                    }
                    if eq == EquationId::RemarkVarianceGamma && alpha != 2.0 {
                        return Err(invalid("variance-Gamma case needs alpha = 2"));
                    }
                    (Box::new(move |th: f64| Complex64::new(-th.abs().powf(alpha), 0.0)), p.sigma().powf(alpha))
                }
                EquationId::Cor6Subordinator => {
                    if !p.is_subordinator() {
                        return Err(invalid("subordinator case needs beta = 1 and alpha < 1"));
                    }
                    // one-sided (causal) symbol -(-iθ)^α
                    (Box::new(move |th: f64| -Complex64::new(0.0, -th).powf(alpha)), sigma.powf(alpha) / (PI * alpha / 2.0).cos())
                }
                _ => {
                    if alpha != 0.5 || p.beta() != 1.0 || sigma != 1.0 {
                        return Err(invalid("first-passage case is alpha = 1/2, beta = 1, sigma = 1"));
                    }
                    (Box::new(move |th: f64| -Complex64::new(0.0, -th).powf(0.5)), SQRT_2)
                }
            };
            for &th in thetas {
                let s = symbol(th);
                let g = |t: f64| gs_charfn(&p, th, t);
                initial = initial.max((g(0.0) - 1.0).norm());
                for &t in ts {
                    lhs.push(s * g(t));
                    rhs.push(one_minus_shift(g, t, 1.0, &TimeDomain::REAL)? / c);
                }
            }
            prov = SideProvenance::new("spectral: operator symbol × Ĝ_t", "spectral: (Ĝ_t - Ĝ_{t-1}) / c");
        }
        EquationId::Prop5SymmetricLog => {
            let p = require_symmetric(eq, params)?;
            let c = p.sigma().powf(p.alpha());
            for &th in thetas {
                let g = |s: Complex64| gs_charfn_complex_time(&p, th, s);
                initial = initial.max((g(0.0.into()) - 1.0).norm());
                let m = symmetric_log_multiplier(p.alpha(), c, th);
                for &t in ts {
                    lhs.push(cauchy_time_derivative(g, t, m.norm()));
                    rhs.push(m * g(t.into()));
                }
            }
            prov = SideProvenance::new("spectral: contour derivative in t", "spectral: -log(1 + c|θ|^α) Ĝ_t");
        }
        EquationId::StableBuildingBlock => {
            let p = require_stable(eq, params)?;
            let f = p.feller();
            for &th in thetas {
                let s = stable_char_exponent(p.alpha(), f.gamma_skew, th);
                let phi = |z: Complex64| stable_charfn_complex_time(&p, th, z);
                initial = initial.max((phi(0.0.into()) - 1.0).norm());
                for &t in ts {
                    lhs.push(s * phi(t.into()));
                    rhs.push(cauchy_time_derivative(phi, t, f.c * s.norm()) / f.c);
                }
            }
            prov = SideProvenance::new("spectral: ψ Φ_t", "spectral: contour derivative in t / c");
        }
        EquationId::Prop8Multivariate | EquationId::Remark9Isotropic => {
            let (alpha, m) = match params {
                EquationParams::Multivariate { alpha, measure } => (*alpha, measure),
                _ => return Err(invalid(format!("{eq} needs a spectral measure"))),
            };
            if eq == EquationId::Remark9Isotropic && !m.is_isotropic() {
                return Err(invalid("isotropic case needs the uniform spectral measure"));
            }
            let k = if m.is_isotropic() { 1.0 } else { (PI * alpha / 2.0).cos() };
            for d in directions(m.dim()) {
                for &th in thetas {
                    let point: Vec<f64> = d.iter().map(|v| v * th).collect();
                    initial = initial.max((multivariate_gs_charfn(alpha, m, &point, 0.0)? - 1.0).norm());
                }
            }
            let (linf, l2) = multivariate_spectral_residual(alpha, m, thetas, ts, k)?;
            let prov = SideProvenance::new("spectral: ∇_M symbol × Ĝ_t", "spectral: K (Ĝ_t - Ĝ_{t-1})");
            let linf = linf.max(initial);
            return Ok(SubCheck::new("spectral_identity", linf, Some(l2), tol, prov).with_notes(format!(
                "{} θ × {} directions × {} times; K = {k}; |Ĝ(0) - 1| = {initial:e}",
                thetas.len(),
                directions(m.dim()).len(),
                ts.len()
            )));
        }
    }
    let (linf, l2) = relative_residual(&lhs, &rhs);
    let linf = linf.max(initial);
    Ok(SubCheck::new("spectral_identity", linf, Some(l2), tol, prov).with_notes(format!(
        "{} θ × {} times; |Ĝ(·, 0) - 1| = {initial:e}",
        thetas.len(),
        ts.len()
    )))
}
