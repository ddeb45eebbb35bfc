//! Residual checks of the fractional equations satisfied by Gamma, stable
//! and GS laws, in Fourier space and on physical grids.
//!
//! Every check produces a [`SubCheck`]; an equation's [`ResidualReport`]
//! carries all of them and reports the binding one (largest
//! residual-to-tolerance ratio) in its top-level fields.

mod physical;
mod spectral_id;
mod suite;

pub use physical::*;
pub use spectral_id::*;
pub use suite::*;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error};
use crate::spectral::Grid1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquationId {
    #[serde(rename = "lemma1_gamma_shift")]
    Lemma1GammaShift,
    #[serde(rename = "lemma2_gamma_log")]
    Lemma2GammaLog,
    #[serde(rename = "prop3_gs_rieszfeller")]
    Prop3GsRieszFeller,
    #[serde(rename = "cor4_symmetric_riesz")]
    Cor4SymmetricRiesz,
    #[serde(rename = "remark_cauchy_gamma")]
    RemarkCauchyGamma,
    #[serde(rename = "remark_variance_gamma")]
    RemarkVarianceGamma,
    #[serde(rename = "prop5_symmetric_log")]
    Prop5SymmetricLog,
    #[serde(rename = "cor6_subordinator")]
    Cor6Subordinator,
    #[serde(rename = "remark7_first_passage")]
    Remark7FirstPassage,
    #[serde(rename = "prop8_multivariate")]
    Prop8Multivariate,
    #[serde(rename = "remark9_isotropic")]
    Remark9Isotropic,
    #[serde(rename = "stable_building_block")]
    StableBuildingBlock,
}

impl EquationId {
    pub const ALL: [EquationId; 12] = [
        EquationId::Lemma1GammaShift,
        EquationId::Lemma2GammaLog,
        EquationId::Prop3GsRieszFeller,
        EquationId::Cor4SymmetricRiesz,
        EquationId::RemarkCauchyGamma,
        EquationId::RemarkVarianceGamma,
        EquationId::Prop5SymmetricLog,
        EquationId::Cor6Subordinator,
        EquationId::Remark7FirstPassage,
        EquationId::Prop8Multivariate,
        EquationId::Remark9Isotropic,
        EquationId::StableBuildingBlock,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EquationId::Lemma1GammaShift => "lemma1_gamma_shift",
            EquationId::Lemma2GammaLog => "lemma2_gamma_log",
            EquationId::Prop3GsRieszFeller => "prop3_gs_rieszfeller",
            EquationId::Cor4SymmetricRiesz => "cor4_symmetric_riesz",
            EquationId::RemarkCauchyGamma => "remark_cauchy_gamma",
            EquationId::RemarkVarianceGamma => "remark_variance_gamma",
            EquationId::Prop5SymmetricLog => "prop5_symmetric_log",
            EquationId::Cor6Subordinator => "cor6_subordinator",
            EquationId::Remark7FirstPassage => "remark7_first_passage",
            EquationId::Prop8Multivariate => "prop8_multivariate",
            EquationId::Remark9Isotropic => "remark9_isotropic",
            EquationId::StableBuildingBlock => "stable_building_block",
        }
    }
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EquationId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        EquationId::ALL.iter().find(|e| e.as_str() == s).copied().ok_or_else(|| invalid(format!("unknown equation id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideProvenance {
    pub lhs: String,
    pub rhs: String,
}

impl SideProvenance {
    pub fn new(lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Self { lhs: lhs.into(), rhs: rhs.into() }
    }
}

/// One residual (or derived metric) compared with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub linf: f64,
    pub l2: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: SideProvenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid1D>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub notes: String,
}

impl SubCheck {
    pub fn new(name: impl Into<String>, linf: f64, l2: Option<f64>, tolerance: f64, provenance: SideProvenance) -> Self {
        Self { name: name.into(), linf, l2, tolerance, pass: linf <= tolerance, provenance, grid: None, notes: String::new() }
    }

    pub fn with_grid(mut self, grid: Grid1D) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    fn ratio(&self) -> f64 {
        if self.linf.is_nan() {
            f64::INFINITY
        } else if self.tolerance > 0.0 {
            self.linf / self.tolerance
        } else if self.linf == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: EquationId,
    pub params: serde_json::Value,
    pub grid: Option<Grid1D>,
    pub t: Vec<f64>,
    pub linf: f64,
    pub l2: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
    pub provenance: SideProvenance,
    pub binding_check: String,
    pub checks: Vec<SubCheck>,
}

impl ResidualReport {
    /// Top-level fields mirror the check with the largest residual/tolerance
    /// ratio, so `pass` holds exactly when every check passes.
    pub fn from_checks(equation: EquationId, params: serde_json::Value, t: Vec<f64>, checks: Vec<SubCheck>, notes: Vec<String>) -> Self {
        let binding = checks
            .iter()
            .max_by(|a, b| a.ratio().total_cmp(&b.ratio()))
            .cloned()
            .unwrap_or_else(|| SubCheck::new("no_checks", f64::NAN, None, 0.0, SideProvenance::new("none", "none")));
        let pass = !checks.is_empty() && binding.linf <= binding.tolerance;
        Self {
            equation,
            params,
            grid: binding.grid,
            t,
            linf: binding.linf,
            l2: binding.l2,
            tolerance: binding.tolerance,
            pass,
            notes: notes.join("; "),
            provenance: binding.provenance.clone(),
            binding_check: binding.name.clone(),
            checks,
        }
    }

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Relative residual `max|L - R| / max(max|L|, max|R|)` and its ℓ² analogue.
pub(crate) fn relative_residual<T: Copy + Into<num_complex::Complex64>>(lhs: &[T], rhs: &[T]) -> (f64, f64) {
    let mut diff_inf = 0.0f64;
    let mut scale_inf = 0.0f64;
    let mut diff_2 = 0.0f64;
    let mut scale_2l = 0.0f64;
    let mut scale_2r = 0.0f64;
    for (&l, &r) in lhs.iter().zip(rhs) {
        let (l, r): (num_complex::Complex64, num_complex::Complex64) = (l.into(), r.into());
        let d = (l - r).norm();
        diff_inf = diff_inf.max(d);
        scale_inf = scale_inf.max(l.norm()).max(r.norm());
        diff_2 += d * d;
        scale_2l += l.norm_sqr();
        scale_2r += r.norm_sqr();
    }
    if scale_inf == 0.0 {
        return (if diff_inf == 0.0 { 0.0 } else { f64::INFINITY }, 0.0);
    }
    let s2 = scale_2l.max(scale_2r).sqrt();
    (diff_inf / scale_inf, if s2 > 0.0 { diff_2.sqrt() / s2 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for e in EquationId::ALL {
            assert_eq!(e.as_str().parse::<EquationId>().unwrap(), e);
            let j = serde_json::to_string(&e).unwrap();
            assert_eq!(j, format!("\"{}\"", e.as_str()));
        }
        assert!("lemma3".parse::<EquationId>().is_err());
    }

    #[test]
    fn binding_check_drives_pass() {
        let p = SideProvenance::new("a", "b");
        let checks =
            vec![SubCheck::new("small", 1e-13, None, 1e-12, p.clone()), SubCheck::new("tight", 0.9e-3, Some(1e-4), 1e-3, p.clone())];
        let r = ResidualReport::from_checks(EquationId::Lemma1GammaShift, serde_json::json!({}), vec![1.0], checks, vec![]);
        assert!(r.pass);
        assert_eq!(r.binding_check, "tight");
        assert_eq!(r.pass, r.linf <= r.tolerance);
        let checks = vec![SubCheck::new("ok", 1e-13, None, 1e-12, p.clone()), SubCheck::new("bad", 2e-12, None, 1e-12, p)];
        let r = ResidualReport::from_checks(EquationId::Lemma1GammaShift, serde_json::json!({}), vec![1.0], checks, vec![]);
        assert!(!r.pass);
        assert_eq!(r.binding_check, "bad");
    }

    #[test]
    fn report_json_keys() {
        let p = SideProvenance::new("spectral", "closed_form");
        let r = ResidualReport::from_checks(
            EquationId::RemarkVarianceGamma,
            serde_json::json!({"alpha": 2.0}),
            vec![2.0],
            vec![SubCheck::new("x", 0.0, Some(0.0), 1.0, p)],
            vec!["note".into()],
        );
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for k in ["equation", "params", "grid", "t", "linf", "l2", "tolerance", "pass", "notes", "provenance"] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
        assert_eq!(v["equation"], "remark_variance_gamma");
    }

    #[test]
    fn relative_residual_scaling() {
        let (a, _) = relative_residual(&[1.0, 2.0], &[1.0, 2.0 + 1e-10]);
        assert!((a - 5e-11).abs() < 1e-16);
        let (a, _) = relative_residual::<f64>(&[0.0], &[0.0]);
        assert_eq!(a, 0.0);
    }
}
