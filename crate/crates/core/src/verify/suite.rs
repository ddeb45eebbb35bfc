//! The full verification suite: one composite report per equation.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::*;
use crate::error::Result;
use crate::gslaw::{gs_charfn, Atom, GammaParams, SpectralMeasure, StableParams};
use crate::spectral::{invert_charfn_filtered, invert_charfn_with, Grid1D, InversionOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub grid: Grid1D,
    pub seed: u64,
    pub mc_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { grid: Grid1D::standard(), seed: DEFAULT_SEED, mc_n: DEFAULT_MC_N }
    }
}

/// Merge part reports into one, prefixing check names with `label/`.
fn combine(eq: EquationId, parts: Vec<(String, ResidualReport)>, extra: Vec<SubCheck>, mut notes: Vec<String>) -> ResidualReport {
    let mut checks = Vec::new();
    let mut params = Vec::new();
    let mut ts: Vec<f64> = Vec::new();
    for (label, r) in parts {
        params.push(json!({"case": label, "params": r.params}));
        for t in &r.t {
            if !ts.contains(t) {
                ts.push(*t);
            }
        }
        if !r.notes.is_empty() {
            notes.push(format!("{label}: {}", r.notes));
        }
        for mut c in r.checks {
            c.name = format!("{label}/{}", c.name);
            checks.push(c);
        }
    }
    checks.extend(extra);
    ts.sort_by(f64::total_cmp);
    ResidualReport::from_checks(eq, Value::Array(params), ts, checks, notes)
}

fn stable(a: f64, b: f64) -> Result<StableParams> {
    StableParams::new(a, b, 1.0)
}

fn spectral_part(eq: EquationId, label: &str, params: EquationParams) -> Result<(String, ResidualReport)> {
    let r = verify_spectral_identity(eq, &params, &standard_thetas(), &STANDARD_TIMES)?;
    Ok((format!("spectral_{label}"), r))
}

fn gs_part(p: StableParams, grid: &Grid1D, ts: &[f64]) -> Result<Vec<(String, ResidualReport)>> {
    ts.iter().map(|&t| Ok((format!("physical_a{}_b{}_t{t}", p.alpha(), p.beta()), verify_gs_physical(&p, grid, t)?))).collect()
}

/// Two-atom measure `±e₁` with weight ½ each.
pub fn two_atom_measure() -> Result<SpectralMeasure> {
    SpectralMeasure::discrete(2, vec![Atom { direction: vec![1.0, 0.0], weight: 0.5 }, Atom { direction: vec![-1.0, 0.0], weight: 0.5 }])
}

fn three_atom_measure() -> Result<SpectralMeasure> {
    SpectralMeasure::discrete(
        3,
        vec![
            Atom { direction: vec![1.0, 0.0, 0.0], weight: 0.5 },
            Atom { direction: vec![0.0, 1.0, 1.0], weight: 0.3 },
            Atom { direction: vec![-1.0, 2.0, 0.5], weight: 0.2 },
        ],
    )
}

/// `½ e^{-|x|}` recovered from the folded FFT of `1/(1 + θ²)` on the
/// standard grid.
pub fn laplace_check() -> Result<SubCheck> {
    let grid = Grid1D::standard();
    let p = stable(2.0, 0.0)?;
    let opts = InversionOptions { filter: None, alias_fold: 400 };
    let d = invert_charfn_with(|th| gs_charfn(&p, th, 1.0), &grid, 1.0, &opts)?;
    let worst = (0..grid.n).map(|j| (d.values[j] - 0.5 * (-grid.x(j).abs()).exp()).abs()).fold(0.0f64, f64::max);
    Ok(SubCheck::new(
        "laplace_closed_form_t1",
        worst,
        None,
        1e-6,
        SideProvenance::new("fft_inversion with alias folding", "closed_form ½ e^{-|x|}"),
    )
    .with_grid(grid)
    .with_notes("400 aliased copies folded per bin"))
}

fn variance_gamma_check(grid: &Grid1D) -> Result<SubCheck> {
    let p = stable(2.0, 0.0)?;
    let d = invert_charfn_filtered(|th| gs_charfn(&p, th, 2.0), grid, 2.0, None)?;
    let worst = (0..grid.n)
        .map(|j| {
            let x = grid.x(j).abs();
            (d.values[j] - 0.25 * (1.0 + x) * (-x).exp()).abs()
        })
        .fold(0.0f64, f64::max);
    Ok(SubCheck::new(
        "variance_gamma_closed_form_t2",
        worst,
        None,
        1e-9,
        SideProvenance::new("fft_inversion", "closed_form (1 + |x|) e^{-|x|} / 4"),
    )
    .with_grid(*grid))
}

/// Run every check for one equation.
pub fn run_equation(eq: EquationId, cfg: &SuiteConfig) -> Result<ResidualReport> {
    let grid = &cfg.grid;
    let report = match eq {
        EquationId::Lemma1GammaShift => {
            let xs: Vec<f64> = (1..=2000).map(|j| 0.01 * j as f64).collect();
            let mut parts = Vec::new();
            for b in [0.5, 1.0, 2.0] {
                let g = GammaParams::new(b)?;
                parts.push(spectral_part(eq, &format!("b{b}"), EquationParams::Gamma(g))?);
                parts.push((format!("physical_b{b}"), verify_gamma_shift_physical(b, &xs, &[1.5, 2.0, 3.0, 5.0])?));
            }
            combine(eq, parts, vec![], vec![])
        }
        EquationId::Lemma2GammaLog => {
            let mut parts = Vec::new();
            for b in [0.5, 1.0, 2.0] {
                parts.push((format!("b{b}"), verify_gamma_log(b, &standard_thetas(), &[0.5, 1.0, 2.0, 3.0, 5.0])?));
            }
            combine(eq, parts, vec![], vec![])
        }
        EquationId::Prop3GsRieszFeller => {
            let mut parts = Vec::new();
            for (a, b) in [(1.5, 0.5), (0.5, 1.0), (1.2, -0.7), (0.8, 0.3), (2.0, 0.0), (1.0, 0.0)] {
                parts.push(spectral_part(eq, &format!("a{a}_b{b}"), EquationParams::Stable(stable(a, b)?))?);
            }
            for (a, b) in [(2.0, 0.0), (1.0, 0.0), (1.5, 0.5), (0.5, 1.0)] {
                parts.extend(gs_part(stable(a, b)?, grid, &[2.0, 3.0])?);
            }
            combine(eq, parts, vec![], vec![])
        }
        EquationId::Cor4SymmetricRiesz => {
            let mut parts = Vec::new();
            for a in [0.5, 1.0, 1.5, 2.0] {
                parts.push(spectral_part(eq, &format!("a{a}"), EquationParams::Stable(stable(a, 0.0)?))?);
            }
            parts.extend(gs_part(stable(1.5, 0.0)?, grid, &[2.0])?);
            combine(eq, parts, vec![], vec![])
        }
        EquationId::RemarkCauchyGamma => {
            let p = stable(1.0, 0.0)?;
            let mut parts = vec![spectral_part(eq, "a1", EquationParams::Stable(p))?];
            parts.extend(gs_part(p, grid, &[2.0, 3.0])?);
            combine(eq, parts, vec![], vec![])
        }
        EquationId::RemarkVarianceGamma => {
            let p = stable(2.0, 0.0)?;
            let mut parts = vec![spectral_part(eq, "a2", EquationParams::Stable(p))?];
            parts.extend(gs_part(p, grid, &[2.0, 3.0])?);
            combine(eq, parts, vec![laplace_check()?, variance_gamma_check(grid)?], vec![])
        }
        EquationId::Prop5SymmetricLog => {
            let mut parts = Vec::new();
            for a in [0.5, 1.0, 1.5, 2.0] {
                parts.push(spectral_part(eq, &format!("a{a}"), EquationParams::Stable(stable(a, 0.0)?))?);
            }
            for a in [2.0, 1.0] {
                parts.push((format!("physical_a{a}"), verify_symmetric_log(a, 1.0, grid, 2.0)?));
            }
            combine(eq, parts, vec![], vec![])
        }
        EquationId::Cor6Subordinator => {
            let mut parts = Vec::new();
            let mut extra = Vec::new();
            for a in [0.5, 0.9] {
                let p = stable(a, 1.0)?;
                parts.push(spectral_part(eq, &format!("a{a}"), EquationParams::Stable(p))?);
                parts.push((format!("physical_a{a}"), verify_subordinator(a, 1.0, grid, 2.0)?));
                extra.push(mittag_leffler_mc_check(&p, cfg.mc_n, cfg.seed)?);
            }
            combine(eq, parts, extra, vec!["Mittag-Leffler scale λ = c^{1/α}".into()])
        }
        EquationId::Remark7FirstPassage => {
            let parts = vec![
                spectral_part(eq, "first_passage", EquationParams::Stable(stable(0.5, 1.0)?))?,
                ("three_way".into(), verify_first_passage_with(&[2.0], &FirstPassageOptions { mc_n: cfg.mc_n, seed: cfg.seed })?),
            ];
            combine(eq, parts, vec![], vec![])
        }
        EquationId::Prop8Multivariate => {
            let g2 = default_grid_2d();
            let parts = vec![
                ("two_atom_a1.5".into(), verify_multivariate(1.5, &two_atom_measure()?, 2.0, &g2)?),
                ("three_atom_a0.7".into(), verify_multivariate(0.7, &three_atom_measure()?, 2.0, &g2)?),
            ];
            combine(eq, parts, vec![], vec![])
        }
        EquationId::Remark9Isotropic => {
            let g2 = default_grid_2d();
            let iso2 = SpectralMeasure::isotropic(2)?;
            let parts = vec![
                ("dim2_a2".into(), verify_multivariate(2.0, &iso2, 2.0, &g2)?),
                ("dim2_a1.5".into(), verify_multivariate(1.5, &iso2, 2.0, &g2)?),
                ("dim3_a1.5".into(), verify_multivariate(1.5, &SpectralMeasure::isotropic(3)?, 2.0, &g2)?),
            ];
            combine(eq, parts, vec![], vec![])
        }
        EquationId::StableBuildingBlock => {
            let mut parts = Vec::new();
            for (a, b, t) in [(2.0, 0.0, 1.0), (1.0, 0.0, 2.0), (0.5, 1.0, 2.0)] {
                let p = stable(a, b)?;
                parts.push(spectral_part(eq, &format!("a{a}_b{b}"), EquationParams::Stable(p))?);
                parts.push((format!("physical_a{a}_b{b}"), verify_stable_building_block(&p, grid, t)?));
            }
            combine(eq, parts, vec![], vec![])
        }
    };
    Ok(report)
}

/// Failing report standing in for an equation whose checks errored.
fn error_report(eq: EquationId, err: &crate::Error) -> ResidualReport {
    let check = SubCheck::new("error", f64::NAN, None, 0.0, SideProvenance::new("none", "none")).with_notes(err.to_string());
    ResidualReport::from_checks(eq, json!({}), vec![], vec![check], vec![format!("error: {err}")])
}

/// Reports for `ids`, in the given order; checks that error become failing reports.
pub fn run_selected(ids: &[EquationId], cfg: &SuiteConfig) -> Vec<ResidualReport> {
    ids.par_iter().map(|&eq| run_equation(eq, cfg).unwrap_or_else(|e| error_report(eq, &e))).collect()
}

/// All twelve equations, in [`EquationId::ALL`] order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<ResidualReport> {
    run_selected(&EquationId::ALL, cfg)
}

/// Roll-up of a run. It passes only if every id in `expected` is present
/// and every report passes.
pub fn summary(reports: &[ResidualReport], expected: &[EquationId], metadata: Value) -> Value {
    let complete = expected.iter().all(|e| reports.iter().any(|r| r.equation == *e));
    let all_pass = complete && reports.iter().all(|r| r.pass);
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "equation": r.equation,
                "pass": r.pass,
                "linf": r.linf,
                "tolerance": r.tolerance,
                "binding_check": r.binding_check,
                "checks": r.checks.len(),
            })
        })
        .collect();
    json!({"metadata": metadata, "complete": complete, "pass": all_pass, "equations": rows})
}
