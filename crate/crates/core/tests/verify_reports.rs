use geostable::gslaw::{GammaParams, SpectralMeasure, StableParams};
use geostable::spectral::Grid1D;
use geostable::verify::*;

#[test]
fn gs_rieszfeller_example_point_set() {
    let p = EquationParams::Stable(StableParams::new(1.5, 0.3, 1.0).unwrap());
    let r = verify_spectral_identity(EquationId::Prop3GsRieszFeller, &p, &standard_thetas(), &STANDARD_TIMES).unwrap();
    assert!(r.pass, "{}", r.linf);
    assert_eq!(r.pass, r.linf <= r.tolerance);
    assert_eq!(r.t, STANDARD_TIMES.to_vec());
}

#[test]
fn zero_frequency_sides_vanish() {
    let cases = [
        (EquationId::Lemma1GammaShift, EquationParams::Gamma(GammaParams::new(1.0).unwrap())),
        (EquationId::Prop3GsRieszFeller, EquationParams::Stable(StableParams::new(0.7, -0.4, 1.0).unwrap())),
        (EquationId::Cor6Subordinator, EquationParams::Stable(StableParams::new(0.7, 1.0, 1.0).unwrap())),
    ];
    for (eq, p) in cases {
        // θ = 0 alone: both sides are exactly zero
        let c = spectral_identity_check(eq, &p, &[0.0], &[0.5, 3.0]).unwrap();
        assert_eq!(c.linf, 0.0, "{eq}");
    }
    // time-derivative forms: the contour derivative of a constant is zero up to round-off
    let d = cauchy_time_derivative(|_| num_complex::Complex64::new(1.0, 0.0), 2.0, 0.0);
    assert!(d.norm() < 1e-15);
}

#[test]
fn report_serialises_with_expected_keys() {
    let r = verify_gamma_shift_physical(1.0, &[0.5, 1.0, 2.0], &[2.0, 3.0]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(v["equation"], "lemma1_gamma_shift");
    assert!(v["notes"].is_string());
    assert!(v["provenance"]["lhs"].is_string());
    assert_eq!(v["pass"].as_bool().unwrap(), v["linf"].as_f64().unwrap() <= v["tolerance"].as_f64().unwrap());
}

#[test]
fn precondition_errors() {
    assert!(verify_gamma_shift_physical(1.0, &[1.0], &[0.9]).is_err());
    let p = StableParams::new(1.5, 0.0, 1.0).unwrap();
    assert!(verify_gs_physical(&p, &Grid1D::standard(), 1.5).is_err());
    assert!(verify_subordinator(1.5, 1.0, &Grid1D::standard(), 2.0).is_err());
    let iso = SpectralMeasure::isotropic(2).unwrap();
    assert!(verify_multivariate(1.0, &iso, 2.0, &default_grid_2d()).is_err());
    assert!(verify_first_passage(&[1.0]).is_err());
}

#[test]
fn multivariate_examples() {
    let iso = SpectralMeasure::isotropic(2).unwrap();
    let two = two_atom_measure().unwrap();
    for (alpha, m) in [(2.0, &iso), (1.5, &two)] {
        let p = EquationParams::Multivariate { alpha, measure: m.clone() };
        let eq = if m.is_isotropic() { EquationId::Remark9Isotropic } else { EquationId::Prop8Multivariate };
        let c = spectral_identity_check(eq, &p, &standard_thetas(), &[2.0]).unwrap();
        assert!(c.linf <= 1e-12, "{eq}: {}", c.linf);
    }
}

#[test]
fn gs_physical_variance_gamma_default_grid() {
    let p = StableParams::new(2.0, 0.0, 1.0).unwrap();
    let r = verify_gs_physical(&p, &Grid1D::standard(), 2.0).unwrap();
    assert!(r.pass, "{:#?}", r.checks);
    let gl = r.checks.iter().find(|c| c.name.starts_with("gl_residual")).unwrap();
    assert!(gl.linf <= 1e-4);
}

#[test]
fn summary_requires_every_equation() {
    let r = verify_gamma_shift_physical(1.0, &[1.0, 2.0], &[2.0]).unwrap();
    let s = summary(&[r], &EquationId::ALL, serde_json::json!({}));
    assert_eq!(s["complete"], false);
    assert_eq!(s["pass"], false);
}
