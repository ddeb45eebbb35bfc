use geostable::fracops::{gl_weights, grunwald_letnikov_rf, Boundary};
use geostable::gslaw::*;
use geostable::sampling::{sample_gs, sample_isotropic_gs};
use geostable::spectral::{forward, inverse, Grid1D};
use geostable::verify::{spectral_identity_check, EquationId, EquationParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn stable_params() -> impl Strategy<Value = StableParams> {
    (0.05f64..=2.0, -1.0f64..=1.0, 0.1f64..5.0).prop_map(|(a, b, s)| {
        // α = 1 is only defined for β = 0
        let b = if (a - 1.0).abs() < 1e-9 { 0.0 } else { b };
        StableParams::new(a, b, s).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gs_charfn_is_a_charfn(p in stable_params(), theta in -100.0f64..100.0, t in 0.01f64..10.0) {
        let v = gs_charfn(&p, theta, t);
        prop_assert!(v.norm() <= 1.0 + 1e-14);
        let w = gs_charfn(&p, -theta, t);
        prop_assert!((v - w.conj()).norm() <= 1e-14);
        prop_assert_eq!(gs_charfn(&p, 0.0, t), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn stable_charfn_is_a_charfn(p in stable_params(), theta in -100.0f64..100.0, t in 0.01f64..10.0) {
        let v = stable_charfn(&p, theta, t);
        prop_assert!(v.norm() <= 1.0 + 1e-14);
        prop_assert!((v - stable_charfn(&p, -theta, t).conj()).norm() <= 1e-14);
    }

    #[test]
    fn feller_skew_in_range(p in stable_params()) {
        let f = p.feller();
        let bound = p.alpha().min(2.0 - p.alpha());
        prop_assert!(f.gamma_skew.abs() <= bound + 1e-12);
        prop_assert!(f.c > 0.0);
        let expect = p.sigma().powf(p.alpha()) / (std::f64::consts::PI * f.gamma_skew / 2.0).cos();
        prop_assert!((f.c - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn gs_rieszfeller_identity_for_random_params(p in stable_params()) {
        let thetas: Vec<f64> = (0..101).map(|k| -50.0 + k as f64).collect();
        let c = spectral_identity_check(EquationId::Prop3GsRieszFeller, &EquationParams::Stable(p), &thetas, &[0.5, 1.0, 2.0, 5.0]).unwrap();
        prop_assert!(c.pass, "residual {}", c.linf);
    }

    #[test]
    fn gamma_density_nonnegative(b in 0.1f64..5.0, x in -5.0f64..50.0, t in 0.1f64..20.0) {
        let g = GammaParams::new(b).unwrap();
        let f = gamma_density(&g, x, t).unwrap();
        prop_assert!(f >= 0.0);
        if x < 0.0 {
            prop_assert_eq!(f, 0.0);
        }
    }

    #[test]
    fn discrete_measure_directions_are_unit(
        dirs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 1..8),
        weights in prop::collection::vec(0.01f64..2.0, 8),
    ) {
        prop_assume!(dirs.iter().all(|d| d.iter().map(|v| v * v).sum::<f64>() > 1e-6));
        let atoms = dirs.iter().zip(&weights).map(|(d, &w)| Atom { direction: d.clone(), weight: w }).collect();
        let m = SpectralMeasure::discrete(3, atoms).unwrap();
        for a in m.atoms() {
            let n: f64 = a.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() <= 1e-12);
        }
        let round = SpectralMeasure::from_json(&m.to_json().unwrap()).unwrap();
        prop_assert_eq!(round.atoms().len(), m.atoms().len());
        for (a, b) in round.atoms().iter().zip(m.atoms()) {
            prop_assert!((a.weight - b.weight).abs() <= 1e-15);
            for (x, y) in a.direction.iter().zip(&b.direction) {
                prop_assert!((x - y).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn mittag_leffler_is_completely_monotone_on_samples(alpha in 0.1f64..=1.0, z in 0.0f64..30.0) {
        let a = mittag_leffler(alpha, -z).unwrap();
        let b = mittag_leffler(alpha, -z - 0.5).unwrap();
        prop_assert!(a >= b - 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn fft_round_trip(vals in prop::collection::vec(-1.0f64..1.0, 64)) {
        let g = Grid1D::new(-3.0, 5.0, 64).unwrap();
        let spec = forward(&vals, &g).unwrap();
        let (back, imag) = inverse(&spec, &g).unwrap();
        prop_assert!(imag < 1e-13);
        for (a, b) in vals.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn gl_annihilates_constants(alpha in 0.1f64..=2.0, level in -3.0f64..3.0) {
        let alpha = if (alpha - 1.0).abs() < 1e-9 { 1.0 } else { alpha };
        let u = vec![level; 128];
        let d = grunwald_letnikov_rf(&u, 0.1, alpha, 0.0, Boundary::Periodic).unwrap();
        for v in d {
            prop_assert!(v.abs() <= 1e-9 * (1.0 + level.abs()) / 0.1f64.powf(alpha));
        }
    }

    #[test]
    fn gl_weight_partial_sums(alpha in 0.2f64..1.9) {
        // Σ_{k≤N} w_k = Π_{k≤N} (1 - α/k), which tends to 0
        let w = gl_weights(alpha, 2000);
        prop_assert_eq!(w[0], 1.0);
        let mut s = 0.0;
        let mut prod = 1.0;
        for (k, v) in w.iter().enumerate() {
            s += v;
            if k > 0 {
                prod *= 1.0 - alpha / k as f64;
            }
            prop_assert!((s - prod).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn samplers_are_seed_deterministic(seed in any::<u64>(), n in 1usize..9000) {
        let p = StableParams::new(1.3, 0.4, 1.0).unwrap();
        let a = sample_gs(&p, 2.0, n, seed).unwrap();
        let b = sample_gs(&p, 2.0, n, seed).unwrap();
        prop_assert_eq!(&a.values, &b.values);
        let c = sample_isotropic_gs(1.5, 2, 1.0, n, seed).unwrap();
        let d = sample_isotropic_gs(1.5, 2, 1.0, n, seed).unwrap();
        prop_assert_eq!(c.values, d.values);
        // a longer run extends a shorter one
        let longer = sample_gs(&p, 2.0, n + 100, seed).unwrap();
        prop_assert_eq!(&longer.values[..n], &a.values[..]);
    }
}
