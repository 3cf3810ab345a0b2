mod common;

use common::*;
use deformation::{eprime_series, j_map_apply, DeformationError, PerturbationFrame, TypedLeadingTerm};
use fourier_core::{c64, Series};
use proptest::prelude::*;

fn term(a: f64, b: f64, cp: Series, cm: Series) -> TypedLeadingTerm {
    TypedLeadingTerm::new(a, b, cp, cm).unwrap()
}

#[test]
fn type_validation() {
    let z = Series::zeros(1);
    assert!(TypedLeadingTerm::new(0.5, 0.0, z.clone(), z.clone()).is_ok());
    assert!(TypedLeadingTerm::new(-1.5, 2.0, z.clone(), z.clone()).is_ok());
    assert!(matches!(TypedLeadingTerm::new(0.5, 0.5, z.clone(), z.clone()), Err(DeformationError::BadType { .. })));
    assert!(matches!(TypedLeadingTerm::new(0.3, 0.2, z.clone(), z), Err(DeformationError::BadType { .. })));
}

#[test]
fn half_zero_maps_to_single_term() {
    let ed = Series::monomial(1, c64(0.0, 1.0));
    let q = Series::constant(c64(2.0, 0.0));
    let out = j_map_apply(&term(0.5, 0.0, q.clone(), q.clone()), &ed).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!((out[0].a(), out[0].b()), (0.0, 0.5));
    // (-i eta' q+, i conj(eta') q-) with eta' = i e^{it}
    assert!((out[0].coeff_plus.coeff(1) - c64(2.0, 0.0)).norm() < 1e-15);
    assert!((out[0].coeff_minus.coeff(-1) - c64(2.0, 0.0)).norm() < 1e-15);
}

#[test]
fn zero_half_maps_to_two_terms() {
    let ed = Series::constant(c64(1.0, 0.0));
    let q = Series::constant(c64(1.0, 0.0));
    let out = j_map_apply(&term(0.0, 0.5, q.clone(), q), &ed).unwrap();
    assert_eq!(out.len(), 2);
    let types: Vec<_> = out.iter().map(|t| (t.a(), t.b())).collect();
    assert!(types.contains(&(0.5, 0.0)) && types.contains(&(-0.5, 1.0)));
    let second = out.iter().find(|t| t.a() == -0.5).unwrap();
    // factor b / (a + 1) = 1/2
    assert!((second.coeff_plus.coeff(0) - c64(0.0, -0.5)).norm() < 1e-15);
    assert!((second.coeff_minus.coeff(0) - c64(0.0, 0.5)).norm() < 1e-15);
}

#[test]
fn zero_coefficients_drop_out() {
    let ed = Series::constant(c64(1.0, 0.0));
    let z = Series::zeros(2);
    assert!(j_map_apply(&term(0.0, 0.5, z.clone(), z.clone()), &ed).unwrap().is_empty());
    let q = Series::constant(c64(1.0, 0.0));
    assert!(j_map_apply(&term(0.0, 0.5, q.clone(), q), &Series::zeros(1)).unwrap().is_empty());
}

#[test]
fn a_minus_one_is_rejected() {
    let q = Series::constant(c64(1.0, 0.0));
    let t = term(-1.0, 1.5, q.clone(), q);
    assert!(matches!(j_map_apply(&t, &Series::constant(c64(1.0, 0.0))), Err(DeformationError::BadType { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]
    #[test]
    fn type_sum_is_preserved(a2 in -6i32..6, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        prop_assume!(a2 != -2);
        let a = a2 as f64 / 2.0;
        let b = 0.5 - a;
        let q = Series::new(1, vec![c64(re, im), c64(1.0, 0.0), c64(im, -re)]).unwrap();
        let ed = Series::new(1, vec![c64(0.3, 0.0), c64(0.0, 0.0), c64(-0.2, 0.1)]).unwrap();
        for t in j_map_apply(&term(a, b, q.clone(), q), &ed).unwrap() {
            prop_assert_eq!(t.a() + t.b(), 0.5);
        }
    }
}

fn frame_with_eta(eta: Series, frac: f64) -> PerturbationFrame {
    let (frak_r, t_ratio) = (0.25, 16.0);
    let k1 = PerturbationFrame::kappa1_from_kappa0(frak_r, t_ratio, 1.0);
    let thr = PerturbationFrame::unchecked(frak_r, t_ratio, 2.0, 0.0, 1.0, k1, eta.clone()).s_threshold();
    PerturbationFrame::new(1.0, frak_r, t_ratio, 2.0, frac * thr, 1.0, k1, eta).unwrap()
}

#[test]
fn constant_eta_stops_at_the_seed() {
    let f = frame_with_eta(Series::constant(c64(0.01, 0.0)), 0.5);
    let seed = term(0.5, 0.0, Series::constant(c64(0.1, 0.0)), Series::zeros(0));
    let e = eprime_series(&seed, &f, 20).unwrap();
    assert!(e.converged);
    assert_eq!(e.sum.len(), 1);
    assert_eq!(e.diffs.len(), 2);
    assert_eq!(e.diffs[1], 0.0);
}

#[test]
fn seeds_never_reach_a_minus_one() {
    let mut rng = rng(41);
    for _ in 0..5 {
        let raw = random_series(&mut rng, 2);
        let n = raw.l2_norm().max(raw.derivative().l2_norm()).max(raw.derivative().derivative().l2_norm());
        let eta = &raw * (0.0625 * 0.9 / n);
        let f = frame_with_eta(eta, 0.5);
        for (a, b) in [(0.5, 0.0), (0.0, 0.5)] {
            let q = random_series(&mut rng, 2);
            let q = &q * (f.kappa1() / (2.0 * q.l2_norm()));
            let seed = term(a, b, q.clone(), q.conj());
            let e = eprime_series(&seed, &f, 20).unwrap();
            assert!(e.types_seen.iter().all(|&(a, _)| a != -1.0), "{:?}", e.types_seen);
            let worst = e.ratios().iter().cloned().filter(|r| r.is_finite()).fold(0.0, f64::max);
            assert!(worst <= 0.5, "ratio {worst}");
            assert!(e.norm_12 <= 2.0 * f.kappa1(), "{} vs {}", e.norm_12, f.kappa1());
        }
    }
}

#[test]
fn seed_type_and_threshold_checked() {
    let f = frame_with_eta(Series::constant(c64(0.01, 0.0)), 0.5);
    let q = Series::constant(c64(1.0, 0.0));
    assert!(matches!(
        eprime_series(&term(-0.5, 1.0, q.clone(), q.clone()), &f, 5),
        Err(DeformationError::BadType { .. })
    ));
    let hot = f.with_s(2.0 * f.s_threshold());
    assert!(matches!(
        eprime_series(&term(0.5, 0.0, q.clone(), q), &hot, 5),
        Err(DeformationError::AboveThreshold { .. })
    ));
}
