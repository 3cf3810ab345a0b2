mod common;

use common::*;
use fourier_core::{c64, Series};
use fredholm_t::*;

#[test]
fn zero_data_gives_zero() {
    let mut r = rng(31);
    let sym = random_symbol(&mut r, 2, 0.1);
    let s = high_mode_injectivity(&sym, 20, &Series::zeros(22)).unwrap();
    assert_eq!(s.c.norm_sqr_coeffs(), 0.0);
}

#[test]
fn low_mode_data_rejected() {
    let sym = SymbolPair::constant(c64(1.0, 0.0), c64(1.0, 0.0)).unwrap();
    let f = Series::monomial(0, c64(1.0, 0.0));
    assert!(matches!(high_mode_injectivity(&sym, 8, &f), Err(FredholmError::LowModes(_))));
}

#[test]
fn round_trip_recovery() {
    let mut r = rng(32);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let m = rand::Rng::random_range(&mut r, 0..=3);
        let sym = random_symbol(&mut r, m, 0.1);
        for _ in 0..10 {
            let band = 2 * m + 12;
            let c = random_high(&mut r, 2 * m, band);
            let f = apply_T(&sym, &c);
            let s = high_mode_injectivity(&sym, band, &f).unwrap();
            worst = worst.max(rel(&s.c, &c));
            assert!(s.residual <= 1e-9);
        }
    }
    println!("worst recovery error {worst:e}");
    assert!(worst <= 1e-9);
}

#[test]
fn long_bands_stay_accurate() {
    // forward substitution alone loses ~8 digits by band 42 on band-3 symbols
    let mut r = rng(35);
    for _ in 0..4 {
        let sym = random_symbol(&mut r, 3, 0.1);
        for band in [18, 42, 78] {
            let c = random_high(&mut r, 6, band);
            let s = high_mode_injectivity(&sym, band, &apply_T(&sym, &c)).unwrap();
            assert!(rel(&s.c, &c) <= 1e-9, "band {band}: {}", rel(&s.c, &c));
            assert!(s.residual <= 1e-9);
        }
    }
}

#[test]
fn degenerate_frontier_is_squeezed() {
    // d- = 1 + e^{it}, d+ = 0: a_p = (conj d-_{M}, d+_{-M}) = (1, 0), spouse(a_1) = (0, -1)
    // d+ = e^{-it}, d- = 0: a_p = (0, 1), a_1 = (0, 0) -> squeeze needed
    let sym = SymbolPair::new(
        Series::monomial(-1, c64(1.0, 0.0)),
        Series::from_fn(1, |l| if l == 0 { c64(0.3, 0.0) } else { c64(0.0, 0.0) }),
    )
    .unwrap();
    let mut r = rng(33);
    let c = random_high(&mut r, 2, 14);
    let s = high_mode_injectivity(&sym, 14, &apply_T(&sym, &c)).unwrap();
    assert!(!s.squeezed.steps.is_empty());
    assert!(rel(&s.c, &c) < 1e-9);
}

#[test]
fn lower_bound_examples() {
    let id = SymbolPair::constant(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
    let b = high_mode_lower_bound(&id, 0, 3).unwrap();
    assert!((b.value - 1.0).abs() < 1e-12);

    let both = SymbolPair::constant(c64(1.0, 0.0), c64(1.0, 0.0)).unwrap();
    let b = high_mode_lower_bound(&both, 0, 3).unwrap();
    assert!((b.value - both.tau()).abs() < 1e-12, "{}", b.value);
    assert!(b.probe_ratio <= 1.0 + 1e-12);
}

#[test]
fn lower_bound_random_is_stable() {
    let mut r = rng(34);
    for _ in 0..4 {
        let sym = random_symbol(&mut r, 2, 0.5);
        let cut = commutator_threshold(&sym);
        assert!(matches!(
            high_mode_lower_bound(&sym, cut.saturating_sub(1), 1),
            Err(FredholmError::BelowThreshold { .. }) | Ok(_)
        ));
        let b = high_mode_lower_bound(&sym, cut, 4).unwrap();
        println!("cut {cut} sigma {} {} drift {}", b.sigma_band, b.sigma_double, b.drift());
        assert!(b.value > 0.0 && b.drift() <= 0.25);
        assert!(b.probe_ratio <= 1.0 + 1e-12);
    }
}
