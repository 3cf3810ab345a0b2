#![allow(dead_code)]
use fourier_core::{c64, Series};
use fredholm_t::SymbolPair;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_series(rng: &mut ChaCha8Rng, band: usize) -> Series {
    Series::from_fn(band, |_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Series supported on `lo < |l| <= hi`.
pub fn random_high(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Series {
    Series::from_fn(hi, |l| {
        if l.unsigned_abs() as usize > lo {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// Random pair of band `m` with `tau >= tau_min` (rejection sampling).
pub fn random_symbol(rng: &mut ChaCha8Rng, m: usize, tau_min: f64) -> SymbolPair {
    loop {
        let s = SymbolPair::new(random_series(rng, m), random_series(rng, m));
        if let Ok(s) = s {
            if s.tau() >= tau_min {
                return s;
            }
        }
    }
}

pub fn rel(a: &Series, b: &Series) -> f64 {
    let n = a.band_limit().max(b.band_limit());
    (&a.with_band(n) - &b.with_band(n)).norm_sqr_coeffs().sqrt() / b.norm_sqr_coeffs().sqrt().max(1e-300)
}

/// A random `eta` of band 3 scaled to meet the frame bounds with `kappa0 = 1`, and the
/// checked frame on `R = 4 frak_r` with `kappa1` derived from `kappa0` and `s = frac * threshold`.
pub fn admissible_frame(
    rng: &mut ChaCha8Rng,
    frak_r: f64,
    t_ratio: f64,
    p: f64,
    frac: f64,
) -> deformation::PerturbationFrame {
    let raw = random_series(rng, 3);
    let n = [
        raw.l2_norm() / (frak_r * frak_r),
        raw.derivative().l2_norm() / frak_r,
        raw.derivative().derivative().l2_norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let eta = &raw * (0.9 / n);
    let probe = deformation::PerturbationFrame::unchecked(frak_r, t_ratio, p, 0.0, 1.0, 1.0, eta.clone());
    let k1 = deformation::PerturbationFrame::kappa1_from_kappa0(frak_r, t_ratio, 1.0);
    assert!(k1 >= probe.required_kappa1());
    let thr = probe.with_kappa1(k1).s_threshold();
    deformation::PerturbationFrame::new(4.0 * frak_r, frak_r, t_ratio, p, frac * thr, 1.0, k1, eta)
        .expect("admissible frame")
}
