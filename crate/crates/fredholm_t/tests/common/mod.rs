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
