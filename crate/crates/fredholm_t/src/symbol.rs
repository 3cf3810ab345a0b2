use crate::FredholmError;
use cylinder_spinors::modes::min_modulus;
use cylinder_spinors::LeadingData;
use fourier_core::{Series, C64};

/// Number of `t`-samples used for `tau` and the pointwise maps.
pub const SAMPLES: usize = 1024;

/// Symbol pair `(d+, d-)` of common band `M` with `tau = min_t sqrt(|d+|^2 + |d-|^2) > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPair {
    d_plus: Series,
    d_minus: Series,
    tau: f64,
}

impl SymbolPair {
    pub fn new(d_plus: Series, d_minus: Series) -> Result<Self, FredholmError> {
        let m = d_plus.band_limit().max(d_minus.band_limit());
        let (d_plus, d_minus) = (d_plus.with_band(m), d_minus.with_band(m));
        let tau = min_modulus(&d_plus, &d_minus, SAMPLES);
        let scale = (d_plus.norm_sqr_coeffs() + d_minus.norm_sqr_coeffs()).sqrt();
        if !(tau > 1e-14 * scale) {
            return Err(FredholmError::Degenerate(tau));
        }
        Ok(Self { d_plus, d_minus, tau })
    }

    pub fn constant(d_plus: C64, d_minus: C64) -> Result<Self, FredholmError> {
        Self::new(Series::constant(d_plus), Series::constant(d_minus))
    }

    pub fn d_plus(&self) -> &Series {
        &self.d_plus
    }

    pub fn d_minus(&self) -> &Series {
        &self.d_minus
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Common band `M`.
    pub fn band(&self) -> usize {
        self.d_plus.band_limit()
    }

    /// Straight-line interpolation `(1-t) self + t other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Result<Self, FredholmError> {
        Self::new(
            &(&self.d_plus * (1.0 - t)) + &(&other.d_plus * t),
            &(&self.d_minus * (1.0 - t)) + &(&other.d_minus * t),
        )
    }
}

impl TryFrom<&LeadingData> for SymbolPair {
    type Error = FredholmError;
    fn try_from(d: &LeadingData) -> Result<Self, FredholmError> {
        Self::new(d.d_plus.clone(), d.d_minus.clone())
    }
}

/// `T(c) = conj(d-) c - d+ conj(aps c)`, band `L_c + M`.
#[allow(non_snake_case)]
pub fn apply_T(sym: &SymbolPair, c: &Series) -> Series {
    &sym.d_minus.conj().convolve(c) - &sym.d_plus.convolve(&c.aps().conj())
}

/// Adjoint of `T` for `real_inner`: `T*(k) = d- k - aps(d+ conj k)`.
#[allow(non_snake_case)]
pub fn apply_T_star(sym: &SymbolPair, k: &Series) -> Series {
    &sym.d_minus.convolve(k) - &sym.d_plus.convolve(&k.conj()).aps()
}

/// `J(h+, h-) = -2 (conj(d-) h+ - d+ conj(h-))`.
#[allow(non_snake_case)]
pub fn apply_J(sym: &SymbolPair, h_plus: &Series, h_minus: &Series) -> Series {
    let a = sym.d_minus.conj().convolve(h_plus);
    let b = sym.d_plus.convolve(&h_minus.conj());
    let band = a.band_limit().max(b.band_limit());
    &(&a.with_band(band) - &b.with_band(band)) * -2.0
}

/// Extra modes kept when re-projecting a pointwise product.
pub const GUARD: usize = 8;

/// `O(c) = -(conj(d+) c + d- conj(c^aps)) / (|d+|^2 + |d-|^2)` by sampling.
///
/// Returns the projection to band `L_c + M + GUARD` and the relative `L^2` mass
/// the projection discards.
#[allow(non_snake_case)]
pub fn apply_O(sym: &SymbolPair, c: &Series) -> (Series, f64) {
    let n = SAMPLES;
    let dp = sym.d_plus.sample(n);
    let dm = sym.d_minus.sample(n);
    let cs = c.sample(n);
    let ca = c.aps().conj().sample(n);
    let vals: Vec<C64> = (0..n)
        .map(|j| -(dp[j].conj() * cs[j] + dm[j] * ca[j]) / (dp[j].norm_sqr() + dm[j].norm_sqr()))
        .collect();
    let full = Series::from_samples(&vals, n / 2 - 1);
    let band = c.band_limit() + sym.band() + GUARD;
    let kept = full.project_band(band.min(full.band_limit()));
    let total = full.norm_sqr_coeffs();
    let defect = if total == 0.0 {
        0.0
    } else {
        ((total - kept.norm_sqr_coeffs()).max(0.0) / total).sqrt()
    };
    (kept.with_band(band), defect)
}
