//! Harmonic modes on the flat model tube `N_R` with coordinates `(r, theta, t)`.
//!
//! A mode `(k, l)` carries radial profiles `(U+(r), U-(r))` built from modified Bessel
//! functions (or powers of `r` when `l = 0`). The true `I_p` normalization is kept,
//! including the `sqrt(2/pi)` factor of the half-integer closed forms.

pub mod bessel;
pub mod estimates;
pub mod geometry;
pub mod modes;

pub use bessel::{bessel_i, frak_i, gamma_half};
pub use estimates::{cyl_norm, decay_ratio, growth_bound_margin, mode_norms2, poincare_check};
pub use geometry::CylinderGeometry;
pub use modes::{
    build_harmonic_mode, dirac_apply_mode, dirac_apply_on, expansion_from_boundary,
    expansion_from_kr, extract_leading, minus_family, plus_family, relative_residual, KrLeading,
    Leading, LeadingData, ModeTerm, ProfileClass, SpinOffset, SpinorModeExpansion,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CylinderError {
    #[error("Bessel order {0} is not an integer or half-integer")]
    Order(f64),
    #[error("argument {0} must be nonnegative")]
    Argument(f64),
    #[error("argument {0} overflows (limit 700)")]
    Overflow(f64),
    #[error("l = 0 has power-law profiles, not Bessel ones")]
    ZeroFrequency,
    #[error("{0}")]
    Geometry(String),
    #[error("mode (k={k}, l={l}) of class {class:?} must have {which} = 0")]
    Constraint {
        k: i64,
        l: i64,
        class: ProfileClass,
        which: &'static str,
    },
    #[error("mode (k={k}, l={l}) outside the geometry bands")]
    Band { k: i64, l: i64 },
    #[error("radius {r} outside (0, {big}]")]
    Radius { r: f64, big: f64 },
    #[error("derivative order {0} not supported")]
    DerivativeOrder(u8),
    #[error("expansion is zero")]
    ZeroExpansion,
    #[error("expansion mixes L2 and L21 terms")]
    MixedClasses,
    #[error("json: {0}")]
    Json(String),
}
