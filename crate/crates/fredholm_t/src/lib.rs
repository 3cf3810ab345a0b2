//! The real-linear operator `T(c) = conj(d-) c - d+ conj(c^aps)` on truncated Fourier space.
//!
//! Realification layout used throughout: modes `l = -L..L` in order, each as `(re, im)`.
//! `real_inner` weights every coordinate by the same `2 pi`, so matrix transposes are
//! true adjoints.

pub mod coker;
pub mod diagnostics;
pub mod high_modes;
pub mod operator;
pub mod squeeze;
pub mod symbol;

pub use coker::{cokernel_complement, CokernelBasis};
pub use diagnostics::{spectral_diagnostics, t_diagnostics, SpectralDiagnostics, RANK_TOL};
pub use high_modes::{
    commutator_threshold, high_mode_injectivity, high_mode_lower_bound, HighModeSolution,
    LowerBound,
};
pub use operator::{build_T_matrix, build_T_star_matrix, build_matrix, RealLinearOperator};
pub use squeeze::{bracket, squeeze, LinearForm, Side, SqueezeStep, Squeezed};
pub use symbol::{apply_J, apply_O, apply_T, apply_T_star, SymbolPair};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FredholmError {
    #[error("symbol degenerates: tau = {0:e}")]
    Degenerate(f64),
    #[error("band {band} too small, need at least {need}")]
    BandTooSmall { band: usize, need: usize },
    #[error("matrix is numerically zero")]
    ZeroMatrix,
    #[error("forward data has mass in [-M, M] (relative {0:e})")]
    LowModes(f64),
    #[error("degenerate symbol: frontier determinant {0:e}")]
    Frontier(f64),
    #[error("tuple is zero")]
    ZeroTuple,
    #[error("elimination exhausted the tuple")]
    Exhausted,
    #[error("diagnostics unstable across truncations; increase band")]
    Unstable,
    #[error("cut {cut} below the commutator threshold {threshold}")]
    BelowThreshold { cut: usize, threshold: usize },
}
