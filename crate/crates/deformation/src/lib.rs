//! Linearized deformation of the zero locus and the defect iteration, at leading-term
//! granularity on the model tube.
//!
//! Everything here is built on per-mode data: Fourier series in `t` for leading
//! coefficients and radial samples for mode profiles.

pub mod budget;
pub mod frame;
pub mod iterate;
pub mod leading;
pub mod radial;
pub mod typed;

pub use budget::{decomposition_norm_budget, BudgetReport, SliceBudget};
pub use frame::{pullback_matrix_M, pullback_matrix_M_ds, Cutoff, PerturbationFrame};
pub use iterate::{
    fit_ratio, iterate, parameter_window, AnnulusMass, DefectLedger, DefectMode, DefectSet, LedgerRow,
};
pub use leading::{solve_leading_correction, DeformationSolution, SOLVER_TOL};
pub use radial::{radial_bvp_solve, RadialSolution};
pub use typed::{eprime_series, j_map_apply, EprimeSeries, TypedLeadingTerm};

use cylinder_spinors::CylinderError;
use fredholm_t::FredholmError;

pub type Mat3 = [[fourier_core::C64; 3]; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeformationError {
    #[error(transparent)]
    Fredholm(#[from] FredholmError),
    #[error(transparent)]
    Cylinder(#[from] CylinderError),
    #[error("H0 basis vector {0} has no J-preimage")]
    MissingPreimage(usize),
    #[error("residuals ({plus:e}, {minus:e}) above tolerance")]
    Residual { plus: f64, minus: f64 },
    #[error("invalid frame: {0}")]
    Frame(String),
    #[error("perturbation too large: |1 + s(chi_z eta + chi_zbar etabar)| = {0}")]
    PerturbationTooLarge(f64),
    #[error("type a = -1 reached at step {step}: the J map is undefined there")]
    ForbiddenType { step: usize },
    #[error("type exponents must be half-integers with a + b = 1/2, got ({a}, {b})")]
    BadType { a: f64, b: f64 },
    #[error("s = {s} above the threshold {threshold}")]
    AboveThreshold { s: f64, threshold: f64 },
    #[error("series does not contract: difference ratio {0}")]
    NotConverged(f64),
    #[error("radial solve: {0}")]
    Radial(String),
    #[error("initial defect outside the i = 0 budget: {0}")]
    InitialBudget(String),
    #[error("csv: {0}")]
    Csv(String),
}
