use crate::operator::{build_T_matrix, build_T_star_matrix, RealLinearOperator};
use crate::symbol::SymbolPair;
use crate::FredholmError;
use nalgebra::DMatrix;

/// Relative rank tolerance: `sigma > RANK_TOL * sigma_max` counts toward the rank.
pub const RANK_TOL: f64 = 1e-9;

/// Looser tolerance used to confirm there is no singular value near the cut.
const RECHECK_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDiagnostics {
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank_tol: f64,
    pub dim_ker: usize,
    pub dim_coker: usize,
    pub index: i64,
    /// Smallest singular value above the rank cut.
    pub sigma_min_positive: f64,
    /// Same `(dim_ker, dim_coker)` at band `2L` and at the looser tolerance.
    /// `None` when not checked.
    pub stable: Option<bool>,
}

fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>, FredholmError> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    if s.first().is_none_or(|&x| x == 0.0) {
        return Err(FredholmError::ZeroMatrix);
    }
    Ok(s)
}

fn rank(s: &[f64], tol: f64) -> usize {
    s.iter().filter(|&&x| x > tol * s[0]).count()
}

/// Diagnostics of an arbitrary operator matrix.
///
/// Plain mode: `dim_ker = cols - rank`, `dim_coker = rows - rank`. With `restrict_to_square`
/// the rows are cut to the source band first, which compares source and target on the
/// same modes.
pub fn spectral_diagnostics(
    op: &RealLinearOperator,
    restrict_to_square: bool,
) -> Result<SpectralDiagnostics, FredholmError> {
    let op = if restrict_to_square && op.target_band() > op.source_band() {
        op.restrict_target(op.source_band())
    } else {
        op.clone()
    };
    let m = op.matrix();
    let s = singular_values(m)?;
    let r = rank(&s, RANK_TOL);
    let (dim_ker, dim_coker) = (m.ncols() - r, m.nrows() - r);
    Ok(SpectralDiagnostics {
        sigma_min_positive: s[r - 1],
        singular_values: s,
        rank_tol: RANK_TOL,
        dim_ker,
        dim_coker,
        index: dim_ker as i64 - dim_coker as i64,
        stable: None,
    })
}

struct Nullities {
    ker: usize,
    coker: usize,
    loose: (usize, usize),
    s_t: Vec<f64>,
    s_star: Vec<f64>,
}

fn nullities(sym: &SymbolPair, band: usize) -> Result<Nullities, FredholmError> {
    let t = build_T_matrix(sym, band)?;
    let ts = build_T_star_matrix(sym, band)?;
    let s_t = singular_values(t.matrix())?;
    let s_star = singular_values(ts.matrix())?;
    let n = t.matrix().ncols();
    Ok(Nullities {
        ker: n - rank(&s_t, RANK_TOL),
        coker: n - rank(&s_star, RANK_TOL),
        loose: (n - rank(&s_t, RECHECK_TOL), n - rank(&s_star, RECHECK_TOL)),
        s_t,
        s_star,
    })
}

/// Kernel/cokernel diagnostics of `T` at band `L`.
///
/// `dim_ker` is the nullity of `T` from band `L` into band `L + M`; `dim_coker` is the
/// nullity of `T*` over the same bands (the cokernel of `T` on `L^2` is `ker T*`).
/// Stability compares against band `2L` and against the looser tolerance `1e-7`.
#[allow(non_snake_case)]
pub fn t_diagnostics(sym: &SymbolPair, band: usize) -> Result<SpectralDiagnostics, FredholmError> {
    let a = nullities(sym, band)?;
    let b = nullities(sym, 2 * band)?;
    let stable = (a.ker, a.coker) == (b.ker, b.coker) && (a.ker, a.coker) == a.loose;
    let s = a.s_t;
    let r = s.len() - a.ker;
    let sigma_min_positive = s[r - 1].min(a.s_star[a.s_star.len() - a.coker - 1]);
    Ok(SpectralDiagnostics {
        singular_values: s,
        rank_tol: RANK_TOL,
        dim_ker: a.ker,
        dim_coker: a.coker,
        index: a.ker as i64 - a.coker as i64,
        sigma_min_positive,
        stable: Some(stable),
    })
}
