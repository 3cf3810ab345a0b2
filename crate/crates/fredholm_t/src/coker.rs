use crate::diagnostics::{t_diagnostics, RANK_TOL};
use crate::operator::{build_T_matrix, build_T_star_matrix, build_matrix};
use crate::symbol::{apply_J, SymbolPair};
use crate::FredholmError;
use fourier_core::Series;
use nalgebra::{DMatrix, DVector};

/// Model of `H_0`: a basis of the complement of `range(T)` and `J`-preimages.
#[derive(Clone, Debug, PartialEq)]
pub struct CokernelBasis {
    pub band: usize,
    /// Orthonormal (for the realified coefficients) basis of `ker T*` at band `L`.
    pub vectors: Vec<Series>,
    /// `(h+, h-)` with `J(h+, h-) = k`, when the least-squares solve is exact to `1e-9`.
    pub preimages: Vec<Option<(Series, Series)>>,
    /// `rank([T_L | basis]) - rank(T_L)`; equals `vectors.len()` when the basis completes the range.
    pub rank_gain: usize,
}

fn rank(m: &DMatrix<f64>) -> usize {
    let s = m.clone().svd(false, false).singular_values;
    let max = s.max();
    s.iter().filter(|&&x| x > RANK_TOL * max).count()
}

/// Solve `J(h+, h-) = k` over bands `L` for `h+` and `h-` (minimum-norm least squares).
#[allow(non_snake_case)]
fn j_preimage(sym: &SymbolPair, k: &Series) -> Option<(Series, Series)> {
    let band = k.band_limit();
    let out = band + sym.band();
    let n = Series::real_dim(band);
    let jp = build_matrix(band, out, |h| apply_J(sym, h, &Series::zeros(band)));
    let jm = build_matrix(band, out, |h| apply_J(sym, &Series::zeros(band), h));
    let mut m = DMatrix::zeros(Series::real_dim(out), 2 * n);
    m.columns_mut(0, n).copy_from(jp.matrix());
    m.columns_mut(n, n).copy_from(jm.matrix());
    let rhs = DVector::from_vec(k.with_band(out).realify());
    let x = m.clone().svd(true, true).solve(&rhs, 1e-13).ok()?;
    let hp = Series::from_real(band, &x.as_slice()[..n]).ok()?;
    let hm = Series::from_real(band, &x.as_slice()[n..]).ok()?;
    let back = apply_J(sym, &hp, &hm);
    let err = (&back - &k.with_band(back.band_limit())).norm_sqr_coeffs().sqrt();
    (err <= 1e-9 * k.norm_sqr_coeffs().sqrt()).then_some((hp, hm))
}

/// Basis of the complement of `range(T)` at band `L` (right singular vectors of `T*_L` with
/// `sigma ~ 0`), their `J`-preimages and the rank check.
pub fn cokernel_complement(sym: &SymbolPair, band: usize) -> Result<CokernelBasis, FredholmError> {
    let diag = t_diagnostics(sym, band)?;
    if diag.stable != Some(true) {
        return Err(FredholmError::Unstable);
    }
    let ts = build_T_star_matrix(sym, band)?;
    let svd = ts.matrix().clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let vectors: Vec<Series> = order[..diag.dim_coker]
        .iter()
        .map(|&i| Series::from_real(band, vt.row(i).transpose().as_slice()).expect("finite"))
        .collect();
    let preimages = vectors.iter().map(|k| j_preimage(sym, k)).collect();

    let t = build_T_matrix(sym, band)?;
    let base = rank(t.matrix());
    let mut aug = DMatrix::zeros(t.matrix().nrows(), t.matrix().ncols() + vectors.len());
    aug.columns_mut(0, t.matrix().ncols()).copy_from(t.matrix());
    for (j, v) in vectors.iter().enumerate() {
        let col = v.with_band(t.target_band()).realify();
        aug.column_mut(t.matrix().ncols() + j).copy_from_slice(&col);
    }
    let rank_gain = rank(&aug) - base;
    Ok(CokernelBasis {
        band,
        vectors,
        preimages,
        rank_gain,
    })
}
