use crate::symbol::{apply_T, apply_T_star, SymbolPair};
use crate::FredholmError;
use fourier_core::{c64, Series};
use nalgebra::{DMatrix, DVector};

/// Real matrix of a real-linear map from band `source_band` to band `target_band`,
/// acting on realified coefficient vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct RealLinearOperator {
    source_band: usize,
    target_band: usize,
    matrix: DMatrix<f64>,
}

impl RealLinearOperator {
    pub fn new(source_band: usize, target_band: usize, matrix: DMatrix<f64>) -> Self {
        assert_eq!(matrix.nrows(), Series::real_dim(target_band));
        assert_eq!(matrix.ncols(), Series::real_dim(source_band));
        assert!(matrix.iter().all(|x| x.is_finite()), "non-finite matrix entry");
        Self {
            source_band,
            target_band,
            matrix,
        }
    }

    pub fn source_band(&self) -> usize {
        self.source_band
    }

    pub fn target_band(&self) -> usize {
        self.target_band
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, c: &Series) -> Series {
        let x = DVector::from_vec(c.with_band(self.source_band).realify());
        let y = &self.matrix * x;
        Series::from_real(self.target_band, y.as_slice()).expect("finite by construction")
    }

    /// Adjoint map (band `target_band` to band `source_band`).
    pub fn transpose(&self) -> Self {
        Self::new(self.target_band, self.source_band, self.matrix.transpose())
    }

    /// Rows restricted to modes `|l| <= band`.
    pub fn restrict_target(&self, band: usize) -> Self {
        assert!(band <= self.target_band);
        let skip = 2 * (self.target_band - band);
        let rows = Series::real_dim(band);
        Self::new(self.source_band, band, self.matrix.rows(skip, rows).into_owned())
    }
}

/// Unit basis of realified band-`band` series: `e^{ilt}` then `i e^{ilt}` per mode.
pub fn basis(band: usize) -> impl Iterator<Item = Series> {
    let lb = band as i64;
    (-lb..=lb).flat_map(move |l| {
        [c64(1.0, 0.0), c64(0.0, 1.0)]
            .into_iter()
            .map(move |z| Series::monomial(l, z).with_band(band))
    })
}

/// Matrix of an arbitrary real-linear map, column by column.
pub fn build_matrix(
    source_band: usize,
    target_band: usize,
    f: impl Fn(&Series) -> Series,
) -> RealLinearOperator {
    let cols: Vec<Vec<f64>> = basis(source_band)
        .map(|e| f(&e).with_band(target_band).realify())
        .collect();
    let rows = Series::real_dim(target_band);
    let m = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    RealLinearOperator::new(source_band, target_band, m)
}

/// `T` from band `L` to band `L + M`. Requires `L >= 2M + 1`.
#[allow(non_snake_case)]
pub fn build_T_matrix(sym: &SymbolPair, band: usize) -> Result<RealLinearOperator, FredholmError> {
    let need = 2 * sym.band() + 1;
    if band < need {
        return Err(FredholmError::BandTooSmall { band, need });
    }
    Ok(build_matrix(band, band + sym.band(), |c| apply_T(sym, c)))
}

/// `T*` from band `L` to band `L + M`, as the transpose of `T` (band `L+M` to band `L`).
#[allow(non_snake_case)]
pub fn build_T_star_matrix(sym: &SymbolPair, band: usize) -> Result<RealLinearOperator, FredholmError> {
    let m = sym.band();
    let t = build_T_matrix(sym, band + m)?;
    Ok(t.restrict_target(band).transpose())
}

/// Direct column-wise `T*` matrix, used to cross-check the transpose construction.
#[allow(non_snake_case)]
pub fn build_T_star_direct(sym: &SymbolPair, band: usize) -> RealLinearOperator {
    build_matrix(band, band + sym.band(), |k| apply_T_star(sym, k))
}
