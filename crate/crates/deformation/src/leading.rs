use crate::DeformationError;
use fourier_core::{Series, C64};
use fredholm_t::{apply_T, build_T_matrix, CokernelBasis, SymbolPair};
use nalgebra::{DMatrix, DVector};

/// Relative residual accepted for the two leading equations.
pub const SOLVER_TOL: f64 = 1e-9;

/// Largest truncation tried for `c` before giving up on the residual.
const MAX_BAND: usize = 192;

/// Samples used to form `eta` pointwise.
const SAMPLES: usize = 2048;

/// `(eta, c, k+, k-)` solving `d+ eta + c + 2h+ = k+` and `d- conj(eta) + c^aps + 2h- = k-`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationSolution {
    pub eta: Series,
    pub c: Series,
    pub k_plus: Series,
    pub k_minus: Series,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

impl DeformationSolution {
    pub fn residual(&self) -> f64 {
        self.residual_plus.max(self.residual_minus)
    }
}

fn padded(a: &Series, b: &Series) -> (Series, Series) {
    let band = a.band_limit().max(b.band_limit());
    (a.with_band(band), b.with_band(band))
}

fn add(a: &Series, b: &Series) -> Series {
    let (a, b) = padded(a, b);
    &a + &b
}

fn sub(a: &Series, b: &Series) -> Series {
    let (a, b) = padded(a, b);
    &a - &b
}

/// Least-squares solve of `T(c) + sum a_j kappa_j = J(h+, h-)` over real `a_j`.
///
/// With `J(h_j) = kappa_j` the H0 component is `k = sum 2 a_j h_j`, since
/// `T(c) = J(h - k/2)` is the consistency condition of the two leading equations.
fn solve_c(
    sym: &SymbolPair,
    rhs: &Series,
    h0: &CokernelBasis,
    band: usize,
) -> Result<(Series, Vec<f64>, f64), DeformationError> {
    let t = build_T_matrix(sym, band)?;
    let out = t.target_band();
    let n = t.matrix().ncols();
    let mut m = DMatrix::zeros(t.matrix().nrows(), n + h0.vectors.len());
    m.columns_mut(0, n).copy_from(t.matrix());
    for (j, v) in h0.vectors.iter().enumerate() {
        m.column_mut(n + j).copy_from_slice(&v.with_band(out).realify());
    }
    let b = DVector::from_vec(rhs.with_band(out).realify());
    let svd = m.clone().svd(true, true);
    let cut = 1e-12 * svd.singular_values.max();
    let x = svd.solve(&b, cut).map_err(|e| DeformationError::Frame(e.to_string()))?;
    let res = (&m * &x - &b).norm();
    let c = Series::from_real(band, &x.as_slice()[..n]).expect("finite solve");
    Ok((c, x.as_slice()[n..].to_vec(), res))
}

/// Solve the leading-order deformation equations for `(eta, c, k+-)` given `h+-`.
///
/// `c` is the minimum-norm least-squares solution (no `ker T` component) plus the optional
/// `kernel_offset`. The truncation of `c` doubles until the range equation is met to
/// `1e-12` relative or the band reaches 192. `eta` is formed by sampling and re-projected
/// to the smallest band that keeps it to `1e-14` relative.
pub fn solve_leading_correction(
    sym: &SymbolPair,
    h_plus: &Series,
    h_minus: &Series,
    h0: &CokernelBasis,
    kernel_offset: Option<&Series>,
) -> Result<DeformationSolution, DeformationError> {
    if !(sym.tau() > 0.0) {
        return Err(fredholm_t::FredholmError::Degenerate(sym.tau()).into());
    }
    let preimages: Vec<&(Series, Series)> = h0
        .preimages
        .iter()
        .enumerate()
        .map(|(j, p)| p.as_ref().ok_or(DeformationError::MissingPreimage(j)))
        .collect::<Result<_, _>>()?;

    let m = sym.band();
    let rhs = fredholm_t::apply_J(sym, h_plus, h_minus);
    let scale = h_plus.l2_norm() + h_minus.l2_norm();
    let mut band = h_plus
        .band_limit()
        .max(h_minus.band_limit())
        .max(h0.band)
        .max(2 * m + 1);
    let (mut c, a) = loop {
        let (c, a, res) = solve_c(sym, &rhs, h0, band)?;
        if m == 0 || res <= 1e-12 * rhs.norm_sqr_coeffs().sqrt() || band >= MAX_BAND {
            break (c, a);
        }
        band = (2 * band).min(MAX_BAND);
    };
    if let Some(off) = kernel_offset {
        c = add(&c, off);
    }

    let mut k_plus = Series::zeros(0);
    let mut k_minus = Series::zeros(0);
    for (aj, (hp, hm)) in a.iter().zip(&preimages) {
        k_plus = add(&k_plus, &(hp * (2.0 * aj)));
        k_minus = add(&k_minus, &(hm * (2.0 * aj)));
    }

    // eta = [conj(d+) X + d- conj(Y)] / (|d+|^2 + |d-|^2)
    let x = sub(&sub(&k_plus, &(h_plus * 2.0)), &c);
    let y = sub(&sub(&k_minus, &(h_minus * 2.0)), &c.aps());
    let n = SAMPLES;
    let (dp, dm) = (sym.d_plus().sample(n), sym.d_minus().sample(n));
    let (xs, ys) = (x.sample(n), y.sample(n));
    let vals: Vec<C64> = (0..n)
        .map(|j| (dp[j].conj() * xs[j] + dm[j] * ys[j].conj()) / (dp[j].norm_sqr() + dm[j].norm_sqr()))
        .collect();
    let full = Series::from_samples(&vals, n / 2 - 1);
    let eta = trim(&full, 1e-14);

    let rp = add(&add(&sym.d_plus().convolve(&eta), &c), &sub(&(h_plus * 2.0), &k_plus));
    let rm = add(
        &add(&sym.d_minus().convolve(&eta.conj()), &c.aps()),
        &sub(&(h_minus * 2.0), &k_minus),
    );
    let sol = DeformationSolution {
        eta,
        c,
        k_plus,
        k_minus,
        residual_plus: rp.l2_norm(),
        residual_minus: rm.l2_norm(),
    };
    let tol = SOLVER_TOL * scale.max(f64::MIN_POSITIVE);
    if sol.residual() > tol && scale > 0.0 {
        return Err(DeformationError::Residual {
            plus: sol.residual_plus,
            minus: sol.residual_minus,
        });
    }
    Ok(sol)
}

/// Coefficients below `1e-13` of the largest (the rounding level of the sampled
/// transform) are zeroed, then the smallest band keeping the discarded mass below `rel`
/// of the total.
fn trim(s: &Series, rel: f64) -> Series {
    let floor = 1e-13 * s.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let s = &Series::from_fn(s.band_limit(), |l| {
        let c = s.coeff(l);
        if c.norm() <= floor {
            C64::new(0.0, 0.0)
        } else {
            c
        }
    });
    let total = s.norm_sqr_coeffs();
    if total == 0.0 {
        return Series::zeros(0);
    }
    let lim = (rel * rel) * total;
    let mut tail = 0.0;
    let mut band = s.band_limit();
    while band > 0 {
        let l = band as i64;
        let next = tail + s.coeff(l).norm_sqr() + s.coeff(-l).norm_sqr();
        if next > lim {
            break;
        }
        tail = next;
        band -= 1;
    }
    s.with_band(band)
}

/// `T(c)` for a candidate kernel offset; zero up to round-off when `c` is in `ker T`.
pub fn kernel_defect(sym: &SymbolPair, c: &Series) -> f64 {
    apply_T(sym, c).l2_norm()
}
