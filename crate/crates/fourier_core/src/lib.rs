//! Band-limited Fourier series on the circle, treated as a real vector space.
//!
//! The scalar is generic (`f32` or `f64`); the aliases at the crate root fix
//! it to `f64`, which is what the rest of the workspace uses.
//!
//! `aps` uses sign(0) = 0 throughout. See [`TruncatedFourierSeries::aps_with_zero`]
//! for the other convention.

mod pair;
mod scalar;
mod series;

pub use num_complex::Complex;
pub use pair::{double_bracket, ComplexPair, IndexedPairs, PairTuple};
pub use scalar::{sign, Real};
pub use series::TruncatedFourierSeries;

pub type C64 = Complex<f64>;
pub type Series = TruncatedFourierSeries<f64>;
pub type Pair = ComplexPair<f64>;
pub type Tuple = PairTuple<f64>;
pub type Series32 = TruncatedFourierSeries<f32>;

#[derive(Debug, thiserror::Error)]
pub enum FourierError {
    #[error("band limit {band_limit} needs {} coefficients, got {got}", 2 * band_limit + 1)]
    Length { band_limit: usize, got: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn s(l: usize, v: &[(f64, f64)]) -> Series {
        Series::new(l, v.iter().map(|&(a, b)| c64(a, b)).collect()).unwrap()
    }

    #[test]
    fn aps_examples() {
        let e1 = Series::monomial(1, c64(1.0, 0.0));
        assert_eq!(e1.aps(), e1);
        assert_eq!(Series::constant(c64(1.0, 0.0)).aps().norm_sqr_coeffs(), 0.0);
        let cos2 = s(1, &[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(cos2.aps(), s(1, &[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]));
    }

    #[test]
    fn convolve_examples() {
        let e1 = Series::monomial(1, c64(1.0, 0.0));
        let prod = e1.convolve(&e1);
        assert_eq!(prod.band_limit(), 2);
        assert_eq!(prod.coeff(2), c64(1.0, 0.0));
        assert_eq!(prod.norm_sqr_coeffs(), 1.0);

        let g = s(2, &[(1.0, 2.0), (0.0, -1.0), (3.0, 0.0), (0.5, 0.5), (-2.0, 1.0)]);
        let one = Series::constant(c64(1.0, 0.0));
        assert_eq!(one.convolve(&g), g);

        // (e^{it} + e^{-it}) e^{it} = e^{2it} + 1
        let cos2 = s(1, &[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let p = cos2.convolve(&e1);
        assert_eq!(p.coeff(2), c64(1.0, 0.0));
        assert_eq!(p.coeff(0), c64(1.0, 0.0));
        assert_eq!(p.norm_sqr_coeffs(), 2.0);
    }

    #[test]
    fn projection_examples() {
        let g = s(1, &[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0)]);
        let p0 = g.project_band(0);
        assert_eq!(p0.coeff(0), c64(2.0, 0.0));
        assert_eq!(p0.coeff(1), c64(0.0, 0.0));
        assert_eq!(g.project_band(5), g);
        assert_eq!(g.project_high(2).norm_sqr_coeffs(), 0.0);
    }

    #[test]
    fn real_inner_examples() {
        let e1 = Series::monomial(1, c64(1.0, 0.0));
        assert!((e1.real_inner(&e1) - TAU).abs() < 1e-15);
        let g = s(1, &[(0.3, 1.0), (2.0, -0.5), (1.0, 4.0)]);
        assert!(g.scale(c64(0.0, 1.0)).real_inner(&g).abs() < 1e-14);
        assert_eq!(e1.real_inner(&Series::monomial(-1, c64(1.0, 0.0))), 0.0);
    }

    #[test]
    fn double_bracket_examples() {
        let mut u = IndexedPairs::new();
        let mut w = IndexedPairs::new();
        u.insert(0, Pair::new(c64(1.0, 0.0), c64(0.0, 0.0)));
        w.insert(0, Pair::new(c64(1.0, 0.0), c64(0.0, 0.0)));
        assert_eq!(double_bracket(&u, &w, 0), c64(1.0, 0.0));
        assert_eq!(double_bracket(&u, &w, 3), c64(0.0, 0.0));

        let mut u = IndexedPairs::new();
        let mut w = IndexedPairs::new();
        u.insert(0, Pair::new(c64(1.0, 0.0), c64(2.0, 0.0)));
        w.insert(1, Pair::new(c64(3.0, 0.0), c64(4.0, 0.0)));
        assert_eq!(double_bracket(&u, &w, 1), c64(11.0, 0.0));
    }

    #[test]
    fn spouse_examples() {
        let a = Pair::new(c64(1.0, 0.0), c64(0.0, 2.0));
        assert_eq!(a.spouse(), Pair::new(c64(0.0, -2.0), c64(-1.0, 0.0)));
        let b = Pair::new(c64(3.0, 0.0), c64(4.0, 1.0));
        assert_eq!(b.spouse().spouse(), -b);

        let t = Tuple::new(vec![
            Pair::new(c64(1.0, 0.0), c64(0.0, 0.0)),
            Pair::new(c64(0.0, 0.0), c64(1.0, 0.0)),
        ])
        .unwrap();
        let expect = Tuple::new(vec![
            Pair::new(c64(1.0, 0.0), c64(0.0, 0.0)),
            Pair::new(c64(0.0, 0.0), c64(-1.0, 0.0)),
        ])
        .unwrap();
        assert_eq!(t.spouse(), expect);
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let g = s(1, &[(0.1, 1.0 / 3.0), (std::f64::consts::PI, -0.0), (1e-300, 7.25e17)]);
        let back = Series::from_json(&g.to_json()).unwrap();
        for (a, b) in g.coeffs().iter().zip(back.coeffs()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_length() {
        assert!(Series::new(2, vec![c64(0.0, 0.0); 4]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let g = Series32::monomial(2, Complex::new(1.0f32, 0.0));
        assert!((g.real_inner(&g) - std::f32::consts::TAU).abs() < 1e-5);
        assert_eq!(g.aps().aps(), g);
    }
}
