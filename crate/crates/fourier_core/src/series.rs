use crate::scalar::{sign, Real};
use crate::FourierError;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Band-limited series `sum_{|l| <= L} g_l e^{ilt}` with dense storage.
///
/// Queries outside `[-L, L]` return zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFourierSeries<T: Real> {
    band_limit: usize,
    coeffs: Vec<Complex<T>>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson<T> {
    band_limit: usize,
    coeffs: Vec<[T; 2]>,
}

impl<T: Real> TruncatedFourierSeries<T> {
    pub fn new(band_limit: usize, coeffs: Vec<Complex<T>>) -> Result<Self, FourierError> {
        if coeffs.len() != 2 * band_limit + 1 {
            return Err(FourierError::Length {
                band_limit,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(FourierError::NonFinite);
        }
        Ok(Self { band_limit, coeffs })
    }

    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            coeffs: vec![Complex::new(T::zero(), T::zero()); 2 * band_limit + 1],
        }
    }

    pub fn from_fn(band_limit: usize, mut f: impl FnMut(i64) -> Complex<T>) -> Self {
        let l = band_limit as i64;
        Self {
            band_limit,
            coeffs: (-l..=l).map(&mut f).collect(),
        }
    }

    /// `c e^{ilt}`, with the smallest band that holds it.
    pub fn monomial(l: i64, c: Complex<T>) -> Self {
        Self::from_fn(l.unsigned_abs() as usize, |n| {
            if n == l {
                c
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::monomial(0, c)
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, l: i64) -> Complex<T> {
        let lim = self.band_limit as i64;
        if l.abs() > lim {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[(l + lim) as usize]
        }
    }

    /// Modes present in storage, `-L..=L`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        let lim = self.band_limit as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(j, c)| (j as i64 - lim, *c))
    }

    /// Zero-pad or truncate to a new band limit.
    pub fn with_band(&self, band_limit: usize) -> Self {
        Self::from_fn(band_limit, |l| self.coeff(l))
    }

    /// Smallest band limit holding every coefficient above `tol` in modulus.
    pub fn effective_band(&self, tol: T) -> usize {
        self.modes()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(l, _)| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn norm_sqr_coeffs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, c| s + c.norm_sqr())
    }

    /// L^2(S^1) norm, `sqrt(2 pi sum |g_l|^2)`.
    pub fn l2_norm(&self) -> T {
        (T::TAU() * self.norm_sqr_coeffs()).sqrt()
    }

    /// `2 pi Re sum f_l conj(g_l)`.
    pub fn real_inner(&self, other: &Self) -> T {
        let lim = self.band_limit.min(other.band_limit) as i64;
        let s = (-lim..=lim).fold(T::zero(), |s, l| {
            s + (self.coeff(l) * other.coeff(l).conj()).re
        });
        T::TAU() * s
    }

    /// `g_l -> sign(l) g_l`, sign(0) = 0.
    pub fn aps(&self) -> Self {
        self.aps_with_zero(T::zero())
    }

    /// aps with an explicit value for sign(0).
    pub fn aps_with_zero(&self, sign0: T) -> Self {
        Self::from_fn(self.band_limit, |l| {
            let s = if l == 0 { sign0 } else { T::from_int(sign(l)) };
            self.coeff(l) * s
        })
    }

    /// Pointwise conjugate: coefficient n becomes conj(g_{-n}).
    pub fn conj(&self) -> Self {
        Self::from_fn(self.band_limit, |l| self.coeff(-l).conj())
    }

    /// Coefficient n of the result is `sum_j f_j g_{n-j}`; band `L_f + L_g`.
    pub fn convolve(&self, other: &Self) -> Self {
        let lf = self.band_limit as i64;
        let lg = other.band_limit as i64;
        let mut out = Self::zeros(self.band_limit + other.band_limit);
        let lo = lf + lg;
        for (j, f) in self.modes() {
            if f.re == T::zero() && f.im == T::zero() {
                continue;
            }
            for m in -lg..=lg {
                let g = other.coeff(m);
                out.coeffs[(j + m + lo) as usize] = out.coeffs[(j + m + lo) as usize] + f * g;
            }
        }
        out
    }

    /// `P_k g`, keeping modes `|n| <= k`; band limit is preserved.
    pub fn project_band(&self, k: usize) -> Self {
        Self::from_fn(self.band_limit, |l| {
            if l.unsigned_abs() as usize <= k {
                self.coeff(l)
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// `(I - P_k) g`.
    pub fn project_high(&self, k: usize) -> Self {
        self - &self.project_band(k)
    }

    pub fn derivative(&self) -> Self {
        Self::from_fn(self.band_limit, |l| {
            self.coeff(l) * Complex::new(T::zero(), T::from_int(l))
        })
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        Self::from_fn(self.band_limit, |l| self.coeff(l) * a)
    }

    pub fn eval(&self, t: T) -> Complex<T> {
        self.modes().fold(Complex::new(T::zero(), T::zero()), |s, (l, c)| {
            s + c * Complex::from_polar(T::one(), T::from_int(l) * t)
        })
    }

    /// Values at `t_j = 2 pi j / n`.
    pub fn sample(&self, n: usize) -> Vec<Complex<T>> {
        (0..n)
            .map(|j| self.eval(T::TAU() * T::from_int(j as i64) / T::from_int(n as i64)))
            .collect()
    }

    /// Project uniform samples onto modes `|l| <= band_limit` (trapezoid rule).
    pub fn from_samples(samples: &[Complex<T>], band_limit: usize) -> Self {
        let n = samples.len();
        let nf = T::from_int(n as i64);
        Self::from_fn(band_limit, |l| {
            let s = samples.iter().enumerate().fold(
                Complex::new(T::zero(), T::zero()),
                |s, (j, v)| {
                    let t = T::TAU() * T::from_int(j as i64) / nf;
                    s + *v * Complex::from_polar(T::one(), -T::from_int(l) * t)
                },
            );
            s / nf
        })
    }

    /// Real coordinates, ordered `l = -L..L` with `(re, im)` per mode.
    pub fn realify(&self) -> Vec<T> {
        self.coeffs.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real(band_limit: usize, v: &[T]) -> Result<Self, FourierError> {
        if v.len() != 2 * (2 * band_limit + 1) {
            return Err(FourierError::Length {
                band_limit,
                got: v.len() / 2,
            });
        }
        Self::new(
            band_limit,
            v.chunks(2).map(|p| Complex::new(p[0], p[1])).collect(),
        )
    }

    pub fn real_dim(band_limit: usize) -> usize {
        2 * (2 * band_limit + 1)
    }
}

impl<T: Real + Serialize> TruncatedFourierSeries<T> {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SeriesJson {
            band_limit: self.band_limit,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        })
        .expect("series serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }
}

impl<T: Real + for<'de> Deserialize<'de>> TruncatedFourierSeries<T> {
    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, FourierError> {
        let raw: SeriesJson<T> = serde_json::from_value(v.clone())?;
        Self::new(
            raw.band_limit,
            raw.coeffs.into_iter().map(|[re, im]| Complex::new(re, im)).collect(),
        )
    }

    pub fn from_json(s: &str) -> Result<Self, FourierError> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        Self::from_json_value(&v)
    }
}

impl<T: Real> Add for &TruncatedFourierSeries<T> {
    type Output = TruncatedFourierSeries<T>;
    fn add(self, rhs: Self) -> Self::Output {
        let b = self.band_limit.max(rhs.band_limit);
        TruncatedFourierSeries::from_fn(b, |l| self.coeff(l) + rhs.coeff(l))
    }
}

impl<T: Real> Sub for &TruncatedFourierSeries<T> {
    type Output = TruncatedFourierSeries<T>;
    fn sub(self, rhs: Self) -> Self::Output {
        let b = self.band_limit.max(rhs.band_limit);
        TruncatedFourierSeries::from_fn(b, |l| self.coeff(l) - rhs.coeff(l))
    }
}

impl<T: Real> Neg for &TruncatedFourierSeries<T> {
    type Output = TruncatedFourierSeries<T>;
    fn neg(self) -> Self::Output {
        TruncatedFourierSeries::from_fn(self.band_limit, |l| -self.coeff(l))
    }
}

impl<T: Real> Mul<T> for &TruncatedFourierSeries<T> {
    type Output = TruncatedFourierSeries<T>;
    fn mul(self, a: T) -> Self::Output {
        TruncatedFourierSeries::from_fn(self.band_limit, |l| self.coeff(l) * a)
    }
}
