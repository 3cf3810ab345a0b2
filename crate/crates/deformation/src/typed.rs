use crate::frame::PerturbationFrame;
use crate::DeformationError;
use fourier_core::{c64, Series};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// `(q+ z^a zbar^b, q- z^b zbar^a)` with half-integer `a + b = 1/2`.
///
/// Exponents are stored doubled so the type arithmetic is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct TypedLeadingTerm {
    a2: i32,
    b2: i32,
    pub coeff_plus: Series,
    pub coeff_minus: Series,
}

fn doubled(x: f64) -> Option<i32> {
    let d = 2.0 * x;
    (d.fract() == 0.0 && d.abs() < 1e6).then_some(d as i32)
}

impl TypedLeadingTerm {
    pub fn new(a: f64, b: f64, coeff_plus: Series, coeff_minus: Series) -> Result<Self, DeformationError> {
        match (doubled(a), doubled(b)) {
            (Some(a2), Some(b2)) if a2 + b2 == 1 => Ok(Self::from_doubled(a2, b2, coeff_plus, coeff_minus)),
            _ => Err(DeformationError::BadType { a, b }),
        }
    }

    fn from_doubled(a2: i32, b2: i32, coeff_plus: Series, coeff_minus: Series) -> Self {
        debug_assert_eq!(a2 + b2, 1);
        let band = coeff_plus.band_limit().max(coeff_minus.band_limit());
        Self {
            a2,
            b2,
            coeff_plus: coeff_plus.with_band(band),
            coeff_minus: coeff_minus.with_band(band),
        }
    }

    pub fn a(&self) -> f64 {
        self.a2 as f64 / 2.0
    }

    pub fn b(&self) -> f64 {
        self.b2 as f64 / 2.0
    }

    pub fn type_key(&self) -> (i32, i32) {
        (self.a2, self.b2)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff_plus.norm_sqr_coeffs() == 0.0 && self.coeff_minus.norm_sqr_coeffs() == 0.0
    }

    pub fn scale(&self, x: f64) -> Self {
        Self::from_doubled(self.a2, self.b2, &self.coeff_plus * x, &self.coeff_minus * x)
    }

    /// Squared `L^2_1(N_rho)` norm of the section this term describes.
    ///
    /// `|z^a zbar^b| = r^{1/2}`, so the value part gives `2 pi rho^3 / 3`, the `t`
    /// derivative the same weight, and `|grad (z^a zbar^b)|^2 = 2 (a^2 + b^2) / r` gives
    /// `4 pi rho (a^2 + b^2)`.
    pub fn norm12_sqr(&self, rho: f64) -> f64 {
        let tau = 2.0 * PI;
        let q = tau * (self.coeff_plus.norm_sqr_coeffs() + self.coeff_minus.norm_sqr_coeffs());
        let dq = tau
            * (self.coeff_plus.derivative().norm_sqr_coeffs() + self.coeff_minus.derivative().norm_sqr_coeffs());
        let (a, b) = (self.a(), self.b());
        (q + dq) * tau * rho.powi(3) / 3.0 + q * 2.0 * tau * rho * (a * a + b * b)
    }
}

/// Sum terms of equal type. Different types have different angular frequency `a - b`,
/// so the merged terms are orthogonal.
pub fn merge(terms: impl IntoIterator<Item = TypedLeadingTerm>) -> Vec<TypedLeadingTerm> {
    let mut map: BTreeMap<(i32, i32), TypedLeadingTerm> = BTreeMap::new();
    for t in terms {
        match map.get_mut(&t.type_key()) {
            Some(acc) => {
                let band = acc.coeff_plus.band_limit().max(t.coeff_plus.band_limit());
                acc.coeff_plus = &acc.coeff_plus.with_band(band) + &t.coeff_plus.with_band(band);
                acc.coeff_minus = &acc.coeff_minus.with_band(band) + &t.coeff_minus.with_band(band);
            }
            None => {
                map.insert(t.type_key(), t);
            }
        }
    }
    map.into_values().filter(|t| !t.is_zero()).collect()
}

/// `L^2_1(N_rho)` norm of a sum of terms.
pub fn norm12(terms: &[TypedLeadingTerm], rho: f64) -> f64 {
    merge(terms.iter().cloned()).iter().map(|t| t.norm12_sqr(rho)).sum::<f64>().sqrt()
}

/// `J(q+ z^a zbar^b, q- z^b zbar^a) = (-i eta' q+ z^b zbar^a, i conj(eta') q- z^a zbar^b)
///   + b/(a+1) (-i conj(eta') q+ z^{b-1} zbar^{a+1}, i eta' q- z^{a+1} zbar^{b-1})`.
///
/// The first output has type `(b, a)`, the second `(b - 1, a + 1)`. Outputs with zero
/// scalar factor or zero coefficients are dropped.
pub fn j_map_apply(term: &TypedLeadingTerm, eta_dot: &Series) -> Result<Vec<TypedLeadingTerm>, DeformationError> {
    if term.a2 == -2 {
        return Err(DeformationError::BadType { a: term.a(), b: term.b() });
    }
    let i = c64(0.0, 1.0);
    let ed_bar = eta_dot.conj();
    let mut out = Vec::with_capacity(2);
    let first = TypedLeadingTerm::from_doubled(
        term.b2,
        term.a2,
        eta_dot.convolve(&term.coeff_plus).scale(-i),
        ed_bar.convolve(&term.coeff_minus).scale(i),
    );
    out.push(first);
    if term.b2 != 0 {
        let f = term.b() / (term.a() + 1.0);
        out.push(TypedLeadingTerm::from_doubled(
            term.b2 - 2,
            term.a2 + 2,
            ed_bar.convolve(&term.coeff_plus).scale(-i * f),
            eta_dot.convolve(&term.coeff_minus).scale(i * f),
        ));
    }
    Ok(out.into_iter().filter(|t| !t.is_zero()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EprimeSeries {
    /// `e'` as merged typed terms.
    pub sum: Vec<TypedLeadingTerm>,
    /// `||e'_k - e'_{k-1}||_{L^2_1}` for `k = 0, 1, ...` (`k = 0` is the seed).
    pub diffs: Vec<f64>,
    /// Every type produced, in order of first appearance, as `(a, b)`.
    pub types_seen: Vec<(f64, f64)>,
    pub converged: bool,
    pub norm_12: f64,
}

impl EprimeSeries {
    /// Successive ratios `diffs[k+1] / diffs[k]`.
    pub fn ratios(&self) -> Vec<f64> {
        self.diffs.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Iterate `e'_k = s J(e'_{k-1} - e'_{k-2}) + e'_{k-1}` from a seed of type `(1/2, 0)` or
/// `(0, 1/2)`, for `max_terms` steps or until a difference vanishes.
///
/// The recursion runs on the core `N_{frak_r/T}`, where `chi = 1`, so the powers of `chi`
/// drop out. Norms are `L^2_1(N_frak_r)` proxies. A produced term of type `a = -1`
/// (where `J` is undefined) is an error. `converged` means the last difference is below
/// `1e-12` of the first.
pub fn eprime_series(
    seed: &TypedLeadingTerm,
    frame: &PerturbationFrame,
    max_terms: usize,
) -> Result<EprimeSeries, DeformationError> {
    if !matches!(seed.type_key(), (1, 0) | (0, 1)) {
        return Err(DeformationError::BadType { a: seed.a(), b: seed.b() });
    }
    let s = frame.s();
    if s > frame.s_threshold() {
        return Err(DeformationError::AboveThreshold {
            s,
            threshold: frame.s_threshold(),
        });
    }
    let rho = frame.frak_r();
    let ed = frame.eta_dot();
    let mut delta = merge([seed.clone()]);
    let mut sum = delta.clone();
    let mut diffs = vec![norm12(&delta, rho)];
    let mut types_seen = vec![(seed.a(), seed.b())];
    for step in 1..=max_terms {
        if delta.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for t in &delta {
            if t.a2 == -2 {
                return Err(DeformationError::ForbiddenType { step });
            }
            next.extend(j_map_apply(t, ed)?.into_iter().map(|u| u.scale(s)));
        }
        delta = merge(next);
        for t in &delta {
            if t.a2 == -2 {
                return Err(DeformationError::ForbiddenType { step });
            }
            if !types_seen.contains(&(t.a(), t.b())) {
                types_seen.push((t.a(), t.b()));
            }
        }
        diffs.push(norm12(&delta, rho));
        sum = merge(sum.into_iter().chain(delta.iter().cloned()));
    }
    let first = diffs[0];
    let last = *diffs.last().expect("seed entry");
    let converged = delta.is_empty() || last <= 1e-12 * first;
    if !converged && diffs.windows(2).any(|w| w[1] > w[0]) && last > first {
        return Err(DeformationError::NotConverged(last / first));
    }
    let norm_12 = norm12(&sum, rho);
    Ok(EprimeSeries {
        sum,
        diffs,
        types_seen,
        converged,
        norm_12,
    })
}
