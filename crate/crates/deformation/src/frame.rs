use crate::{DeformationError, Mat3};
use fourier_core::{c64, Series, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial cutoff: 1 on `r <= inner`, 0 on `r >= outer`, quintic smoothstep between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Self {
        assert!(0.0 < inner && inner < outer, "cutoff needs 0 < inner < outer");
        Self { inner, outer }
    }

    fn x(&self, r: f64) -> Option<f64> {
        if r <= self.inner {
            None
        } else if r >= self.outer {
            None
        } else {
            Some((r - self.inner) / (self.outer - self.inner))
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.inner {
            return 1.0;
        }
        match self.x(r) {
            Some(x) => 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x),
            None => 0.0,
        }
    }

    /// `d chi / dr`.
    pub fn d1(&self, r: f64) -> f64 {
        let w = self.outer - self.inner;
        self.x(r).map_or(0.0, |x| -30.0 * x * x * (1.0 - x) * (1.0 - x) / w)
    }

    /// `d^2 chi / dr^2`.
    pub fn d2(&self, r: f64) -> f64 {
        let w = self.outer - self.inner;
        self.x(r)
            .map_or(0.0, |x| -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x) / (w * w))
    }

    /// `sup |chi'| = 15 / (8 w)`.
    pub fn d1_sup(&self) -> f64 {
        15.0 / (8.0 * (self.outer - self.inner))
    }

    /// `(chi, chi_z, chi_zbar)` at `z = r e^{i theta}`.
    pub fn complex_derivs(&self, r: f64, theta: f64) -> (f64, C64, C64) {
        let d = self.d1(r) / 2.0;
        (self.value(r), C64::from_polar(d, -theta), C64::from_polar(d, theta))
    }
}

/// Composite Gauss-Legendre (5 nodes) of `f` over `[a, b]` split into `pieces`.
pub(crate) fn gauss(a: f64, b: f64, pieces: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / pieces as f64;
    let mut s = 0.0;
    for p in 0..pieces {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * s
}

/// Frame of a small deformation `z -> z + s chi(r) eta(t)` of the curve inside `N_frak_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationFrame {
    frak_r: f64,
    t_ratio: f64,
    p: f64,
    s: f64,
    kappa0: f64,
    kappa1: f64,
    eta: Series,
    eta_dot: Series,
    cutoff: Cutoff,
}

#[derive(Serialize, Deserialize)]
struct FrameJson {
    frak_r: f64,
    #[serde(rename = "T")]
    t_ratio: f64,
    #[serde(rename = "P")]
    p: f64,
    s: f64,
    kappa0: f64,
    kappa1: f64,
    eta: serde_json::Value,
}

impl PerturbationFrame {
    /// Checked constructor: `frak_r <= R/4`, `T > 1`, the three scaled bounds on `eta`
    /// against `kappa0`, `kappa1 >= required_kappa1()` and `0 <= s <= s_threshold()`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        big_r: f64,
        frak_r: f64,
        t_ratio: f64,
        p: f64,
        s: f64,
        kappa0: f64,
        kappa1: f64,
        eta: Series,
    ) -> Result<Self, DeformationError> {
        let bad = |m: String| Err(DeformationError::Frame(m));
        if !(frak_r > 0.0 && frak_r <= big_r / 4.0) {
            return bad(format!("frak_r = {frak_r} must lie in (0, R/4] with R = {big_r}"));
        }
        if !(t_ratio > 1.0) {
            return bad(format!("T = {t_ratio} must exceed 1"));
        }
        if !(kappa0 > 0.0 && kappa1 > 0.0) {
            return bad("kappa0 and kappa1 must be positive".into());
        }
        let f = Self::unchecked(frak_r, t_ratio, p, s, kappa0, kappa1, eta);
        let (n0, n1, n2) = (f.eta.l2_norm(), f.eta_dot.l2_norm(), f.eta_dot.derivative().l2_norm());
        let tol = 1.0 + 1e-12;
        if n0 > kappa0 * frak_r * frak_r * tol {
            return bad(format!("||eta|| = {n0:e} exceeds kappa0 frak_r^2"));
        }
        if n1 > kappa0 * frak_r * tol {
            return bad(format!("||eta_t|| = {n1:e} exceeds kappa0 frak_r"));
        }
        if n2 > kappa0 * tol {
            return bad(format!("||eta_tt|| = {n2:e} exceeds kappa0"));
        }
        let need = f.required_kappa1();
        if kappa1 < need / tol {
            return bad(format!("kappa1 = {kappa1} below the required {need}"));
        }
        if !(s >= 0.0) || s > f.s_threshold() {
            return Err(DeformationError::AboveThreshold {
                s,
                threshold: f.s_threshold(),
            });
        }
        Ok(f)
    }

    /// No checks; used for rescaled stage frames inside the iteration.
    pub fn unchecked(
        frak_r: f64,
        t_ratio: f64,
        p: f64,
        s: f64,
        kappa0: f64,
        kappa1: f64,
        eta: Series,
    ) -> Self {
        let eta_dot = eta.derivative();
        Self {
            frak_r,
            t_ratio,
            p,
            s,
            kappa0,
            kappa1,
            eta,
            eta_dot,
            cutoff: Cutoff::new(frak_r / t_ratio, frak_r),
        }
    }

    pub fn with_s(&self, s: f64) -> Self {
        Self { s, ..self.clone() }
    }

    pub fn with_kappa1(&self, kappa1: f64) -> Self {
        Self { kappa1, ..self.clone() }
    }

    pub fn frak_r(&self) -> f64 {
        self.frak_r
    }

    pub fn t_ratio(&self) -> f64 {
        self.t_ratio
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn eta(&self) -> &Series {
        &self.eta
    }

    pub fn eta_dot(&self) -> &Series {
        &self.eta_dot
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    /// `gamma_T = T / (T - 1)`.
    pub fn gamma(&self) -> f64 {
        self.t_ratio / (self.t_ratio - 1.0)
    }

    /// `1 / (2 gamma_T^2 kappa1 frak_r^{1/2})`.
    pub fn s_threshold(&self) -> f64 {
        1.0 / (2.0 * self.gamma().powi(2) * self.kappa1 * self.frak_r.sqrt())
    }

    /// Smallest `kappa1` meeting the three cutoff/eta bounds:
    /// `max(|chi_z||eta|, |eta_t|) <= gamma kappa1 frak_r^{1/2}`,
    /// `||chi_z eta_t|| <= gamma kappa1` and `||chi_zz eta|| <= gamma^2 kappa1`,
    /// with `L^2` norms over `N_frak_r`.
    pub fn required_kappa1(&self) -> f64 {
        let g = self.gamma();
        let sup = |s: &Series| s.sample(512).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (eta_sup, dot_sup) = (sup(&self.eta), sup(&self.eta_dot));
        let c = self.cutoff;
        let pointwise = (c.d1_sup() / 2.0 * eta_sup).max(dot_sup) / (g * self.frak_r.sqrt());
        // |chi_z| = |chi'|/2, |chi_zz| = |chi'' - chi'/r| / 4
        let i1 = gauss(c.inner, c.outer, 64, |r| (c.d1(r) / 2.0).powi(2) * r);
        let i2 = gauss(c.inner, c.outer, 64, |r| ((c.d2(r) - c.d1(r) / r) / 4.0).powi(2) * r);
        let n1 = self.eta_dot.l2_norm() * (2.0 * PI * i1).sqrt() / g;
        let n2 = self.eta.l2_norm() * (2.0 * PI * i2).sqrt() / (g * g);
        pointwise.max(n1).max(n2)
    }

    /// `kappa1` as derived from `kappa0` alone: the three requirements of
    /// [`required_kappa1`](Self::required_kappa1) with `eta` replaced by its worst case
    /// under the frame bounds, using `|f|^2 <= ||f||^2 / (2 pi) + 2 ||f|| ||f_t||` for the
    /// sup norms.
    pub fn kappa1_from_kappa0(frak_r: f64, t_ratio: f64, kappa0: f64) -> f64 {
        let g = t_ratio / (t_ratio - 1.0);
        let c = Cutoff::new(frak_r / t_ratio, frak_r);
        let sup = |a: f64, b: f64| (a * a / (2.0 * PI) + 2.0 * a * b).sqrt();
        let eta_sup = sup(kappa0 * frak_r * frak_r, kappa0 * frak_r);
        let dot_sup = sup(kappa0 * frak_r, kappa0);
        let pointwise = (c.d1_sup() / 2.0 * eta_sup).max(dot_sup) / (g * frak_r.sqrt());
        let i1 = gauss(c.inner, c.outer, 64, |r| (c.d1(r) / 2.0).powi(2) * r);
        let i2 = gauss(c.inner, c.outer, 64, |r| ((c.d2(r) - c.d1(r) / r) / 4.0).powi(2) * r);
        let n1 = kappa0 * frak_r * (2.0 * PI * i1).sqrt() / g;
        let n2 = kappa0 * frak_r * frak_r * (2.0 * PI * i2).sqrt() / (g * g);
        pointwise.max(n1).max(n2)
    }

    /// `chi_z eta + chi_zbar conj(eta)`, which is real.
    pub fn x_field(&self, r: f64, theta: f64, t: f64) -> f64 {
        let (_, cz, _) = self.cutoff.complex_derivs(r, theta);
        2.0 * (cz * self.eta.eval(t)).re
    }

    /// `varrho = 1 / (1 + s X) - 1`.
    pub fn varrho(&self, r: f64, theta: f64, t: f64) -> Result<f64, DeformationError> {
        let den = 1.0 + self.s * self.x_field(r, theta, t);
        if den.abs() < 0.5 {
            return Err(DeformationError::PerturbationTooLarge(den.abs()));
        }
        Ok(1.0 / den - 1.0)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(FrameJson {
            frak_r: self.frak_r,
            t_ratio: self.t_ratio,
            p: self.p,
            s: self.s,
            kappa0: self.kappa0,
            kappa1: self.kappa1,
            eta: self.eta.to_json_value(),
        })
        .expect("plain data")
    }

    /// Parse the frame JSON and run the checked constructor with tube radius `big_r`.
    pub fn from_json_value(v: &serde_json::Value, big_r: f64) -> Result<Self, DeformationError> {
        let j: FrameJson =
            serde_json::from_value(v.clone()).map_err(|e| DeformationError::Frame(e.to_string()))?;
        let eta = Series::from_json_value(&j.eta).map_err(|e| DeformationError::Frame(e.to_string()))?;
        Self::new(big_r, j.frak_r, j.t_ratio, j.p, j.s, j.kappa0, j.kappa1, eta)
    }
}

/// The pieces `M = (N0 + s N1 + s^2 N2) / (1 + s X)` at one point.
pub(crate) struct MParts {
    pub(crate) x: f64,
    pub(crate) n1: Mat3,
    pub(crate) n2: Mat3,
}

pub(crate) fn m_parts(frame: &PerturbationFrame, r: f64, theta: f64, t: f64) -> MParts {
    let (chi, cz, czb) = frame.cutoff.complex_derivs(r, theta);
    let eta = frame.eta.eval(t);
    let ed = frame.eta_dot.eval(t);
    let x = 2.0 * (cz * eta).re;
    let z = c64(0.0, 0.0);
    let n1 = [
        [c64(x, 0.0), z, z],
        [-ed * chi, czb * eta.conj(), -czb * eta],
        [-ed.conj() * chi, -cz * eta.conj(), cz * eta],
    ];
    let n2 = [
        [z, z, z],
        [-czb * chi * (ed * eta.conj() - ed.conj() * eta), z, z],
        [-cz * chi * (eta * ed.conj() - ed * eta.conj()), z, z],
    ];
    MParts { x, n1, n2 }
}

fn check_point(r: f64, theta: f64, t: f64) -> Result<(), DeformationError> {
    if !(r >= 0.0 && r.is_finite() && theta.is_finite() && t.is_finite()) {
        return Err(DeformationError::Frame(format!("bad point ({r}, {theta}, {t})")));
    }
    Ok(())
}

/// The 3x3 matrix `M` relating the pulled-back `(d_tau, d_u, d_ubar)` to `(d_t, d_z, d_zbar)`.
///
/// Rows, before the common factor `1 / (1 + s(chi_z eta + chi_zbar conj(eta)))`:
/// `[1 + sX, 0, 0]`,
/// `[-s chi eta' - s^2 chi chi_zbar (eta' conj(eta) - conj(eta') eta), 1 + s chi_zbar conj(eta), -s chi_zbar eta]`,
/// `[-s chi conj(eta') - s^2 chi chi_z (eta conj(eta') - eta' conj(eta)), -s chi_z conj(eta), 1 + s chi_z eta]`.
#[allow(non_snake_case)]
pub fn pullback_matrix_M(frame: &PerturbationFrame, point: (f64, f64, f64)) -> Result<Mat3, DeformationError> {
    let (r, theta, t) = point;
    check_point(r, theta, t)?;
    let s = frame.s;
    let p = m_parts(frame, r, theta, t);
    let den = 1.0 + s * p.x;
    if den.abs() < 0.5 {
        return Err(DeformationError::PerturbationTooLarge(den.abs()));
    }
    let mut m = [[c64(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            m[i][j] = (p.n1[i][j] * s + p.n2[i][j] * (s * s) + id) / den;
        }
    }
    Ok(m)
}

/// Exact `dM/ds` of [`pullback_matrix_M`].
#[allow(non_snake_case)]
pub fn pullback_matrix_M_ds(frame: &PerturbationFrame, point: (f64, f64, f64)) -> Result<Mat3, DeformationError> {
    let (r, theta, t) = point;
    check_point(r, theta, t)?;
    let s = frame.s;
    let p = m_parts(frame, r, theta, t);
    let den = 1.0 + s * p.x;
    if den.abs() < 0.5 {
        return Err(DeformationError::PerturbationTooLarge(den.abs()));
    }
    let mut m = [[c64(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            let n = p.n1[i][j] * s + p.n2[i][j] * (s * s) + id;
            let dn = p.n1[i][j] + p.n2[i][j] * (2.0 * s);
            m[i][j] = dn / den - n * (p.x / (den * den));
        }
    }
    Ok(m)
}
