use crate::frame::{m_parts, PerturbationFrame};
use crate::{DeformationError, Mat3};
use fourier_core::{c64, C64};
use std::f64::consts::TAU;

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn e(i: usize) -> Mat2 {
    match i {
        0 => [[c64(0.0, -1.0), ZERO], [ZERO, c64(0.0, 1.0)]],
        1 => [[ZERO, ZERO], [c64(-1.0, 0.0), ZERO]],
        _ => [[ZERO, c64(1.0, 0.0)], [ZERO, ZERO]],
    }
}

fn axpy(acc: &mut Mat2, a: C64, m: &Mat2) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += a * m[i][j];
        }
    }
}

fn frob2(m: &Mat2) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// Largest singular value of a 2x2 complex matrix.
pub fn op_norm(m: &Mat2) -> f64 {
    let f = frob2(m);
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    ((f + (f * f - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
}

/// Clifford coefficient fields of a first-order operator read off a `M`-type matrix:
/// the coefficient of `d_j` (`j` = t, z, zbar) is `sum_i e_i m[j][i]`.
fn fields(m: &Mat3) -> [Mat2; 3] {
    let mut out = [[[ZERO; 2]; 2]; 3];
    for (j, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            axpy(o, m[j][i], &e(i));
        }
    }
    out
}

/// Second-order remainder `M(s) - I - s M'(0) = s^2 (N2 - X N1 + X^2 I) / (1 + sX)`.
fn remainder(frame: &PerturbationFrame, r: f64, theta: f64, t: f64) -> Result<Mat3, DeformationError> {
    let s = frame.s();
    let p = m_parts(frame, r, theta, t);
    let den = 1.0 + s * p.x;
    if den.abs() < 0.5 {
        return Err(DeformationError::PerturbationTooLarge(den.abs()));
    }
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { p.x * p.x } else { 0.0 };
            out[i][j] = (p.n2[i][j] - p.n1[i][j] * p.x + id) * (s * s / den);
        }
    }
    Ok(out)
}

fn polar(x: f64, y: f64) -> (f64, f64) {
    (x.hypot(y), y.atan2(x))
}

/// `sum_j d_j F_j` for a field of three 2x2 coefficients, by central differences.
fn divergence(
    frame: &PerturbationFrame,
    r: f64,
    theta: f64,
    t: f64,
    field: &dyn Fn(f64, f64, f64) -> Result<[Mat2; 3], DeformationError>,
) -> Result<Mat2, DeformationError> {
    let h = 1e-4 * frame.frak_r();
    let ht = 1e-4;
    let (x, y) = (r * theta.cos(), r * theta.sin());
    let at = |x: f64, y: f64, t: f64| {
        let (r, th) = polar(x, y);
        field(r, th, t)
    };
    let (xp, xm) = (at(x + h, y, t)?, at(x - h, y, t)?);
    let (yp, ym) = (at(x, y + h, t)?, at(x, y - h, t)?);
    let (tp, tm) = (at(x, y, t + ht)?, at(x, y, t - ht)?);
    let mut out = [[ZERO; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let dt = (tp[0][a][b] - tm[0][a][b]) / (2.0 * ht);
            let dx1 = (xp[1][a][b] - xm[1][a][b]) / (2.0 * h);
            let dy1 = (yp[1][a][b] - ym[1][a][b]) / (2.0 * h);
            let dx2 = (xp[2][a][b] - xm[2][a][b]) / (2.0 * h);
            let dy2 = (yp[2][a][b] - ym[2][a][b]) / (2.0 * h);
            // d_z = (d_x - i d_y)/2, d_zbar = (d_x + i d_y)/2
            let i = c64(0.0, 1.0);
            out[a][b] = dt + (dx1 - i * dy1) * 0.5 + (dx2 + i * dy2) * 0.5;
        }
    }
    Ok(out)
}

/// Coefficients of `R_s` (first order, `O(s^2)`).
fn r_fields(frame: &PerturbationFrame, r: f64, theta: f64, t: f64) -> Result<[Mat2; 3], DeformationError> {
    Ok(fields(&remainder(frame, r, theta, t)?))
}

/// `A_s`: the zero-order term `sum_j d_j R_j` of `R_s` written in divergence form.
pub fn a_field(frame: &PerturbationFrame, r: f64, theta: f64, t: f64) -> Result<Mat2, DeformationError> {
    divergence(frame, r, theta, t, &|r, th, t| r_fields(frame, r, th, t))
}

/// `Theta_s` coefficients of `d_z` and `d_zbar`.
fn theta_fields(frame: &PerturbationFrame, r: f64, theta: f64, t: f64) -> [Mat2; 2] {
    let s = frame.s();
    let (chi, cz, czb) = frame.cutoff().complex_derivs(r, theta);
    let eta = frame.eta().eval(t);
    let ed = frame.eta_dot().eval(t);
    let mut dz = [[ZERO; 2]; 2];
    axpy(&mut dz, ed * (s * chi), &e(0));
    axpy(&mut dz, czb * eta.conj() * s, &e(1));
    axpy(&mut dz, -czb * eta * s, &e(2));
    let mut dzb = [[ZERO; 2]; 2];
    axpy(&mut dzb, ed.conj() * (s * chi), &e(0));
    axpy(&mut dzb, -cz * eta.conj() * s, &e(1));
    axpy(&mut dzb, cz * eta * s, &e(2));
    [dz, dzb]
}

/// `F_s = D(s X Id) + D([[0, i s chi eta'], [-i s chi conj(eta'), 0]])` with
/// `D(G) = e_1 d_t G + e_2 d_z G + e_3 d_zbar G`.
pub fn f_field(frame: &PerturbationFrame, r: f64, theta: f64, t: f64) -> Result<Mat2, DeformationError> {
    let g = |r: f64, th: f64, t: f64| -> Mat2 {
        let s = frame.s();
        let x = frame.x_field(r, th, t);
        let chi = frame.cutoff().value(r);
        let ed = frame.eta_dot().eval(t);
        let i = c64(0.0, 1.0);
        [
            [c64(s * x, 0.0), i * ed * (s * chi)],
            [-i * ed.conj() * (s * chi), c64(s * x, 0.0)],
        ]
    };
    let field = |r: f64, th: f64, t: f64| -> Result<[Mat2; 3], DeformationError> {
        let m = g(r, th, t);
        let mut out = [[[ZERO; 2]; 2]; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = mul(&e(j), &m);
        }
        Ok(out)
    };
    divergence(frame, r, theta, t, &field)
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut o = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

/// One slice integral `int_{r = r0} |A_s|^2` against its budget.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceBudget {
    pub r0: f64,
    pub measured: f64,
    pub budget: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetReport {
    /// `sup sqrt(sum_j |R_j|_op^2)` over the sample grid.
    pub r_measured: f64,
    /// `gamma_T^2 kappa1^2 s^2`.
    pub r_budget: f64,
    pub slices: Vec<SliceBudget>,
    pub theta_sup: f64,
    pub f_sup: f64,
    pub varrho_sup: f64,
    /// `2 gamma_T kappa1 s`.
    pub varrho_budget: f64,
}

impl BudgetReport {
    /// `measured / budget` for `R_s`, `varrho` and each slice; `0` when both vanish.
    pub fn ratios(&self) -> Vec<f64> {
        let q = |m: f64, b: f64| if m == 0.0 { 0.0 } else { m / b };
        let mut v = vec![q(self.r_measured, self.r_budget), q(self.varrho_sup, self.varrho_budget)];
        v.extend(self.slices.iter().map(|s| q(s.measured, s.budget)));
        v
    }

    pub fn all_within(&self) -> bool {
        self.ratios().iter().all(|&r| r <= 1.0)
    }
}

/// Points `(r_i, theta_j, t_k)` with `r_i = frak_r (i + 1/2) / n` and uniform angles.
pub fn sample_grid(frak_r: f64, n: usize) -> Vec<(f64, f64, f64)> {
    let mut pts = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                pts.push((
                    frak_r * (i as f64 + 0.5) / n as f64,
                    TAU * j as f64 / n as f64,
                    TAU * k as f64 / n as f64,
                ));
            }
        }
    }
    pts
}

/// `int int |A_s(r0, theta, t)|^2 r0 dtheta dt` by the periodic trapezoid rule.
pub fn slice_integral(frame: &PerturbationFrame, r0: f64, n: usize) -> Result<f64, DeformationError> {
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            let a = a_field(frame, r0, TAU * j as f64 / n as f64, TAU * k as f64 / n as f64)?;
            s += frob2(&a);
        }
    }
    Ok(s * (TAU / n as f64).powi(2) * r0)
}

/// Measured norms of the pieces of the perturbed Dirac operator against their budgets:
/// `R_s` on a 10x10x10 grid over `N_frak_r`, `A_s` on the slices
/// `r0 in {frak_r, frak_r/2, frak_r/T}`, plus sup norms of `Theta_s`, `F_s` and `varrho`.
pub fn decomposition_norm_budget(frame: &PerturbationFrame) -> Result<BudgetReport, DeformationError> {
    let g = frame.gamma();
    let (k1, s) = (frame.kappa1(), frame.s());
    let mut r_measured: f64 = 0.0;
    let mut theta_sup: f64 = 0.0;
    let mut f_sup: f64 = 0.0;
    let mut varrho_sup: f64 = 0.0;
    for (r, th, t) in sample_grid(frame.frak_r(), 10) {
        let rf = r_fields(frame, r, th, t)?;
        r_measured = r_measured.max(rf.iter().map(|m| op_norm(m).powi(2)).sum::<f64>().sqrt());
        let tf = theta_fields(frame, r, th, t);
        theta_sup = theta_sup.max(tf.iter().map(|m| op_norm(m).powi(2)).sum::<f64>().sqrt());
        f_sup = f_sup.max(op_norm(&f_field(frame, r, th, t)?));
        varrho_sup = varrho_sup.max(frame.varrho(r, th, t)?.abs());
    }
    let fr = frame.frak_r();
    let slices = [fr, fr / 2.0, fr / frame.t_ratio()]
        .iter()
        .map(|&r0| {
            Ok(SliceBudget {
                r0,
                measured: slice_integral(frame, r0, 32)?,
                budget: g * g * k1.powi(4) * fr * s.powi(4),
            })
        })
        .collect::<Result<Vec<_>, DeformationError>>()?;
    Ok(BudgetReport {
        r_measured,
        r_budget: g * g * k1 * k1 * s * s,
        slices,
        theta_sup,
        f_sup,
        varrho_sup,
        varrho_budget: 2.0 * g * k1 * s,
    })
}
