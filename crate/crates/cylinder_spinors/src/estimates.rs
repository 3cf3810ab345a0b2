use crate::geometry::simpson;
use crate::modes::{extract_leading, Leading, ProfileClass, SpinorModeExpansion};
use crate::CylinderError;
use fourier_core::C64;
use std::f64::consts::PI;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// `int_0^r f(rho) drho`: Simpson on the rescaled grid plus a power-law tail below the first node.
fn radial_integral(radii: &[f64], f: &[f64]) -> f64 {
    simpson(radii, f) + power_tail(radii, f)
}

fn power_tail(radii: &[f64], f: &[f64]) -> f64 {
    let (r1, r2, f1, f2) = (radii[0], radii[1], f[0], f[1]);
    if f1 == 0.0 {
        return 0.0;
    }
    if f2 == 0.0 || f1.signum() != f2.signum() {
        return 0.0;
    }
    let p = (f2 / f1).ln() / (r2 / r1).ln();
    if p <= -1.0 + 1e-9 {
        f64::INFINITY
    } else {
        f1 * r1 / (p + 1.0)
    }
}

struct ModeSamples {
    k: i64,
    l: f64,
    radii: Vec<f64>,
    up: Vec<C64>,
    um: Vec<C64>,
}

fn mode_samples(e: &SpinorModeExpansion, r: f64) -> Vec<ModeSamples> {
    let radii = e.geometry().grid_to(r);
    e.terms()
        .keys()
        .map(|&(k, l)| {
            let (up, um) = e.radial_samples(k, l, &radii);
            ModeSamples {
                k,
                l: e.spin_offset().frequency(l),
                radii: radii.clone(),
                up,
                um,
            }
        })
        .collect()
}

fn check_radius(e: &SpinorModeExpansion, r: f64) -> Result<(), CylinderError> {
    let big = e.geometry().r_outer();
    if !(r > 0.0 && r <= big * (1.0 + 1e-12)) {
        return Err(CylinderError::Radius { r, big });
    }
    Ok(())
}

impl ModeSamples {
    fn l2(&self) -> f64 {
        let f: Vec<f64> = (0..self.radii.len())
            .map(|i| (self.up[i].norm_sqr() + self.um[i].norm_sqr()) * self.radii[i])
            .collect();
        FOUR_PI_SQ * radial_integral(&self.radii, &f)
    }

    /// Gradient energy: radial derivative (from the mode equation), angular part and `t` part.
    fn grad(&self) -> f64 {
        let (k, l) = (self.k as f64, self.l);
        let f: Vec<f64> = (0..self.radii.len())
            .map(|i| {
                let rho = self.radii[i];
                let (a, b) = (self.up[i], self.um[i]);
                let da = a * ((k - 0.5) / rho) - b * l;
                let db = -a * l - b * ((k + 0.5) / rho);
                let ang = ((k - 0.5).powi(2) * a.norm_sqr() + (k + 0.5).powi(2) * b.norm_sqr())
                    / (rho * rho);
                (da.norm_sqr() + db.norm_sqr() + ang + l * l * (a.norm_sqr() + b.norm_sqr())) * rho
            })
            .collect();
        FOUR_PI_SQ * radial_integral(&self.radii, &f)
    }

    /// Only the angular (`e_2`) part of the gradient energy.
    fn angular(&self) -> f64 {
        let k = self.k as f64;
        let f: Vec<f64> = (0..self.radii.len())
            .map(|i| {
                let rho = self.radii[i];
                ((k - 0.5).powi(2) * self.up[i].norm_sqr() + (k + 0.5).powi(2) * self.um[i].norm_sqr())
                    / rho
            })
            .collect();
        FOUR_PI_SQ * radial_integral(&self.radii, &f)
    }
}

/// Per-mode squared norms `((k, l), norm^2)` on `N_r`.
pub fn mode_norms2(
    e: &SpinorModeExpansion,
    r: f64,
    derivative_order: u8,
) -> Result<Vec<((i64, i64), f64)>, CylinderError> {
    check_radius(e, r)?;
    if derivative_order > 1 {
        return Err(CylinderError::DerivativeOrder(derivative_order));
    }
    Ok(e
        .terms()
        .keys()
        .zip(mode_samples(e, r))
        .map(|(&kl, m)| {
            let v = if derivative_order == 0 { m.l2() } else { m.l2() + m.grad() };
            (kl, v)
        })
        .collect())
}

/// `L^2(N_r)` norm (`derivative_order = 0`) or `L^2_1(N_r)` norm (`= 1`).
///
/// Modes are orthogonal, so this is the root-sum-square of the per-mode norms.
pub fn cyl_norm(e: &SpinorModeExpansion, r: f64, derivative_order: u8) -> Result<f64, CylinderError> {
    Ok(mode_norms2(e, r, derivative_order)?
        .iter()
        .map(|(_, v)| v)
        .sum::<f64>()
        .sqrt())
}

/// `||v||^2_{N_r} / (||v||^2_{N_R} (r/R)^3)`.
pub fn decay_ratio(e: &SpinorModeExpansion, r: f64, big_r: f64) -> Result<f64, CylinderError> {
    if e.is_empty() {
        return Err(CylinderError::ZeroExpansion);
    }
    if !(r <= big_r / 2.0 * (1.0 + 1e-12)) {
        return Err(CylinderError::Radius { r, big: big_r / 2.0 });
    }
    let small = cyl_norm(e, r, 0)?.powi(2);
    let large = cyl_norm(e, big_r, 0)?.powi(2);
    Ok(small / (large * (r / big_r).powi(3)))
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, j| a * j as f64)
}

/// Ratio of the weighted leading-coefficient sum to its bound; must stay `<= 1`.
///
/// L^2: `sum |l|^{2k} (|u+_l|^2 + |u-_l|^2) / (3 (2k+1)! R^{-(2k+1)} ||u||^2_{N_R})`.
/// L^2_1: `sum |l|^{2k} (|d+_l|^2 + |d-_l|^2) / ((2k+3)! R^{-(2k+3)} ||v||^2_{N_R})`.
pub fn growth_bound_margin(e: &SpinorModeExpansion, k: u32) -> Result<f64, CylinderError> {
    if k > 6 {
        return Err(CylinderError::DerivativeOrder(k as u8));
    }
    if e.is_empty() {
        return Ok(0.0);
    }
    let big_r = e.geometry().r_outer();
    let weight = |l: i64| (e.spin_offset().frequency(l).abs()).powi(2 * k as i32);
    let norm2 = cyl_norm(e, big_r, 0)?.powi(2);
    let (num, bound) = match extract_leading(e)? {
        Leading::L2(kr) => {
            let s: f64 = kr
                .u_plus
                .modes()
                .map(|(l, c)| weight(l) * (c.norm_sqr() + kr.u_minus.coeff(l).norm_sqr()))
                .sum();
            (s, 3.0 * factorial(2 * k + 1) / big_r.powi(2 * k as i32 + 1) * norm2)
        }
        Leading::L21(d) => {
            let s: f64 = d
                .d_plus
                .modes()
                .map(|(l, c)| weight(l) * (c.norm_sqr() + d.d_minus.coeff(l).norm_sqr()))
                .sum();
            (s, factorial(2 * k + 3) / big_r.powi(2 * k as i32 + 3) * norm2)
        }
    };
    Ok(if num == 0.0 { 0.0 } else { num / bound })
}

/// `int_{N_r} |u|^2 / (4 pi^2 r^2 int_{N_r} |grad_{e_2} u|^2)`; must stay `<= 1`.
pub fn poincare_check(e: &SpinorModeExpansion, r: f64) -> Result<f64, CylinderError> {
    check_radius(e, r)?;
    if e.is_empty() {
        return Err(CylinderError::ZeroExpansion);
    }
    let modes = mode_samples(e, r);
    let lhs: f64 = modes.iter().map(|m| m.l2()).sum();
    let grad: f64 = modes.iter().map(|m| m.angular()).sum();
    Ok(lhs / (FOUR_PI_SQ * r * r * grad))
}

/// True when every term is L^2_1 (the decay estimate's hypothesis).
pub fn is_l21(e: &SpinorModeExpansion) -> bool {
    e.class() == Some(ProfileClass::L21Kernel)
}
