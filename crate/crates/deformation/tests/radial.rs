mod common;

use cylinder_spinors::{minus_family, plus_family, CylinderGeometry};
use deformation::radial::source_residual;
use deformation::{radial_bvp_solve, DeformationError};
use fourier_core::{c64, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `exp(-1/((r-a)(b-r)))` on `(a, b)` and its derivative.
fn bump(a: f64, b: f64, r: f64) -> (f64, f64) {
    if r <= a || r >= b {
        return (0.0, 0.0);
    }
    let g = (r - a) * (b - r);
    let v = (-1.0 / g).exp();
    (v, v * (a + b - 2.0 * r) / (g * g))
}

struct Manufactured {
    u_plus: Vec<C64>,
    u_minus: Vec<C64>,
    f_plus: Vec<C64>,
    f_minus: Vec<C64>,
}

/// `r^{|k|+3/2} exp(-r^2)` and its derivative.
fn smooth(k: i64, r: f64) -> (f64, f64) {
    let p = k.abs() as f64 + 1.5;
    let v = r.powf(p) * (-r * r).exp();
    (v, v * (p / r - 2.0 * r))
}

/// `U = (alpha phi, beta phi)` with the source from the mode equations.
fn manufactured(
    grid: &[f64],
    k: i64,
    l: f64,
    alpha: C64,
    beta: C64,
    phi: impl Fn(f64) -> (f64, f64),
) -> Manufactured {
    let mut m = Manufactured {
        u_plus: vec![],
        u_minus: vec![],
        f_plus: vec![],
        f_minus: vec![],
    };
    let kf = k as f64;
    for &r in grid {
        let (p, dp) = phi(r);
        let (up, um) = (alpha * p, beta * p);
        let (dup, dum) = (alpha * dp, beta * dp);
        m.u_plus.push(up);
        m.u_minus.push(um);
        m.f_plus.push(up * l + dum + um * ((kf + 0.5) / r));
        m.f_minus.push(-um * l - dup + up * ((kf - 0.5) / r));
    }
    m
}

fn trap(r: &[f64], f: impl Fn(usize) -> C64) -> C64 {
    (1..r.len()).fold(ZERO, |s, i| s + (f(i) + f(i - 1)) * (0.5 * (r[i] - r[i - 1])))
}

fn geometry() -> CylinderGeometry {
    CylinderGeometry::graded(1.0, 8, 64, 512).unwrap()
}

#[test]
fn zero_source_gives_zero() {
    let g = geometry();
    let z = vec![ZERO; g.grid().len()];
    let sol = radial_bvp_solve(&g, (1, 2.0), (&z, &z), true).unwrap();
    assert!(sol.u_plus.iter().chain(&sol.u_minus).all(|x| *x == ZERO));
    assert_eq!(sol.r_support, 1.0);
    assert_eq!(sol.inner, (ZERO, ZERO));
}

#[test]
fn length_mismatch_is_an_error() {
    let g = geometry();
    let z = vec![ZERO; 10];
    assert!(matches!(radial_bvp_solve(&g, (0, 1.0), (&z, &z), false), Err(DeformationError::Radial(_))));
}

#[test]
fn manufactured_solutions() {
    let g = geometry();
    let r = g.grid();
    for (k, l) in [(0i64, 0.0), (0, 3.0), (0, -2.0), (1, 2.0), (2, -1.0), (-1, 4.0), (-2, 0.0), (3, 0.5)] {
        let m = manufactured(r, k, l, c64(1.0, 0.5), c64(-0.3, 1.0), |x| smooth(k, x));
        assert!(m.f_plus.iter().chain(&m.f_minus).all(|z| z.re.is_finite() && z.im.is_finite()), "source ({k}, {l})");
        let sol = radial_bvp_solve(&g, (k, l), (&m.f_plus, &m.f_minus), false).unwrap_or_else(|e| panic!("({k}, {l}): {e}"));
        let res = source_residual(r, (k, l), (&sol.u_plus, &sol.u_minus), (&m.f_plus, &m.f_minus)).unwrap();
        assert!(res <= 1e-8, "(k, l) = ({k}, {l}): residual {res:e}");
        assert_eq!(sol.r_support, r[0]);

        // the difference from the truth is the recorded homogeneous part
        let (cp, cm) = sol.inner;
        let scale = m.u_plus.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (i, &x) in r.iter().enumerate() {
            let (p1, p2) = plus_family(k, l, x);
            let (m1, m2) = minus_family(k, l, x);
            let dp = sol.u_plus[i] - m.u_plus[i] - (cp * p1 + cm * m1);
            let dm = sol.u_minus[i] - m.u_minus[i] - (cp * p2 + cm * m2);
            assert!(dp.norm().max(dm.norm()) <= 1e-6 * scale, "({k}, {l}) at r = {x}");
        }
        // only axis-admissible families enter
        if k > 0 {
            assert_eq!(cm, ZERO);
        }
        if k < 0 {
            assert_eq!(cp, ZERO);
        }
        // minimal L^2(r dr) norm: the solution is orthogonal to the admissible families
        let norm_u = trap(r, |i| c64(sol.u_plus[i].norm_sqr() + sol.u_minus[i].norm_sqr(), 0.0) * r[i]).re;
        let norm_true = trap(r, |i| c64(m.u_plus[i].norm_sqr() + m.u_minus[i].norm_sqr(), 0.0) * r[i]).re;
        assert!(norm_u <= norm_true * (1.0 + 1e-6));
        let fams: Vec<Box<dyn Fn(f64) -> (f64, f64)>> = match k.signum() {
            1 => vec![Box::new(move |x| plus_family(k, l, x))],
            -1 => vec![Box::new(move |x| minus_family(k, l, x))],
            _ => vec![Box::new(move |x| plus_family(k, l, x)), Box::new(move |x| minus_family(k, l, x))],
        };
        for f in &fams {
            let fam_norm = trap(r, |i| {
                let (a, b) = f(r[i]);
                c64((a * a + b * b) * r[i], 0.0)
            })
            .re
            .sqrt();
            let ip = trap(r, |i| {
                let (a, b) = f(r[i]);
                (sol.u_plus[i] * a + sol.u_minus[i] * b) * r[i]
            });
            assert!(ip.norm() <= 1e-3 * fam_norm * norm_u.sqrt(), "({k}, {l}): {ip}");
        }
    }
}

#[test]
fn kr_flag_kills_growing_coefficient() {
    let g = CylinderGeometry::graded(1.0, 8, 64, 4096).unwrap();
    let r = g.grid();
    for l in [6.0, -5.0, 12.0] {
        let m = manufactured(r, 0, l, c64(0.2, -1.0), c64(1.0, 0.0), |x| bump(0.2, 0.9, x));
        let sol = radial_bvp_solve(&g, (0, l), (&m.f_plus, &m.f_minus), true).unwrap();
        assert!((sol.r_support - 0.2).abs() < 0.01);
        let res = source_residual(r, (0, l), (&sol.u_plus, &sol.u_minus), (&m.f_plus, &m.f_minus)).unwrap();
        assert!(res <= 1e-8, "l = {l}: residual {res:e}");
        let (cp, cm) = sol.inner;
        assert!(cp.norm() > 0.0);
        // u-hat- = u+ + sign(l) u- vanishes
        assert!((cp + cm * l.signum()).norm() <= 1e-14 * (cp.norm() + cm.norm()));
        let scale = m.u_plus.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (i, &x) in r.iter().enumerate() {
            let (p1, p2) = plus_family(0, l, x);
            let (m1, m2) = minus_family(0, l, x);
            let dp = sol.u_plus[i] - m.u_plus[i] - (cp * p1 + cm * m1);
            let dm = sol.u_minus[i] - m.u_minus[i] - (cp * p2 + cm * m2);
            assert!(dp.norm().max(dm.norm()) <= 1e-6 * scale, "l = {l} at r = {x}: {} vs {scale}", dp.norm().max(dm.norm()));
        }
    }
    // low frequency: the flag changes nothing
    let m = manufactured(r, 0, 1.0, c64(0.2, -1.0), c64(1.0, 0.0), |x| bump(0.2, 0.9, x));
    let a = radial_bvp_solve(&g, (0, 1.0), (&m.f_plus, &m.f_minus), true).unwrap();
    let b = radial_bvp_solve(&g, (0, 1.0), (&m.f_plus, &m.f_minus), false).unwrap();
    assert_eq!(a, b);
}
