use crate::DeformationError;
use cylinder_spinors::geometry::simpson;
use cylinder_spinors::modes::low_frequency;
use cylinder_spinors::{dirac_apply_on, minus_family, plus_family, CylinderGeometry};
use fourier_core::{c64, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Solution of `D (U+, U-) = (f+, f-)` for one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSolution {
    pub u_plus: Vec<C64>,
    pub u_minus: Vec<C64>,
    /// Coefficients `(c+, c-)` of the plus and minus families; near the axis, where the
    /// particular part vanishes, the solution is `c+ plus_family + c- minus_family`.
    pub inner: (C64, C64),
    /// First grid radius where the source is nonzero (the grid end if it is zero).
    pub r_support: f64,
}

/// `int_{x_i}^{x_{i+1}}` of the quintic through six neighbouring nodes (3-point Gauss).
fn interval_integral(x: &[f64], f: &[C64], i: usize) -> C64 {
    const W: usize = 6;
    let n = x.len();
    let start = i.saturating_sub(W / 2 - 1).min(n - W);
    let nodes = &x[start..start + W];
    let vals = &f[start..start + W];
    let (a, b) = (x[i], x[i + 1]);
    let g = [-(0.6f64.sqrt()), 0.0, 0.6f64.sqrt()];
    let w = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let mut s = ZERO;
    for (gx, gw) in g.iter().zip(w) {
        let t = 0.5 * (a + b) + 0.5 * (b - a) * gx;
        let mut v = ZERO;
        for j in 0..W {
            let mut lj = 1.0;
            for m in 0..W {
                if m != j {
                    lj *= (t - nodes[m]) / (nodes[j] - nodes[m]);
                }
            }
            v += vals[j] * lj;
        }
        s += v * gw;
    }
    s * (0.5 * (b - a))
}

/// `K_{|nu|}(x)` for half-odd `nu = m + 1/2`, by upward recurrence from `K_{1/2}`.
fn bessel_k_half(m: i64, x: f64) -> f64 {
    let order = if m >= 0 { m } else { -m - 1 };
    let k_half = (std::f64::consts::FRAC_PI_2 / x).sqrt() * (-x).exp();
    let (mut prev, mut cur) = (k_half, k_half * (1.0 + 1.0 / x));
    if order == 0 {
        return k_half;
    }
    for j in 1..order {
        let nu = j as f64 + 0.5;
        (prev, cur) = (cur, prev + 2.0 * nu / x * cur);
    }
    cur
}

/// Growing and decaying homogeneous solutions with their `(c+, c-)` coefficients.
///
/// For `l != 0` the decaying one is the `K`-Bessel combination with coefficients
/// `(1, lam^{1-2k} / l)`, evaluated directly from `K` since summing the two families
/// cancels catastrophically; at `l = 0` the families are powers of `r` and the smaller
/// power is taken.
struct GrowthBasis {
    k: i64,
    l: f64,
    g: (C64, C64),
    d: (C64, C64),
}

impl GrowthBasis {
    fn new(k: i64, l: f64) -> Self {
        let (one, zero) = (c64(1.0, 0.0), ZERO);
        let g = if k >= 0 { (one, zero) } else { (zero, one) };
        let d = if l == 0.0 {
            if k >= 0 {
                (zero, one)
            } else {
                (one, zero)
            }
        } else {
            (one, c64(l.abs().powi(1 - 2 * k as i32) / l, 0.0))
        };
        Self { k, l, g, d }
    }

    /// `(G(r), D(r))` as value pairs.
    fn eval(&self, r: f64) -> ((f64, f64), (f64, f64)) {
        let (k, l) = (self.k, self.l);
        let g = if k >= 0 { plus_family(k, l, r) } else { minus_family(k, l, r) };
        let d = if l == 0.0 {
            if k >= 0 {
                minus_family(k, l, r)
            } else {
                plus_family(k, l, r)
            }
        } else {
            // (2/pi) (-1)^k lam^{1/2-k} (K_{k-1/2}(x), sign(l) K_{k+1/2}(x)), x = lam r
            let lam = l.abs();
            let x = lam * r;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let c = std::f64::consts::FRAC_2_PI * sign * lam.powf(0.5 - k as f64);
            (c * bessel_k_half(k - 1, x), c * l.signum() * bessel_k_half(k, x))
        };
        (g, d)
    }

    /// `(alpha, beta)` with `c = alpha g + beta d` in coefficient space.
    fn split(&self, c: (C64, C64)) -> (C64, C64) {
        let det = self.g.0 * self.d.1 - self.d.0 * self.g.1;
        ((c.0 * self.d.1 - c.1 * self.d.0) / det, (self.g.0 * c.1 - self.g.1 * c.0) / det)
    }
}

/// `int_0^{r_0} w dr` for an integrand behaving like a power of `r` below the first node.
fn axis_tail(r: &[f64], w: &[C64]) -> Result<C64, DeformationError> {
    let (a, b) = (w[0].norm(), w[1].norm());
    if a == 0.0 {
        return Ok(ZERO);
    }
    let p = (b / a).ln() / (r[1] / r[0]).ln();
    if !(p > -1.0 + 1e-9) {
        return Err(DeformationError::Radial(format!(
            "source is not integrable against the mode families at the axis (power {p})"
        )));
    }
    Ok(w[0] * (r[0] / (p + 1.0)))
}

fn inner(r: &[f64], a: &[(C64, C64)], b: &[(C64, C64)]) -> C64 {
    let re: Vec<f64> = (0..r.len())
        .map(|i| ((a[i].0.conj() * b[i].0 + a[i].1.conj() * b[i].1) * r[i]).re)
        .collect();
    let im: Vec<f64> = (0..r.len())
        .map(|i| ((a[i].0.conj() * b[i].0 + a[i].1.conj() * b[i].1) * r[i]).im)
        .collect();
    c64(simpson(r, &re), simpson(r, &im))
}

/// Solve `l U+ + U-' + (k+1/2) U-/r = f+`, `-l U- - U+' + (k-1/2) U+/r = f-` on the grid.
///
/// Variation of parameters with the fundamental matrix `[plus_family, minus_family]`,
/// integrating from the axis, so the particular part vanishes wherever the source does
/// near `r = 0`. The homogeneous part uses the families that are `L^2` at the axis
/// (plus for `k >= 0`, minus for `k <= 0`) and is chosen to minimize the `L^2(r dr)`
/// norm of the result; at `k = 0` both are admissible, which fixes the resonant case.
///
/// With `kr` set and `k = 0`, `|l| > 1/(2 r_support)`, the homogeneous coefficients are
/// restricted to `u-hat- = c+ + sign(l) c- = 0`, so the solution is in `K_r` on `N_r`.
pub fn radial_bvp_solve(
    geometry: &CylinderGeometry,
    mode: (i64, f64),
    source: (&[C64], &[C64]),
    kr: bool,
) -> Result<RadialSolution, DeformationError> {
    let (k, l) = mode;
    let (fp, fm) = source;
    let r = geometry.grid();
    let n = r.len();
    if fp.len() != n || fm.len() != n {
        return Err(DeformationError::Radial("source length does not match grid".into()));
    }
    let first = (0..n).find(|&i| fp[i] != ZERO || fm[i] != ZERO);
    let Some(first) = first else {
        return Ok(RadialSolution {
            u_plus: vec![ZERO; n],
            u_minus: vec![ZERO; n],
            inner: (ZERO, ZERO),
            r_support: r[n - 1],
        });
    };
    let r_support = r[first];

    // Variation of parameters in a basis (G, D) of growing and decaying solutions. The D
    // part is integrated from the axis and the G part from the outer end, so no large
    // cancelling terms appear in the nodal values.
    let basis = GrowthBasis::new(k, l);
    let gd: Vec<_> = r.iter().map(|&x| basis.eval(x)).collect();
    let mut wg = Vec::with_capacity(n);
    let mut wd = Vec::with_capacity(n);
    for &((g1, g2), (d1, d2)) in &gd {
        let det = g1 * d2 - d1 * g2;
        let i = wg.len();
        let (q1, q2) = (-fm[i], fp[i]);
        // entries at the rounding level of their own terms are set to zero
        let floor = |x: C64, a: f64, b: f64| if x.norm() <= 64.0 * f64::EPSILON * (a + b) { ZERO } else { x };
        let a = (q1 * d2).norm() / det.abs();
        let b = (q2 * d1).norm() / det.abs();
        wg.push(floor((q1 * d2 - q2 * d1) / det, a, b));
        let a = (q2 * g1).norm() / det.abs();
        let b = (q1 * g2).norm() / det.abs();
        wd.push(floor((q2 * g1 - q1 * g2) / det, a, b));
    }
    let s: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let wg_s: Vec<C64> = wg.iter().zip(r).map(|(w, x)| w * x).collect();
    let wd_s: Vec<C64> = wd.iter().zip(r).map(|(w, x)| w * x).collect();
    let mut outer_g = vec![ZERO; n];
    for i in (0..n - 1).rev() {
        outer_g[i] = outer_g[i + 1] + interval_integral(&s, &wg_s, i);
    }
    let tail = |w: &[C64]| axis_tail(r, w).map_err(|e| DeformationError::Radial(format!("mode ({k}, {l}): {e}")));
    let total_g = tail(&wg)? + outer_g[0];
    let mut id = tail(&wd)?;
    // y = D int_0^r - G int_r^R; the axis-anchored particular solution is y + total_g G
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            id += interval_integral(&s, &wd_s, i - 1);
        }
        let ((g1, g2), (d1, d2)) = gd[i];
        y.push((id * d1 - outer_g[i] * g1, id * d2 - outer_g[i] * g2));
    }
    let profile = |c: (C64, C64)| -> Vec<(C64, C64)> {
        let (al, be) = basis.split(c);
        gd.iter().map(|&((g1, g2), (d1, d2))| (al * g1 + be * d1, al * g2 + be * d2)).collect()
    };

    // admissible homogeneous directions as (c+, c-) coefficient vectors
    let one = c64(1.0, 0.0);
    let mut dirs: Vec<(C64, C64)> = Vec::new();
    if k == 0 {
        if kr && l != 0.0 && !low_frequency(l, r_support) {
            dirs.push((one, c64(-l.signum(), 0.0)));
        } else {
            dirs.push((one, ZERO));
            dirs.push((ZERO, one));
        }
    } else if k > 0 {
        dirs.push((one, ZERO));
    } else {
        dirs.push((ZERO, one));
    }
    let phi: Vec<Vec<(C64, C64)>> = dirs.iter().map(|&d| profile(d)).collect();
    let gram: Vec<Vec<C64>> = phi.iter().map(|u| phi.iter().map(|v| inner(r, u, v)).collect()).collect();
    let base = profile((basis.g.0 * total_g, basis.g.1 * total_g));
    let rhs: Vec<C64> = phi.iter().map(|u| -inner(r, u, &y) - inner(r, u, &base)).collect();
    let coef: Vec<C64> = if phi.len() == 1 {
        vec![rhs[0] / gram[0][0]]
    } else {
        let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
        vec![
            (rhs[0] * gram[1][1] - rhs[1] * gram[0][1]) / det,
            (rhs[1] * gram[0][0] - rhs[0] * gram[1][0]) / det,
        ]
    };
    let mut cp = ZERO;
    let mut cm = ZERO;
    for (c, d) in coef.iter().zip(&dirs) {
        cp += c * d.0;
        cm += c * d.1;
    }
    let hom = profile((basis.g.0 * total_g + cp, basis.g.1 * total_g + cm));
    let mut u_plus = Vec::with_capacity(n);
    let mut u_minus = Vec::with_capacity(n);
    for i in 0..n {
        u_plus.push(y[i].0 + hom[i].0);
        u_minus.push(y[i].1 + hom[i].1);
    }
    if u_plus.iter().chain(&u_minus).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(DeformationError::Radial("non-finite profile".into()));
    }
    Ok(RadialSolution {
        u_plus,
        u_minus,
        inner: (cp, cm),
        r_support,
    })
}

/// `max |D U - f| / max (|f| + |l||U| + (|k|+1)|U|/r)` over interior nodes, with `D`
/// from `dirac_apply_on` (five-point stencils in `ln r`).
pub fn source_residual(
    grid: &[f64],
    mode: (i64, f64),
    sol: (&[C64], &[C64]),
    source: (&[C64], &[C64]),
) -> Result<f64, DeformationError> {
    let (k, l) = mode;
    let (gp, gm) = dirac_apply_on(k, l, sol.0, sol.1, grid)?;
    let n = grid.len();
    let mut num: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 2..n - 2 {
        let u = sol.0[i].norm() + sol.1[i].norm();
        let f = source.0[i].norm() + source.1[i].norm();
        scale = scale.max(f + l.abs() * u + (k.abs() as f64 + 1.0) * u / grid[i]);
        num = num.max((gp[i] - source.0[i]).norm().max((gm[i] - source.1[i]).norm()));
    }
    Ok(if scale == 0.0 { num } else { num / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decaying_solution_matches_family_combination() {
        for k in -3..=3 {
            for l in [3.0, -2.0, 0.5] {
                let b = GrowthBasis::new(k, l);
                for r in [0.05, 0.2] {
                    let (p, m) = (plus_family(k, l, r), minus_family(k, l, r));
                    let want = (
                        b.d.0.re * p.0 + b.d.1.re * m.0,
                        b.d.0.re * p.1 + b.d.1.re * m.1,
                    );
                    let (_, got) = b.eval(r);
                    let scale = p.0.abs() + p.1.abs() + (b.d.1.re * m.0).abs() + (b.d.1.re * m.1).abs();
                    assert!((got.0 - want.0).abs() + (got.1 - want.1).abs() <= 1e-12 * scale, "{k} {l} {r}");
                }
            }
        }
    }
}
