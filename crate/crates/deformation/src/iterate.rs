use crate::budget::{a_field, Mat2};
use crate::frame::{gauss, Cutoff, PerturbationFrame};
use crate::leading::solve_leading_correction;
use crate::radial::radial_bvp_solve;
use crate::typed::{j_map_apply, merge, TypedLeadingTerm};
use crate::DeformationError;
use cylinder_spinors::geometry::simpson;
use cylinder_spinors::{plus_family, CylinderGeometry};
use fourier_core::{c64, Series, C64};
use fredholm_t::{cokernel_complement, SymbolPair};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// One `(k, l)` source on a stage grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectMode {
    pub k: i64,
    pub l: i64,
    pub f_plus: Vec<C64>,
    pub f_minus: Vec<C64>,
}

/// Mass `int |f|^2` of a class-C field on the annulus `r2 < r < r1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusMass {
    pub r1: f64,
    pub r2: f64,
    pub mass: f64,
}

/// The defect at one stage: class A and B as radial mode sources on `N_radius`,
/// class C through its masses on the dyadic annuli `radius 2^{-j}` to `radius 2^{-j-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectSet {
    pub radius: f64,
    pub grid: Vec<f64>,
    pub a: Vec<DefectMode>,
    pub b: Vec<DefectMode>,
    pub c: Vec<AnnulusMass>,
}

/// Number of dyadic annuli sampled for class C.
pub const ANNULI: usize = 6;

fn add_to(modes: &mut BTreeMap<(i64, i64), DefectMode>, n: usize, k: i64, l: i64, fp: &[C64], fm: &[C64]) {
    let e = modes.entry((k, l)).or_insert_with(|| DefectMode {
        k,
        l,
        f_plus: vec![ZERO; n],
        f_minus: vec![ZERO; n],
    });
    for i in 0..n {
        e.f_plus[i] += fp[i];
        e.f_minus[i] += fm[i];
    }
}

fn nonzero(s: &Series) -> impl Iterator<Item = (i64, C64)> + '_ {
    s.modes().filter(|(_, c)| c.norm() > 0.0)
}

impl DefectSet {
    pub fn zero(radius: f64, points: usize) -> Result<Self, DeformationError> {
        let g = CylinderGeometry::graded(radius, 8, 64, points)?;
        Ok(Self {
            radius,
            grid: g.grid().to_vec(),
            a: Vec::new(),
            b: Vec::new(),
            c: Vec::new(),
        })
    }

    pub fn geometry(&self) -> Result<CylinderGeometry, DeformationError> {
        Ok(CylinderGeometry::new(self.radius, 8, 64, self.grid.clone())?)
    }

    /// Mode sources of typed terms times the radial `profile(r) r^{1/2}`.
    ///
    /// The plus part `q+ z^a zbar^b` sits in mode `k = 2a` as `f+`, the minus part
    /// `q- z^b zbar^a` in mode `k = -2a` as `f-`.
    pub fn typed_modes(&self, terms: &[TypedLeadingTerm], profile: impl Fn(f64) -> f64) -> Vec<DefectMode> {
        let n = self.grid.len();
        let prof: Vec<f64> = self.grid.iter().map(|&r| profile(r) * r.sqrt()).collect();
        let zeros = vec![ZERO; n];
        let mut modes = BTreeMap::new();
        for t in terms {
            let k = (2.0 * t.a()) as i64;
            for (l, q) in nonzero(&t.coeff_plus) {
                let f: Vec<C64> = prof.iter().map(|p| q * p).collect();
                add_to(&mut modes, n, k, l, &f, &zeros);
            }
            for (l, q) in nonzero(&t.coeff_minus) {
                let f: Vec<C64> = prof.iter().map(|p| q * p).collect();
                add_to(&mut modes, n, -k, l, &zeros, &f);
            }
        }
        modes.into_values().collect()
    }

    /// `rho ||f||_{L^2(N_rho)}` over a mode list: the `L^2_{-1}` proxy.
    pub fn dual_norm(&self, modes: &[DefectMode]) -> f64 {
        let total: f64 = modes
            .iter()
            .map(|m| {
                let f: Vec<f64> = (0..self.grid.len())
                    .map(|i| (m.f_plus[i].norm_sqr() + m.f_minus[i].norm_sqr()) * self.grid[i])
                    .collect();
                4.0 * PI * PI * simpson(&self.grid, &f)
            })
            .sum();
        // an empty sum is -0.0
        self.radius * total.sqrt() + 0.0
    }

    /// Annulus masses of mode sources (linear interpolation of `|f|^2 r` between nodes).
    pub fn annulus_masses(&self, modes: &[DefectMode]) -> Vec<AnnulusMass> {
        let dens: Vec<f64> = (0..self.grid.len())
            .map(|i| {
                modes
                    .iter()
                    .map(|m| m.f_plus[i].norm_sqr() + m.f_minus[i].norm_sqr())
                    .sum::<f64>()
                    * self.grid[i]
                    * 4.0
                    * PI
                    * PI
            })
            .collect();
        let at = |r: f64| {
            let g = &self.grid;
            let j = g.partition_point(|&x| x < r).clamp(1, g.len() - 1);
            let w = (r - g[j - 1]) / (g[j] - g[j - 1]);
            dens[j - 1] * (1.0 - w) + dens[j] * w
        };
        dyadic(self.radius)
            .map(|(r1, r2)| AnnulusMass {
                r1,
                r2,
                mass: gauss(r2, r1, 32, at),
            })
            .collect()
    }
}

fn dyadic(radius: f64) -> impl Iterator<Item = (f64, f64)> {
    (0..ANNULI).map(move |j| {
        let r1 = radius / 2f64.powi(j as i32);
        (r1, r1 / 2.0)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub i: usize,
    pub norm_a: f64,
    pub bound_a: f64,
    pub norm_b: f64,
    pub bound_b: f64,
    /// `max_j mass_j / ((r1^3 - r2^3) (frak_r / T^i)^{1/4})`.
    pub norm_c: f64,
    pub bound_c: f64,
    /// `sum_l |eta_l| (1 + |l|)` for the correction computed from this row's defect.
    pub eta_c1_proxy: f64,
    /// Geometric ratio fitted to `eta_c1_proxy` over rows `0..=i`.
    pub ratio_fit: Option<f64>,
    pub neumann_steps: usize,
}

impl LedgerRow {
    pub fn within(&self) -> bool {
        self.norm_a <= self.bound_a && self.norm_b <= self.bound_b && self.norm_c <= self.bound_c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectLedger {
    pub rows: Vec<LedgerRow>,
    /// First row whose norms exceed their budgets.
    pub failure: Option<usize>,
    pub etas: Vec<Series>,
}

/// `exp` of the least-squares slope of `ln v_i` over the positive entries.
pub fn fit_ratio(values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, v)| (i as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

impl DefectLedger {
    pub fn fitted_ratio(&self) -> Option<f64> {
        fit_ratio(&self.rows.iter().map(|r| r.eta_c1_proxy).collect::<Vec<_>>())
    }

    pub fn all_within(&self) -> bool {
        self.failure.is_none() && self.rows.iter().all(LedgerRow::within)
    }

    /// `sum_{i > n} eta_i` and the bound `eta_{n+1} / (1 - q)`.
    ///
    /// `q` is the larger of the fitted ratio and every observed step ratio past `n + 1`,
    /// so the bound holds for the recorded terms even where the fit undershoots.
    pub fn cauchy_tail(&self, n: usize) -> Option<(f64, f64)> {
        let e: Vec<f64> = self.rows.iter().map(|r| r.eta_c1_proxy).collect();
        if n + 1 >= e.len() {
            return None;
        }
        let q = e[n + 1..]
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(self.fitted_ratio()?, f64::max);
        if q >= 1.0 {
            return None;
        }
        Some((e[n + 1..].iter().sum(), e[n + 1] / (1.0 - q)))
    }

    /// CSV with header `i,norm_A,bound_A,norm_B,bound_B,norm_C,bound_C,eta_c1_proxy,ratio_fit`.
    pub fn to_csv(&self) -> Result<String, DeformationError> {
        let err = |e: csv::Error| DeformationError::Csv(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "i", "norm_A", "bound_A", "norm_B", "bound_B", "norm_C", "bound_C", "eta_c1_proxy", "ratio_fit",
        ])
        .map_err(err)?;
        for r in &self.rows {
            w.write_record([
                r.i.to_string(),
                r.norm_a.to_string(),
                r.bound_a.to_string(),
                r.norm_b.to_string(),
                r.bound_b.to_string(),
                r.norm_c.to_string(),
                r.bound_c.to_string(),
                r.eta_c1_proxy.to_string(),
                r.ratio_fit.map(|x| x.to_string()).unwrap_or_default(),
            ])
            .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| DeformationError::Csv(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii"))
    }
}

/// Parameter window for `(T, P)`: strict is `T > 512` and `T^{1/8} + 1 < P < T^{1/5}`;
/// relaxed is `T >= 8` and `1 < P < T`.
pub fn parameter_window(t: f64, p: f64, strict: bool) -> Result<(), String> {
    if strict {
        if !(t > 512.0) {
            return Err(format!("strict regime needs T > 512, got T = {t}"));
        }
        let (lo, hi) = (t.powf(0.125) + 1.0, t.powf(0.2));
        if !(p > lo && p < hi) {
            return Err(format!("P = {p} outside the strict window ({lo:.4}, {hi:.4})"));
        }
        return Ok(());
    }
    if !(t >= 8.0) {
        return Err(format!("relaxed regime needs T >= 8, got T = {t}"));
    }
    if !(p > 1.0 && p < t) {
        return Err(format!("relaxed regime needs 1 < P < T, got P = {p}, T = {t}"));
    }
    Ok(())
}

fn c1_proxy(s: &Series) -> f64 {
    s.modes().map(|(l, c)| c.norm() * (1.0 + l.abs() as f64)).sum()
}

/// `r^{1/2}` leading coefficient of the `k = 0` family at frequency `l`.
fn lead_factor(l: i64) -> f64 {
    let eps: f64 = 1e-10;
    plus_family(0, l as f64, eps).0 * eps.sqrt()
}

/// Angular/`t` average of `varrho` at each radius (the Neumann multiplier).
fn mean_varrho(frame: &PerturbationFrame, grid: &[f64]) -> Result<Vec<f64>, DeformationError> {
    let n = 16;
    grid.iter()
        .map(|&r| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    s += frame.varrho(r, TAU * j as f64 / n as f64, TAU * k as f64 / n as f64)?;
                }
            }
            Ok(s / (n * n) as f64)
        })
        .collect()
}

/// `(d+ sqrt z, d- sqrt zbar)` at a point.
fn dominant(sym: &SymbolPair, r: f64, theta: f64, t: f64) -> [C64; 2] {
    let sz = C64::from_polar(r.sqrt(), theta / 2.0);
    [sym.d_plus().eval(t) * sz, sym.d_minus().eval(t) * sz.conj()]
}

fn apply2(m: &Mat2, v: &[C64; 2]) -> [C64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Class-C masses of `A_s` acting on the dominant term for a stage frame.
fn slice_masses(frame: &PerturbationFrame, sym: &SymbolPair) -> Result<Vec<AnnulusMass>, DeformationError> {
    if frame.eta().norm_sqr_coeffs() == 0.0 || frame.s() == 0.0 {
        return Ok(dyadic(frame.frak_r()).map(|(r1, r2)| AnnulusMass { r1, r2, mass: 0.0 }).collect());
    }
    let n = 12;
    dyadic(frame.frak_r())
        .map(|(r1, r2)| {
            let mut err = None;
            let mass = gauss(r2, r1, 2, |r| {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        let (th, t) = (TAU * j as f64 / n as f64, TAU * k as f64 / n as f64);
                        match a_field(frame, r, th, t) {
                            Ok(a) => {
                                let f = apply2(&a, &dominant(sym, r, th, t));
                                s += f[0].norm_sqr() + f[1].norm_sqr();
                            }
                            Err(e) => err = Some(e),
                        }
                    }
                }
                s * (TAU / n as f64).powi(2) * r
            });
            match err {
                Some(e) => Err(e),
                None => Ok(AnnulusMass { r1, r2, mass }),
            }
        })
        .collect()
}

fn c_norm(masses: &[AnnulusMass], stage_radius: f64) -> f64 {
    masses
        .iter()
        .map(|m| m.mass / ((m.r1.powi(3) - m.r2.powi(3)) * stage_radius.powf(0.25)))
        .fold(0.0, f64::max)
}

/// Run the leading-term loop for `steps` rows.
///
/// Row `i` holds the defect at radius `rho_i = frak_r / T^i` and is checked against the
/// budgets `kappa0 P^i / T^{5i/2}` (classes A, B; `rho_i ||f||_{L^2}` as the `L^2_{-1}`
/// proxy) and `kappa0 P^i` for the class-C annulus ratio. Each step:
/// 1. solves `D h = f` mode by mode (K_r flag on) after a Neumann loop
///    `g <- f - varrho_bar g` for the averaged conformal factor, and reads `h+-` off the
///    `k = 0` leading coefficients;
/// 2. solves the leading deformation equations for `eta_{i+1}`;
/// 3. builds the next defect at `rho_{i+1}`: class A is `s J(d+ sqrt z, d- sqrt zbar)`
///    with `eta_{i+1}'` plus the `t`-derivative of `s e_{i+1}`, both under the stage
///    cutoff; class B is the cutoff commutator on `s e_{i+1}`,
///    `e_{i+1} = (-i d+' eta sqrt z, -i d-' conj(eta) sqrt zbar)`; class C is the slice
///    term `A_s` of the stage frame applied to the dominant term.
///
/// A budget violation stops the loop and is recorded in `failure`.
pub fn iterate(
    initial: &DefectSet,
    sym: &SymbolPair,
    frame: &PerturbationFrame,
    steps: usize,
) -> Result<DefectLedger, DeformationError> {
    let (t_ratio, p) = (frame.t_ratio(), frame.p());
    parameter_window(t_ratio, p, false).map_err(DeformationError::Frame)?;
    if !(sym.tau() > 0.0) {
        return Err(fredholm_t::FredholmError::Degenerate(sym.tau()).into());
    }
    let points = initial.grid.len();
    let h0 = cokernel_complement(sym, (2 * sym.band() + 1).max(4))?;
    let kappa0 = frame.kappa0();
    let frak_r = frame.frak_r();
    let dominant_term = TypedLeadingTerm::new(0.5, 0.0, sym.d_plus().clone(), sym.d_minus().clone())?;
    let (dp_dot, dm_dot) = (sym.d_plus().derivative(), sym.d_minus().derivative());

    let mut defect = initial.clone();
    let mut stage_eta = frame.eta().clone();
    let mut rows: Vec<LedgerRow> = Vec::new();
    let mut etas = Vec::new();
    let mut failure = None;
    for i in 0..steps {
        let rho = frak_r / t_ratio.powi(i as i32);
        let kappa = kappa0 * p.powi(i as i32);
        let bound_ab = kappa / t_ratio.powf(2.5 * i as f64);
        let mut row = LedgerRow {
            i,
            norm_a: defect.dual_norm(&defect.a),
            bound_a: bound_ab,
            norm_b: defect.dual_norm(&defect.b),
            bound_b: bound_ab,
            norm_c: c_norm(&defect.c, rho),
            bound_c: kappa,
            eta_c1_proxy: 0.0,
            ratio_fit: None,
            neumann_steps: 0,
        };
        if !row.within() {
            if i == 0 {
                return Err(DeformationError::InitialBudget(format!(
                    "A {:e}/{:e}, B {:e}/{:e}, C {:e}/{:e}",
                    row.norm_a, row.bound_a, row.norm_b, row.bound_b, row.norm_c, row.bound_c
                )));
            }
            failure = Some(i);
            rows.push(row);
            break;
        }

        // (1) per-mode solves
        let geometry = defect.geometry()?;
        let stage = PerturbationFrame::unchecked(
            rho,
            t_ratio,
            p,
            frame.s(),
            kappa0,
            frame.kappa1(),
            stage_eta.clone(),
        );
        let vr = mean_varrho(&stage, &defect.grid)?;
        let mut h_plus = BTreeMap::new();
        let mut h_minus = BTreeMap::new();
        for m in defect.a.iter().chain(&defect.b) {
            let (mut gp, mut gm) = (m.f_plus.clone(), m.f_minus.clone());
            let scale = m.f_plus.iter().chain(&m.f_minus).map(|z| z.norm()).fold(0.0, f64::max);
            let mut used = 0;
            for it in 1..=200 {
                let np: Vec<C64> = (0..points).map(|j| m.f_plus[j] - gp[j] * vr[j]).collect();
                let nm: Vec<C64> = (0..points).map(|j| m.f_minus[j] - gm[j] * vr[j]).collect();
                let change = np
                    .iter()
                    .zip(&gp)
                    .chain(nm.iter().zip(&gm))
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                gp = np;
                gm = nm;
                used = it;
                if change <= 1e-12 * scale {
                    break;
                }
            }
            row.neumann_steps = row.neumann_steps.max(used);
            let sol = radial_bvp_solve(&geometry, (m.k, m.l as f64), (&gp, &gm), true)?;
            if m.k == 0 {
                let f = lead_factor(m.l);
                *h_plus.entry(m.l).or_insert(ZERO) += sol.inner.0 * f;
                *h_minus.entry(m.l).or_insert(ZERO) += sol.inner.1 * f;
            }
        }
        let to_series = |map: &BTreeMap<i64, C64>| {
            let band = map.keys().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
            Series::from_fn(band, |l| map.get(&l).copied().unwrap_or(ZERO))
        };
        let (hp, hm) = (to_series(&h_plus), to_series(&h_minus));

        // (2) leading correction
        let sol = solve_leading_correction(sym, &hp, &hm, &h0, None)?;
        let eta = sol.eta;
        row.eta_c1_proxy = c1_proxy(&eta);
        etas.push(eta.clone());
        rows.push(row);
        let proxies: Vec<f64> = rows.iter().map(|r| r.eta_c1_proxy).collect();
        rows.last_mut().expect("pushed").ratio_fit = fit_ratio(&proxies);

        // (3) next defect at rho_{i+1}
        let next_rho = rho / t_ratio;
        let mut next = DefectSet::zero(next_rho, points)?;
        let cut = Cutoff::new(next_rho / t_ratio, next_rho);
        let s = frame.s();
        let eta_dot = eta.derivative();
        let theta_terms: Vec<TypedLeadingTerm> = j_map_apply(&dominant_term, &eta_dot)?
            .into_iter()
            .map(|t| t.scale(s))
            .collect();
        let i_unit = c64(0.0, 1.0);
        let e_next = TypedLeadingTerm::new(
            0.5,
            0.0,
            dp_dot.convolve(&eta).scale(-i_unit * s),
            dm_dot.convolve(&eta.conj()).scale(-i_unit * s),
        )?;
        // D acting on the t-dependence of a (1/2, 0) term: (d/dt)/i on each coefficient
        let e_dt = TypedLeadingTerm::new(
            0.5,
            0.0,
            e_next.coeff_plus.derivative().scale(-i_unit),
            e_next.coeff_minus.derivative().scale(i_unit),
        )?;
        let class_a = merge(theta_terms.into_iter().chain([e_dt]));
        next.a = next.typed_modes(&class_a, |r| cut.value(r));
        // [D, chi] on (U+, U-) is (chi' U-, -chi' U+)
        let comm = next.typed_modes(&[e_next], |r| cut.d1(r));
        next.b = comm
            .into_iter()
            .map(|m| DefectMode {
                k: m.k,
                l: m.l,
                f_plus: m.f_minus.clone(),
                f_minus: m.f_plus.iter().map(|z| -z).collect(),
            })
            .filter(|m| m.f_plus.iter().chain(&m.f_minus).any(|z| z.norm() > 0.0))
            .collect();
        let stage_next =
            PerturbationFrame::unchecked(next_rho, t_ratio, p, s, kappa0, frame.kappa1(), eta.clone());
        next.c = slice_masses(&stage_next, sym)?;
        defect = next;
        stage_eta = eta;
    }
    Ok(DefectLedger { rows, failure, etas })
}
