use deformation::radial::source_residual;
use deformation::{
    iterate, parameter_window, radial_bvp_solve, Cutoff, DefectMode, DefectSet, DeformationError, PerturbationFrame,
};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use fourier_core::{c64, Series, C64};
use fredholm_t::SymbolPair;

const POINTS: usize = 512;

fn unit_symbol() -> SymbolPair {
    SymbolPair::constant(c64(1.0, 0.0), c64(1.0, 0.0)).unwrap()
}

fn frame(s: f64) -> PerturbationFrame {
    let (frak_r, t_ratio) = (0.25, 16.0);
    let k1 = PerturbationFrame::kappa1_from_kappa0(frak_r, t_ratio, 1.0);
    PerturbationFrame::new(1.0, frak_r, t_ratio, 2.0, s, 1.0, k1, Series::zeros(1)).unwrap()
}

/// One `k = 0` class-A mode at frequency `l`: `amp * bump(r)` in `f+`.
fn single_mode(radius: f64, l: i64, amp: C64) -> DefectSet {
    let mut d = DefectSet::zero(radius, POINTS).unwrap();
    let (a, b) = (0.3 * radius, 0.9 * radius);
    let prof: Vec<C64> = d
        .grid
        .iter()
        .map(|&r| {
            if r <= a || r >= b {
                return c64(0.0, 0.0);
            }
            let x = (r - a) / (b - a);
            amp * (x * (1.0 - x)).powi(3)
        })
        .collect();
    d.a.push(DefectMode {
        k: 0,
        l,
        f_plus: prof,
        f_minus: vec![c64(0.0, 0.0); d.grid.len()],
    });
    d
}

#[test]
fn zero_defect_gives_zero_ledger() {
    let d = DefectSet::zero(0.25, POINTS).unwrap();
    let ledger = iterate(&d, &unit_symbol(), &frame(1e-3), 4).unwrap();
    assert_eq!(ledger.rows.len(), 4);
    for r in &ledger.rows {
        assert_eq!((r.norm_a, r.norm_b, r.norm_c, r.eta_c1_proxy), (0.0, 0.0, 0.0, 0.0));
    }
    assert!(ledger.all_within());
}

fn run_single() -> (DefectSet, deformation::DefectLedger) {
    let d = single_mode(0.25, 1, c64(1.0, 0.0));
    let ledger = iterate(&d, &unit_symbol(), &frame(1e-3), 8).unwrap();
    (d, ledger)
}

#[test]
fn single_mode_decays_within_budgets() {
    let (_, ledger) = run_single();
    assert_eq!(ledger.rows.len(), 8);
    assert_eq!(ledger.failure, None);
    assert!(ledger.all_within());
    let ratio = ledger.fitted_ratio().unwrap();
    assert!(ratio <= 1.5 * 2.0 / 16.0, "fitted ratio {ratio}");
}

/// Dense least squares for `eta` from `eta + c = -2 h+`, `conj(eta) + c^aps = -2 h-`.
fn dense_eta(hp: &Series, hm: &Series, band: usize) -> Series {
    let n = Series::real_dim(band);
    let forward = |x: &[f64]| -> Vec<f64> {
        let eta = Series::from_real(band, &x[..n]).unwrap();
        let c = Series::from_real(band, &x[n..]).unwrap();
        let a = &eta + &c;
        let b = &eta.conj() + &c.aps();
        a.realify().into_iter().chain(b.realify()).collect()
    };
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..2 * n {
        let mut e = vec![0.0; 2 * n];
        e[j] = 1.0;
        m.column_mut(j).copy_from_slice(&forward(&e));
    }
    let rhs: Vec<f64> = (&hp.with_band(band) * -2.0)
        .realify()
        .into_iter()
        .chain((&hm.with_band(band) * -2.0).realify())
        .collect();
    let x = m.svd(true, true).solve(&DVector::from_vec(rhs), 1e-12).unwrap();
    Series::from_real(band, &x.as_slice()[..n]).unwrap()
}

#[test]
fn first_steps_match_dense_solves() {
    let (d, ledger) = run_single();
    // step 1: the mode solve, checked as a right inverse
    let g = d.geometry().unwrap();
    let m = &d.a[0];
    let sol = radial_bvp_solve(&g, (0, 1.0), (&m.f_plus, &m.f_minus), true).unwrap();
    let res = source_residual(g.grid(), (0, 1.0), (&sol.u_plus, &sol.u_minus), (&m.f_plus, &m.f_minus)).unwrap();
    assert!(res <= 1e-8, "{res}");
    // r^{-1/2} coefficient of the l != 0 family is sqrt(2/pi)
    let lead = (2.0 / PI).sqrt();
    let hp = Series::monomial(1, sol.inner.0 * lead);
    let hm = Series::monomial(1, sol.inner.1 * lead);
    // step 2: dense solve of the leading equations
    let eta = dense_eta(&hp, &hm, 8);
    let got = &ledger.etas[0];
    let n = got.band_limit().max(8);
    let err = (&got.with_band(n) - &eta.with_band(n)).l2_norm() / eta.l2_norm();
    assert!(err <= 1e-9, "{err}");

    // row 1 class A: s J(1, 1; eta') under the cutoff, norm rho ||f||_{L^2(N_rho)} in closed form
    let (s, rho) = (1e-3, 0.25 / 16.0);
    let ed = eta.derivative();
    let coeff_mass = 2.0 * ed.norm_sqr_coeffs() * s * s;
    let cut = Cutoff::new(rho / 16.0, rho);
    let radial = gauss_legendre(0.0, rho, 400, |r| cut.value(r).powi(2) * r * r);
    let want = rho * (4.0 * PI * PI * coeff_mass * radial).sqrt();
    let row = &ledger.rows[1];
    assert!((row.norm_a - want).abs() <= 1e-3 * want, "{} vs {want}", row.norm_a);
    assert_eq!(row.norm_b, 0.0);
}

fn gauss_legendre(a: f64, b: f64, pieces: usize, f: impl Fn(f64) -> f64) -> f64 {
    let x = [-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831, 0.906179845938664];
    let w = [0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891];
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|p| {
            let c = a + h * (p as f64 + 0.5);
            x.iter().zip(w).map(|(xi, wi)| wi * f(c + 0.5 * h * xi)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

#[test]
fn cauchy_tail_bound() {
    let (_, ledger) = run_single();
    for n in 0..6 {
        let (tail, bound) = ledger.cauchy_tail(n).unwrap();
        assert!(tail <= bound, "n = {n}: {tail} > {bound}");
    }
}

#[test]
fn csv_layout() {
    let (_, ledger) = run_single();
    let csv = ledger.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "i,norm_A,bound_A,norm_B,bound_B,norm_C,bound_C,eta_c1_proxy,ratio_fit"
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows[0].ends_with(','), "no fit on the first row");
    for (i, r) in rows.iter().enumerate() {
        let cells: Vec<&str> = r.split(',').collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[0], i.to_string());
        for c in &cells[1..8] {
            let v: f64 = c.parse().unwrap();
            assert_eq!(v.to_string(), *c, "shortest round-trip form");
        }
    }
}

#[test]
fn over_budget_initial_defect_is_rejected() {
    let d = single_mode(0.25, 1, c64(1e4, 0.0));
    assert!(matches!(
        iterate(&d, &unit_symbol(), &frame(1e-3), 2),
        Err(DeformationError::InitialBudget(_))
    ));
}

#[test]
fn windows() {
    assert!(parameter_window(16.0, 2.0, false).is_ok());
    assert!(parameter_window(8.0, 3.0, true).is_err());
    assert!(parameter_window(4.0, 2.0, false).is_err());
    assert!(parameter_window(1024.0, 3.5, true).is_ok());
}
