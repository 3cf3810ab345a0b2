use crate::config::{DeformConfig, FrameConfig};
use crate::generate::{series, symbol};
use crate::report::{Check, SuiteOutput, Table};
use crate::rng::{trial_rng, Stream};
use crate::row;
use deformation::{
    decomposition_norm_budget, eprime_series, solve_leading_correction, DeformationError, PerturbationFrame,
    TypedLeadingTerm,
};
use fredholm_t::cokernel_complement;
use rand_chacha::ChaCha8Rng;

/// Frame with a random band-3 `eta` at 90% of the frame bounds and `s` at the given
/// fraction of the threshold.
fn random_frame(rng: &mut ChaCha8Rng, f: &FrameConfig, fraction: f64) -> Result<PerturbationFrame, DeformationError> {
    let raw = series(rng, 3);
    let n = [
        raw.l2_norm() / (f.frak_r * f.frak_r),
        raw.derivative().l2_norm() / f.frak_r,
        raw.derivative().derivative().l2_norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let eta = &raw * (0.9 * f.kappa0 / n);
    let k1 = f.kappa1();
    let thr = PerturbationFrame::unchecked(f.frak_r, f.t, f.p, 0.0, f.kappa0, k1, eta.clone()).s_threshold();
    PerturbationFrame::new(f.big_r, f.frak_r, f.t, f.p, fraction * thr, f.kappa0, k1, eta)
}

fn typed(cfg: &DeformConfig, frame_cfg: &FrameConfig, seed: u64, out: &mut SuiteOutput) {
    let mut table = Table::new(
        "eprime.csv",
        &["trial", "seed_type", "terms", "types_seen", "worst_ratio", "norm_12", "kappa1", "converged"],
    );
    let mut budgets = Table::new("budget.csv", &["trial", "quantity", "measured", "budget"]);
    let mut forbidden = 0;
    let (mut ratio, mut norm): (f64, f64) = (0.0, 0.0);
    let mut budget_ratio: f64 = 0.0;
    let mut errors = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(seed, Stream::Typed, trial as u64);
        let frame = match random_frame(&mut rng, frame_cfg, cfg.s_fraction) {
            Ok(f) => f,
            Err(e) => {
                errors.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        match decomposition_norm_budget(&frame) {
            Ok(b) => {
                budgets.rows.push(row![trial, "R_s", b.r_measured, b.r_budget]);
                budgets.rows.push(row![trial, "varrho", b.varrho_sup, b.varrho_budget]);
                for s in &b.slices {
                    budgets.rows.push(row![trial, format!("A_s slice r0={}", s.r0), s.measured, s.budget]);
                }
                budget_ratio = budget_ratio.max(b.ratios().into_iter().fold(0.0, f64::max));
            }
            Err(e) => errors.push(format!("trial {trial} budget: {e}")),
        }
        for (a, b) in [(0.5, 0.0), (0.0, 0.5)] {
            let q = series(&mut rng, 2);
            let q = &q * (frame.kappa1() / (2.0 * q.l2_norm()));
            let seed_term = TypedLeadingTerm::new(a, b, q.clone(), q.conj()).expect("admissible seed type");
            match eprime_series(&seed_term, &frame, cfg.terms) {
                Ok(e) => {
                    if e.types_seen.iter().any(|&(a, _)| a == -1.0) {
                        forbidden += 1;
                    }
                    let worst = e.ratios().into_iter().filter(|r| r.is_finite()).fold(0.0, f64::max);
                    ratio = ratio.max(worst);
                    norm = norm.max(e.norm_12 / frame.kappa1());
                    let types: Vec<String> = e.types_seen.iter().map(|(a, b)| format!("({a} {b})")).collect();
                    table.rows.push(row![
                        trial,
                        format!("({a} {b})"),
                        e.diffs.len() - 1,
                        types.join(" "),
                        worst,
                        e.norm_12,
                        frame.kappa1(),
                        e.converged
                    ]);
                }
                Err(DeformationError::ForbiddenType { step }) => {
                    forbidden += 1;
                    errors.push(format!("trial {trial}: a = -1 at step {step}"));
                }
                Err(e) => errors.push(format!("trial {trial}: {e}")),
            }
        }
    }
    let detail = |d: &str| {
        if errors.is_empty() {
            d.to_string()
        } else {
            format!("{d}; errors: {}", errors.join("; "))
        }
    };
    let ok = errors.is_empty();
    let gate = |c: Check| if ok { c } else { Check { pass: false, ..c } };
    out.checks.push(gate(Check::at_most(
        "type_algebra_forbidden",
        forbidden as f64,
        0.0,
        detail("terms of type a = -1 produced"),
    )));
    out.checks.push(gate(Check::at_most(
        "type_algebra_ratio",
        ratio,
        0.5,
        detail("worst successive-term norm ratio"),
    )));
    out.checks.push(gate(Check::at_most(
        "type_algebra_norm",
        norm,
        2.0,
        detail("largest ||e'|| / kappa1"),
    )));
    out.checks.push(gate(Check::at_most(
        "decomposition_budget",
        budget_ratio,
        1.0,
        detail("largest measured / budget over R_s, varrho and the A_s slices"),
    )));
    out.tables.push(table);
    out.tables.push(budgets);
}

fn leading(cfg: &DeformConfig, seed: u64, out: &mut SuiteOutput) {
    let mut table = Table::new("leading.csv", &["trial", "M", "residual", "scale"]);
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for trial in 0..cfg.leading_trials {
        let mut rng = trial_rng(seed, Stream::Leading, trial as u64);
        let m = 1 + trial % 2;
        let sym = symbol(&mut rng, m, 0.5);
        let (hp, hm) = (series(&mut rng, 4), series(&mut rng, 4));
        let scale = hp.l2_norm() + hm.l2_norm();
        let sol = cokernel_complement(&sym, 2 * m + 1)
            .map_err(DeformationError::from)
            .and_then(|h0| solve_leading_correction(&sym, &hp, &hm, &h0, None));
        match sol {
            Ok(s) => {
                worst = worst.max(s.residual() / scale);
                table.rows.push(row![trial, m, s.residual(), scale]);
            }
            Err(e) => errors.push(format!("trial {trial}: {e}")),
        }
    }
    out.checks.push(if errors.is_empty() {
        Check::at_most("leading_residual", worst, deformation::SOLVER_TOL, "worst relative residual")
    } else {
        Check::failed("leading_residual", errors.join("; "))
    });
    out.tables.push(table);
}

/// Leading-correction solves, decomposition budgets and the `e'` type algebra.
pub fn run(cfg: &DeformConfig, frame: &FrameConfig, seed: u64) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    leading(cfg, seed, &mut out);
    typed(cfg, frame, seed, &mut out);
    out
}
