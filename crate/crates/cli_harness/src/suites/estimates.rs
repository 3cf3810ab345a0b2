use crate::config::EstimatesConfig;
use crate::generate::expansion;
use crate::report::{Check, SuiteOutput, Table};
use crate::rng::{trial_rng, Stream};
use crate::row;
use cylinder_spinors::{decay_ratio, growth_bound_margin, poincare_check, ProfileClass};
use rand::Rng;

/// Growth margins, decay constant and Poincare ratio on random expansions.
///
/// Trial `i` draws an L^2 expansion for even `i` and an L^2_1 one for odd `i` for the
/// growth bound; decay and Poincare use a fresh L^2_1 expansion per trial.
pub fn run(cfg: &EstimatesConfig, seed: u64) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    let mut table = Table::new("estimates.csv", &["trial", "quantity", "parameter", "value"]);
    let (mut growth, mut decay, mut poincare): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut errors = Vec::new();
    let big_r = cfg.radius;
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(seed, Stream::Estimates, trial as u64);
        let class = if trial % 2 == 0 { ProfileClass::L2Kernel } else { ProfileClass::L21Kernel };
        let e = expansion(&mut rng, class, big_r, cfg.points);
        for k in 0..=3 {
            match growth_bound_margin(&e, k) {
                Ok(m) => {
                    growth = growth.max(m);
                    table.rows.push(row![trial, "growth_margin", k, m]);
                }
                Err(err) => errors.push(format!("trial {trial} growth k={k}: {err}")),
            }
        }
        let e = expansion(&mut rng, ProfileClass::L21Kernel, big_r, cfg.points);
        for j in 1..=3 {
            let r = big_r / f64::from(1 << j);
            match decay_ratio(&e, r, big_r) {
                Ok(c) => {
                    decay = decay.max(c);
                    table.rows.push(row![trial, "decay_constant", r, c]);
                }
                Err(err) => errors.push(format!("trial {trial} decay r={r}: {err}")),
            }
        }
        let r = rng.random_range(0.1..1.0) * big_r;
        match poincare_check(&e, r) {
            Ok(q) => {
                poincare = poincare.max(q);
                table.rows.push(row![trial, "poincare_ratio", r, q]);
            }
            Err(err) => errors.push(format!("trial {trial} poincare r={r}: {err}")),
        }
    }
    let with_errors = |name: &str, check: Check| {
        if errors.is_empty() {
            check
        } else {
            Check::failed(name, errors.join("; "))
        }
    };
    out.checks.push(with_errors(
        "growth_margin",
        Check::at_most("growth_margin", growth, 1.0, "largest margin over k = 0..3"),
    ));
    out.checks.push(with_errors(
        "decay_constant",
        Check::at_most(
            "decay_constant",
            decay,
            cfg.decay_c_max,
            "fitted C over r = R/2, R/4, R/8",
        ),
    ));
    out.checks.push(with_errors(
        "poincare_ratio",
        Check::at_most("poincare_ratio", poincare, 1.0, "largest ratio"),
    ));
    out.tables.push(table);
    out
}
