use crate::config::SqueezeConfig;
use crate::generate::{annihilated, complex, high_series, rel, symbol, tuple};
use crate::report::{Check, SuiteOutput, Table};
use crate::rng::{trial_rng, Stream};
use crate::row;
use fourier_core::IndexedPairs;
use fredholm_t::{
    apply_T, bracket, commutator_threshold, high_mode_injectivity, high_mode_lower_bound, squeeze, Side,
};
use rand::Rng;

/// Support of the annihilated test data.
const TOP: i64 = 24;

fn recovery(cfg: &SqueezeConfig, seed: u64, out: &mut SuiteOutput) {
    let mut table = Table::new("high_modes.csv", &["symbol", "input", "M", "L", "recovery_error", "residual"]);
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for s in 0..cfg.symbols {
        let mut rng = trial_rng(seed, Stream::HighModes, s as u64);
        let m = rng.random_range(0..=cfg.m_max);
        let sym = symbol(&mut rng, m, 0.1);
        let band = 2 * m + 12;
        for i in 0..cfg.inputs {
            let c = high_series(&mut rng, 2 * m, band);
            match high_mode_injectivity(&sym, band, &apply_T(&sym, &c)) {
                Ok(sol) => {
                    let err = rel(&sol.c, &c);
                    worst = worst.max(err).max(sol.residual);
                    table.rows.push(row![s, i, m, band, err, sol.residual]);
                }
                Err(e) => errors.push(format!("symbol {s} input {i}: {e}")),
            }
        }
    }
    out.checks.push(if errors.is_empty() {
        Check::at_most("high_mode_recovery", worst, 1e-9, "worst round-trip error and residual")
    } else {
        Check::failed("high_mode_recovery", errors.join("; "))
    });
    out.tables.push(table);
}

fn tuples(cfg: &SqueezeConfig, seed: u64, out: &mut SuiteOutput) {
    let mut table = Table::new(
        "squeeze.csv",
        &["trial", "p", "forced", "steps", "det_ratio", "annihilation", "span_error"],
    );
    let mut worst_det = f64::INFINITY;
    let mut worst_ann: f64 = 0.0;
    let mut forced_count = 0;
    let mut errors = Vec::new();
    for trial in 0..cfg.tuples {
        let mut rng = trial_rng(seed, Stream::Tuples, trial as u64);
        let p = rng.random_range(cfg.p_min..=cfg.p_max);
        let forced = trial % cfg.forced_every == 0;
        forced_count += usize::from(forced);
        let a = tuple(&mut rng, p, forced);
        let s = match squeeze(&a) {
            Ok(s) => s,
            Err(e) => {
                errors.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        let det_ratio = s.det.norm() / s.scale;
        worst_det = worst_det.min(det_ratio);
        let Some(v) = annihilated(&a, TOP, &mut rng) else {
            errors.push(format!("trial {trial}: no annihilated data"));
            continue;
        };
        let vn = v.values().map(|x| x.norm().powi(2)).sum::<f64>().sqrt();
        let reach = s.rhs_b.max_shift().max(s.rhs_b_star.max_shift()) as i64;
        let last = TOP - p as i64 - reach;
        let ann = (1..=last)
            .map(|m| bracket(&s.b, &v, m).norm().max(bracket(&s.b_star, &v, m).norm()))
            .fold(0.0, f64::max)
            / vn;
        worst_ann = worst_ann.max(ann);

        // the span relation on arbitrary data
        let hat = a.spouse();
        let w: IndexedPairs<f64> = (1..=TOP)
            .map(|j| (j, fourier_core::Pair::new(complex(&mut rng), complex(&mut rng))))
            .collect();
        let x = |side: Side, m: i64| match side {
            Side::A => bracket(&a, &w, m),
            Side::Hat => bracket(&hat, &w, m),
        };
        let span = (1..=last)
            .map(|m| {
                (bracket(&s.b, &w, m) - s.rhs_b.eval(m, x))
                    .norm()
                    .max((bracket(&s.b_star, &w, m) - s.rhs_b_star.eval(m, x)).norm())
            })
            .fold(0.0, f64::max);
        worst_ann = worst_ann.max(span);
        table.rows.push(row![trial, p, forced, s.steps.len(), det_ratio, ann, span]);
    }
    if !errors.is_empty() {
        out.checks.push(Check::failed("squeeze_determinant", errors.join("; ")));
    } else {
        out.checks.push(Check::at_least(
            "squeeze_determinant",
            worst_det,
            1e-10,
            format!("smallest |det| / scale over {} tuples", cfg.tuples),
        ));
        out.checks.push(Check::at_most(
            "squeeze_annihilation",
            worst_ann,
            1e-10,
            "worst relative bracket of annihilated data and span-relation error",
        ));
        out.checks.push(Check::at_least(
            "squeeze_forced_starts",
            forced_count as f64,
            5f64.min(cfg.tuples as f64),
            "degenerate starts",
        ));
    }
    out.tables.push(table);
}

fn lower_bounds(cfg: &SqueezeConfig, seed: u64, out: &mut SuiteOutput) {
    let mut table = Table::new(
        "lower_bound.csv",
        &["symbol", "M", "cut", "band", "sigma_band", "sigma_double", "drift", "probe_ratio"],
    );
    let (mut smallest, mut drift, mut probe) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut errors = Vec::new();
    for s in 0..cfg.lower_bound_symbols {
        let mut rng = trial_rng(seed, Stream::LowerBound, s as u64);
        let m = rng.random_range(1..=2);
        let sym = symbol(&mut rng, m, cfg.lower_bound_tau);
        let cut = commutator_threshold(&sym);
        match high_mode_lower_bound(&sym, cut, 4) {
            Ok(b) => {
                smallest = smallest.min(b.value);
                drift = drift.max(b.drift());
                probe = probe.max(b.probe_ratio);
                table.rows.push(row![s, m, cut, b.band, b.sigma_band, b.sigma_double, b.drift(), b.probe_ratio]);
            }
            Err(e) => errors.push(format!("symbol {s}: {e}")),
        }
    }
    if errors.is_empty() {
        out.checks.push(Check::at_least(
            "lower_bound_positive",
            smallest,
            f64::MIN_POSITIVE,
            "smallest restricted singular value",
        ));
        out.checks.push(Check::at_most(
            "lower_bound_drift",
            drift,
            0.25,
            "largest relative change under truncation doubling",
        ));
        out.checks.push(Check::at_most(
            "lower_bound_probe",
            probe,
            1.0 + 1e-12,
            "largest sigma |c| / |Tc| over probe series",
        ));
    } else {
        out.checks.push(Check::failed("lower_bound_positive", errors.join("; ")));
    }
    out.tables.push(table);
}

/// High-mode recovery, squeezing on random and forced-degenerate tuples, and the
/// restricted lower bound.
pub fn run(cfg: &SqueezeConfig, seed: u64) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    recovery(cfg, seed, &mut out);
    tuples(cfg, seed, &mut out);
    lower_bounds(cfg, seed, &mut out);
    out
}
