use crate::config::IndexScanConfig;
use crate::generate::{series, symbol};
use crate::report::{Check, SuiteOutput, Table};
use crate::rng::{trial_rng, Stream};
use crate::row;
use fourier_core::c64;
use fredholm_t::{apply_T, apply_T_star, t_diagnostics, SymbolPair};
use rand::Rng;

pub const HEADER: [&str; 9] = [
    "trial_id",
    "M",
    "L",
    "tau",
    "dim_ker",
    "dim_coker",
    "index",
    "sigma_min_positive",
    "stable",
];

/// Index, kernel bound and constant-symbol oracle at bands `L` and `2L`, plus the
/// adjoint identity on random pairs.
pub fn run(cfg: &IndexScanConfig, seed: u64) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    let mut table = Table::new("index_scan.csv", &HEADER);
    let mut nonzero_index = 0;
    let mut band_mismatch = 0;
    let mut unstable = 0;
    let mut worst_excess = i64::MIN;
    let mut errors = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(seed, Stream::IndexScan, trial as u64);
        let m = rng.random_range(0..=cfg.m_max);
        let sym = symbol(&mut rng, m, cfg.tau_min);
        let band = cfg.band_per_m * m + cfg.band_min;
        let mut dims = Vec::new();
        for l in [band, 2 * band] {
            match t_diagnostics(&sym, l) {
                Ok(d) => {
                    table.rows.push(row![
                        trial,
                        m,
                        l,
                        sym.tau(),
                        d.dim_ker,
                        d.dim_coker,
                        d.index,
                        d.sigma_min_positive,
                        d.stable.unwrap_or(false)
                    ]);
                    if d.stable != Some(true) {
                        unstable += 1;
                    }
                    if d.index != 0 {
                        nonzero_index += 1;
                    }
                    worst_excess = worst_excess.max(d.dim_ker as i64 - (4 * m + 2) as i64);
                    dims.push((d.dim_ker, d.dim_coker));
                }
                Err(e) => errors.push(format!("trial {trial} band {l}: {e}")),
            }
        }
        if dims.len() == 2 && dims[0] != dims[1] {
            band_mismatch += 1;
        }
    }
    let detail = |extra: String| {
        if errors.is_empty() {
            extra
        } else {
            format!("{extra}; errors: {}", errors.join("; "))
        }
    };
    let failures = nonzero_index + band_mismatch + unstable + errors.len();
    out.checks.push(Check::at_most(
        "index_zero",
        failures as f64,
        0.0,
        detail(format!(
            "{} trials: {nonzero_index} nonzero indices, {band_mismatch} band mismatches, {unstable} unstable rows",
            cfg.trials
        )),
    ));
    out.checks.push(Check::at_most(
        "kernel_bound",
        worst_excess as f64,
        0.0,
        detail("largest dim_ker - (4M + 2)".into()),
    ));

    let one = SymbolPair::constant(c64(1.0, 0.0), c64(1.0, 0.0)).expect("tau = 2");
    let dims: Vec<_> = [cfg.band_min, 2 * cfg.band_min]
        .iter()
        .map(|&l| t_diagnostics(&one, l).map(|d| d.dim_ker + d.dim_coker))
        .collect();
    out.checks.push(match dims.iter().cloned().collect::<Result<Vec<_>, _>>() {
        Ok(v) => Check::at_most(
            "constant_symbol",
            v.iter().sum::<usize>() as f64,
            0.0,
            "dim_ker + dim_coker over both bands for d+ = d- = 1",
        ),
        Err(e) => Check::failed("constant_symbol", e.to_string()),
    });

    let mut worst: f64 = 0.0;
    let n = cfg.adjoint_band + 3;
    for trial in 0..cfg.adjoint_pairs {
        let mut rng = trial_rng(seed, Stream::Adjoint, trial as u64);
        let sym = symbol(&mut rng, 3, cfg.tau_min);
        let c = series(&mut rng, cfg.adjoint_band);
        let k = series(&mut rng, cfg.adjoint_band);
        let lhs = apply_T(&sym, &c).with_band(n).real_inner(&k.with_band(n));
        let rhs = c.with_band(n).real_inner(&apply_T_star(&sym, &k).with_band(n));
        worst = worst.max((lhs - rhs).abs() / (c.l2_norm() * k.l2_norm()));
    }
    out.checks.push(Check::at_most(
        "adjoint_identity",
        worst,
        1e-10,
        format!("max |<Tc,k> - <c,T*k>| / (|c||k|) over {} pairs", cfg.adjoint_pairs),
    ));
    out.tables.push(table);
    out
}
