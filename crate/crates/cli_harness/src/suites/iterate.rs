use crate::config::{FrameConfig, IterateConfig};
use crate::report::{Check, SuiteOutput, Table};
use deformation::{iterate, DefectMode, DefectSet, DeformationError};
use fourier_core::c64;
use fredholm_t::SymbolPair;

/// One `k = 0` class-A source `amp (x(1-x))^3` on `[0.3 rho, 0.9 rho]`.
pub fn single_mode(radius: f64, points: usize, l: i64, amp: f64) -> Result<DefectSet, DeformationError> {
    let mut d = DefectSet::zero(radius, points)?;
    let (a, b) = (0.3 * radius, 0.9 * radius);
    let f_plus = d
        .grid
        .iter()
        .map(|&r| {
            if r <= a || r >= b {
                return c64(0.0, 0.0);
            }
            let x = (r - a) / (b - a);
            c64(amp * (x * (1.0 - x)).powi(3), 0.0)
        })
        .collect();
    let n = d.grid.len();
    d.a.push(DefectMode {
        k: 0,
        l,
        f_plus,
        f_minus: vec![c64(0.0, 0.0); n],
    });
    Ok(d)
}

/// The leading-term loop with `d+ = d- = 1` from a single class-A mode.
pub fn run(cfg: &IterateConfig, frame_cfg: &FrameConfig) -> SuiteOutput {
    let mut out = SuiteOutput::default();
    let header = [
        "i", "norm_A", "bound_A", "norm_B", "bound_B", "norm_C", "bound_C", "eta_c1_proxy", "ratio_fit",
    ];
    let sym = SymbolPair::constant(c64(1.0, 0.0), c64(1.0, 0.0)).expect("tau = 2");
    let result = frame_cfg.build().and_then(|frame| {
        let d = single_mode(frame_cfg.frak_r, cfg.points, cfg.l, cfg.amplitude)?;
        let ledger = iterate(&d, &sym, &frame, cfg.steps)?;
        Ok((frame, ledger))
    });
    let (frame, ledger) = match result {
        Ok(x) => x,
        Err(e) => {
            out.checks.push(Check::failed("iteration_budgets", e.to_string()));
            out.tables.push(Table::new("ledger.csv", &header));
            return out;
        }
    };
    let mut table = Table::new("ledger.csv", &header);
    match ledger.to_csv() {
        Ok(csv) => {
            table.rows = csv
                .lines()
                .skip(1)
                .map(|l| l.split(',').map(str::to_string).collect())
                .collect();
        }
        Err(e) => out.checks.push(Check::failed("ledger_csv", e.to_string())),
    }
    out.tables.push(table);
    out.json.push((
        "frame.json".into(),
        serde_json::to_string_pretty(&frame.to_json_value()).expect("frame serializes") + "\n",
    ));

    let worst = ledger
        .rows
        .iter()
        .flat_map(|r| {
            [(r.norm_a, r.bound_a), (r.norm_b, r.bound_b), (r.norm_c, r.bound_c)]
        })
        .map(|(n, b)| n / b)
        .fold(0.0, f64::max);
    let mut budgets = Check::at_most(
        "iteration_budgets",
        worst,
        1.0,
        format!("largest norm / budget over {} rows", ledger.rows.len()),
    );
    if let Some(i) = ledger.failure {
        budgets.pass = false;
        budgets.detail += &format!("; stopped at row {i}");
    }
    out.checks.push(budgets);

    let target = frame_cfg.p / frame_cfg.t;
    out.checks.push(match ledger.fitted_ratio() {
        Some(q) => Check::at_most(
            "iteration_ratio",
            q,
            cfg.ratio_slack * target,
            format!("fitted geometric ratio of the eta C^1 proxies against {} P/T", cfg.ratio_slack),
        ),
        None => Check::failed("iteration_ratio", "fewer than two nonzero eta proxies"),
    });
    let tails: Vec<_> = (0..ledger.rows.len()).filter_map(|n| ledger.cauchy_tail(n)).collect();
    let excess = tails.iter().map(|(t, b)| t - b).fold(f64::NEG_INFINITY, f64::max);
    if !tails.is_empty() {
        out.checks.push(Check::at_most(
            "cauchy_tail",
            excess,
            0.0,
            "largest partial-sum tail minus its geometric bound",
        ));
    }
    out
}
