//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use cli_harness::{run, validate_config, ExperimentConfig, SuiteOutput};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

const SEED: u64 = 7;

fn config(command: &str) -> ExperimentConfig {
    validate_config(&format!(r#"{{"command": "{command}", "seed": {SEED}}}"#)).expect("default config")
}

fn timed(cfg: &ExperimentConfig) -> (SuiteOutput, Duration) {
    let t = Instant::now();
    let out = run(cfg);
    (out, t.elapsed())
}

struct Criterion {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn from_checks(name: &'static str, out: &SuiteOutput, checks: &[&str]) -> Criterion {
    let mut pass = true;
    let mut parts = Vec::new();
    for &c in checks {
        match out.check(c) {
            Some(c) => {
                pass &= c.pass;
                parts.push(format!("{} {:e} (bound {:e})", c.name, c.measured, c.bound));
            }
            None => {
                pass = false;
                parts.push(format!("{c} missing"));
            }
        }
    }
    Criterion {
        name,
        pass,
        detail: parts.join(", "),
    }
}

fn with_runtime(mut c: Criterion, took: Duration, limit: Duration) -> Criterion {
    c.pass &= took <= limit;
    c.detail += &format!(", runtime {:.1} s (limit {} s)", took.as_secs_f64(), limit.as_secs());
    c
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let p = e.expect("dir entry").path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).expect("read"))
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Criterion {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, format!(r#"{{"seed": {SEED}}}"#)).expect("write config");
    let out = dir.path().join("out");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let status = Command::new(env!("CARGO_BIN_EXE_z2spinor"))
            .arg("index-scan")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .expect("spawn z2spinor")
            .status;
        runs.push((status.code(), read_all(&out)));
        std::fs::remove_dir_all(&out).expect("clear output");
    }
    let same = runs[0] == runs[1];
    let names: Vec<&str> = runs[0].1.iter().map(|(n, _)| n.as_str()).collect();
    Criterion {
        name: "determinism",
        pass: same && runs[0].0 == Some(0) && names.contains(&"index_scan.csv"),
        detail: format!("two runs, seed {SEED}: {names:?} byte-identical = {same}"),
    }
}

fn main() -> ExitCode {
    let mut results = Vec::new();

    let scan_cfg = config("index-scan");
    assert_eq!((scan_cfg.index_scan.trials, scan_cfg.index_scan.m_max), (50, 4));
    assert_eq!(scan_cfg.index_scan.tau_min, 0.1);
    assert_eq!((scan_cfg.index_scan.adjoint_pairs, scan_cfg.index_scan.adjoint_band), (10, 16));
    let (scan, took) = timed(&scan_cfg);
    results.push(with_runtime(
        from_checks("index zero across bands", &scan, &["index_zero"]),
        took,
        Duration::from_secs(60),
    ));
    results.push(from_checks("kernel dimension bound", &scan, &["kernel_bound"]));
    results.push(from_checks("constant symbol oracle", &scan, &["constant_symbol"]));

    let modes_cfg = config("modes");
    assert_eq!((modes_cfg.modes.k_max, modes_cfg.modes.l_max, modes_cfg.modes.points), (5, 5, 512));
    assert_eq!(modes_cfg.modes.radius, 1.0);
    let (modes, _) = timed(&modes_cfg);
    results.push(from_checks(
        "harmonic Bessel modes",
        &modes,
        &["harmonic_residual", "residual_refinement"],
    ));

    let est_cfg = config("estimates");
    assert_eq!(est_cfg.estimates.trials, 20);
    assert_eq!(est_cfg.estimates.decay_c_max, 10.0);
    let (est, _) = timed(&est_cfg);
    results.push(from_checks("growth bounds", &est, &["growth_margin"]));
    results.push(from_checks("interior decay", &est, &["decay_constant"]));
    results.push(from_checks("Poincare inequality", &est, &["poincare_ratio"]));

    results.push(from_checks("adjoint identity", &scan, &["adjoint_identity"]));

    let sq_cfg = config("squeeze-demo");
    assert_eq!((sq_cfg.squeeze.symbols, sq_cfg.squeeze.inputs, sq_cfg.squeeze.tuples), (10, 10, 20));
    assert_eq!((sq_cfg.squeeze.lower_bound_symbols, sq_cfg.squeeze.lower_bound_tau), (10, 0.5));
    let (sq, _) = timed(&sq_cfg);
    results.push(from_checks("high-mode recovery", &sq, &["high_mode_recovery"]));
    results.push(from_checks(
        "squeezing",
        &sq,
        &["squeeze_determinant", "squeeze_annihilation", "squeeze_forced_starts"],
    ));
    results.push(from_checks(
        "restricted lower bound",
        &sq,
        &["lower_bound_positive", "lower_bound_drift", "lower_bound_probe"],
    ));

    let def_cfg = config("deform");
    assert_eq!((def_cfg.deform.terms, def_cfg.deform.s_fraction), (20, 0.5));
    let (def, _) = timed(&def_cfg);
    results.push(from_checks(
        "type algebra",
        &def,
        &["type_algebra_forbidden", "type_algebra_ratio", "type_algebra_norm"],
    ));

    let it_cfg = config("iterate");
    assert_eq!((it_cfg.frame.t, it_cfg.frame.p, it_cfg.frame.s), (16.0, 2.0, 1e-3));
    assert_eq!((it_cfg.iterate.steps, it_cfg.iterate.ratio_slack), (8, 1.5));
    let (it, took) = timed(&it_cfg);
    results.push(with_runtime(
        from_checks("iteration decay", &it, &["iteration_budgets", "iteration_ratio"]),
        took,
        Duration::from_secs(120),
    ));

    results.push(determinism());

    for (i, c) in results.iter().enumerate() {
        println!("{} {:>2} {}: {}", if c.pass { "PASS" } else { "FAIL" }, i + 1, c.name, c.detail);
    }
    let failed = results.iter().filter(|c| !c.pass).count();
    println!("acceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
