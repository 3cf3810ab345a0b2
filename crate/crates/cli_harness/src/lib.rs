//! Configuration, seeded suites and report files behind the `z2spinor` binary.

pub mod config;
pub mod generate;
pub mod report;
pub mod rng;
pub mod suites;

pub use config::{validate_config, Command, ConfigError, ExperimentConfig};
pub use report::{emit_report, report_json, Check, SuiteOutput, Table};

/// Run the suite named by `cfg.command`. The config must already be validated.
pub fn run(cfg: &ExperimentConfig) -> SuiteOutput {
    match cfg.command {
        Command::IndexScan => suites::index_scan::run(&cfg.index_scan, cfg.seed),
        Command::Modes => suites::modes::run(&cfg.modes),
        Command::Estimates => suites::estimates::run(&cfg.estimates, cfg.seed),
        Command::SqueezeDemo => suites::squeeze::run(&cfg.squeeze, cfg.seed),
        Command::Deform => suites::deform::run(&cfg.deform, &cfg.frame, cfg.seed),
        Command::Iterate => suites::iterate::run(&cfg.iterate, &cfg.frame),
    }
}
