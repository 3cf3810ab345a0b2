use clap::Parser;
use cli_harness::{emit_report, run, validate_config, Command};
use std::path::PathBuf;
use std::process::ExitCode;

/// Seeded numerical suites with CSV and JSON reports.
#[derive(Parser)]
#[command(name = "z2spinor", version)]
struct Cli {
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Enforce the strict (T, P) window.
    #[arg(long)]
    strict: bool,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("z2spinor: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let raw = match std::fs::read_to_string(&cli.config) {
        Ok(s) => s,
        Err(e) => return usage(format!("{}: {e}", cli.config.display())),
    };
    let mut value: serde_json::Value = match serde_json::from_str(&raw) {
        Ok(v) => v,
        Err(e) => return usage(format!("config: {e}")),
    };
    let Some(obj) = value.as_object_mut() else {
        return usage("config: expected a JSON object");
    };
    let name = cli.command.to_string();
    match obj.get("command").and_then(|c| c.as_str()) {
        Some(c) if c != name => return usage(format!("config is for `{c}`, not `{name}`")),
        _ => {
            obj.insert("command".into(), name.into());
        }
    }
    if let Some(seed) = cli.seed {
        obj.insert("seed".into(), seed.into());
    }
    if let Some(out) = &cli.out {
        obj.insert("output_dir".into(), out.display().to_string().into());
    }
    if cli.strict {
        obj.insert("strict".into(), true.into());
    }
    let cfg = match validate_config(&value.to_string()) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };

    let out = run(&cfg);
    for c in &out.checks {
        println!(
            "{} {}: {:e} (bound {:e}) {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.bound,
            c.detail
        );
    }
    if let Err(e) = emit_report(std::path::Path::new(&cfg.output_dir), &cfg, &out) {
        return usage(format!("writing {}: {e}", cfg.output_dir));
    }
    if out.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
