use crate::config::{strict_window_message, ExperimentConfig};
use deformation::parameter_window;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// One checked invariant: `pass` iff `measured` meets `bound` in the stated sense.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    pub fn at_most(name: &str, measured: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: measured <= bound,
            measured,
            bound,
            detail: detail.into(),
        }
    }

    pub fn at_least(name: &str, measured: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: measured >= bound,
            measured,
            bound,
            detail: detail.into(),
        }
    }

    /// A failure that produced no number (an error from a solver, say).
    pub fn failed(name: &str, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: false,
            measured: f64::NAN,
            bound: f64::NAN,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&'static str]) -> Self {
        Self {
            file: file.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }
}

/// Row builder: floats in shortest round-trip form.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    /// Extra JSON files, `(name, pretty JSON)`.
    pub json: Vec<(String, String)>,
}

impl SuiteOutput {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }
}

#[derive(Serialize)]
struct Regime {
    admissible: bool,
    message: String,
}

#[derive(Serialize)]
struct Regimes {
    active: &'static str,
    relaxed: Regime,
    strict: Regime,
}

#[derive(Serialize)]
struct Report<'a> {
    command: String,
    pass: bool,
    regimes: Regimes,
    checks: &'a [Check],
    files: Vec<String>,
    config: &'a ExperimentConfig,
}

fn regimes(cfg: &ExperimentConfig) -> Regimes {
    let (t, p) = (cfg.frame.t, cfg.frame.p);
    let relaxed = match parameter_window(t, p, false) {
        Ok(()) => Regime {
            admissible: true,
            message: format!("T = {t}, P = {p}: 1 < P < T"),
        },
        Err(m) => Regime {
            admissible: false,
            message: m,
        },
    };
    let strict = match strict_window_message(t, p) {
        None => Regime {
            admissible: true,
            message: format!("T = {t}, P = {p} inside the strict window"),
        },
        Some(m) => Regime {
            admissible: false,
            message: m,
        },
    };
    Regimes {
        active: if cfg.strict { "strict" } else { "relaxed" },
        relaxed,
        strict,
    }
}

/// The bytes of `report.json`.
pub fn report_json(cfg: &ExperimentConfig, out: &SuiteOutput) -> String {
    let mut files: Vec<String> = out.tables.iter().map(|t| t.file.clone()).collect();
    files.extend(out.json.iter().map(|(n, _)| n.clone()));
    let report = Report {
        command: cfg.command.to_string(),
        pass: out.pass(),
        regimes: regimes(cfg),
        checks: &out.checks,
        files,
        config: cfg,
    };
    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
}

/// Write `report.json`, every CSV and every extra JSON file into `dir`.
pub fn emit_report(dir: &Path, cfg: &ExperimentConfig, out: &SuiteOutput) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> std::io::Result<()> {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    for t in &out.tables {
        put(&t.file, &t.to_csv())?;
    }
    for (name, body) in &out.json {
        put(name, body)?;
    }
    put("report.json", &report_json(cfg, out))?;
    Ok(written)
}
