use deformation::{parameter_window, PerturbationFrame};
use fourier_core::Series;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Modes,
    IndexScan,
    SqueezeDemo,
    Deform,
    Iterate,
    Estimates,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::IndexScan => "index-scan",
            Command::SqueezeDemo => "squeeze-demo",
            Command::Deform => "deform",
            Command::Iterate => "iterate",
            Command::Estimates => "estimates",
        }
    }

    /// Commands that build a perturbation frame and so depend on the `(T, P)` regime.
    pub fn uses_frame(self) -> bool {
        matches!(self, Command::Deform | Command::Iterate)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexScanConfig {
    pub trials: usize,
    pub m_max: usize,
    pub tau_min: f64,
    /// Band `L = band_per_m * M + band_min`; the second band is `2L`.
    pub band_per_m: usize,
    pub band_min: usize,
    pub adjoint_pairs: usize,
    pub adjoint_band: usize,
}

impl Default for IndexScanConfig {
    fn default() -> Self {
        Self {
            trials: 50,
            m_max: 4,
            tau_min: 0.1,
            band_per_m: 4,
            band_min: 8,
            adjoint_pairs: 10,
            adjoint_band: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesConfig {
    pub k_max: usize,
    pub l_max: usize,
    pub radius: f64,
    pub points: usize,
    pub amplitude: f64,
}

impl Default for ModesConfig {
    fn default() -> Self {
        Self {
            k_max: 5,
            l_max: 5,
            radius: 1.0,
            points: 512,
            amplitude: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatesConfig {
    pub trials: usize,
    pub radius: f64,
    pub points: usize,
    /// Largest `C` accepted in `||v||^2_{N_r} <= C (r/R)^3 ||v||^2_{N_R}`.
    pub decay_c_max: f64,
}

impl Default for EstimatesConfig {
    fn default() -> Self {
        Self {
            trials: 20,
            radius: 1.0,
            points: 256,
            decay_c_max: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SqueezeConfig {
    pub symbols: usize,
    pub inputs: usize,
    pub m_max: usize,
    pub tuples: usize,
    /// Every `forced_every`-th tuple is made degenerate on purpose.
    pub forced_every: usize,
    pub p_min: usize,
    pub p_max: usize,
    pub lower_bound_symbols: usize,
    pub lower_bound_tau: f64,
}

impl Default for SqueezeConfig {
    fn default() -> Self {
        Self {
            symbols: 10,
            inputs: 10,
            m_max: 3,
            tuples: 20,
            forced_every: 3,
            p_min: 2,
            p_max: 5,
            lower_bound_symbols: 10,
            lower_bound_tau: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameConfig {
    #[serde(rename = "R")]
    pub big_r: f64,
    pub frak_r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub s: f64,
    pub kappa0: f64,
    /// Defaults to the value derived from `kappa0`.
    pub kappa1: Option<f64>,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            big_r: 1.0,
            frak_r: 0.25,
            t: 16.0,
            p: 2.0,
            s: 1e-3,
            kappa0: 1.0,
            kappa1: None,
        }
    }
}

impl FrameConfig {
    pub fn kappa1(&self) -> f64 {
        self.kappa1
            .unwrap_or_else(|| PerturbationFrame::kappa1_from_kappa0(self.frak_r, self.t, self.kappa0))
    }

    /// The frame with `eta = 0`.
    pub fn build(&self) -> Result<PerturbationFrame, deformation::DeformationError> {
        PerturbationFrame::new(
            self.big_r,
            self.frak_r,
            self.t,
            self.p,
            self.s,
            self.kappa0,
            self.kappa1(),
            Series::zeros(0),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeformConfig {
    pub trials: usize,
    /// Steps of the `e'` recursion.
    pub terms: usize,
    /// `s` as a fraction of the frame threshold.
    pub s_fraction: f64,
    pub leading_trials: usize,
}

impl Default for DeformConfig {
    fn default() -> Self {
        Self {
            trials: 5,
            terms: 20,
            s_fraction: 0.5,
            leading_trials: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateConfig {
    pub steps: usize,
    pub points: usize,
    /// Frequency of the single class-A source mode.
    pub l: i64,
    pub amplitude: f64,
    /// Accepted slack on `P/T` for the fitted ratio.
    pub ratio_slack: f64,
}

impl Default for IterateConfig {
    fn default() -> Self {
        Self {
            steps: 8,
            points: 512,
            l: 1,
            amplitude: 1.0,
            ratio_slack: 1.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub index_scan: IndexScanConfig,
    #[serde(default)]
    pub modes: ModesConfig,
    #[serde(default)]
    pub estimates: EstimatesConfig,
    #[serde(default)]
    pub squeeze: SqueezeConfig,
    #[serde(default)]
    pub frame: FrameConfig,
    #[serde(default)]
    pub deform: DeformConfig,
    #[serde(default)]
    pub iterate: IterateConfig,
}

fn default_output_dir() -> String {
    "z2spinor-out".into()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn need(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError(msg()))
    }
}

/// Explanation for a `(T, P)` pair outside the strict window.
pub fn strict_window_message(t: f64, p: f64) -> Option<String> {
    let (lo, hi) = (t.powf(0.125) + 1.0, t.powf(0.2));
    let mut broken = Vec::new();
    if !(t > 512.0) {
        broken.push(format!("T > 512 violated (T = {t})"));
    }
    if !(p > lo) {
        broken.push(format!("P > T^(1/8) + 1 = {lo:.4} violated (P = {p})"));
    }
    if !(p < hi) {
        broken.push(format!("P < T^(1/5) = {hi:.4} violated (P = {p})"));
    }
    if broken.is_empty() {
        return None;
    }
    let mut msg = format!("strict regime: {}", broken.join("; "));
    if lo >= hi {
        msg += &format!(
            "; the window (T^(1/8) + 1, T^(1/5)) = ({lo:.2}, {hi:.2}) is empty, so T = {t} is too small for the strict regime"
        );
    }
    msg += "; rerun without --strict to use the relaxed regime (T >= 8, 1 < P < T)";
    Some(msg)
}

impl ExperimentConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        let x = &self.index_scan;
        need(x.trials >= 1, || "index_scan.trials must be at least 1".into())?;
        need(x.m_max <= 8, || format!("index_scan.m_max = {} must be at most 8", x.m_max))?;
        need(x.tau_min > 0.0, || "index_scan.tau_min must be positive".into())?;
        need(x.band_per_m >= 2 && x.band_min >= 1, || {
            "index_scan bands need band_per_m >= 2 and band_min >= 1 (L >= 2M + 1)".into()
        })?;
        need(x.adjoint_band >= 2 * 3 + 1, || "index_scan.adjoint_band must be at least 7".into())?;

        let m = &self.modes;
        need(m.radius > 0.0 && m.radius.is_finite(), || "modes.radius must be positive".into())?;
        need(m.points >= 32, || "modes.points must be at least 32".into())?;
        need(m.amplitude.is_finite(), || "modes.amplitude must be finite".into())?;

        let e = &self.estimates;
        need(e.radius > 0.0 && e.radius.is_finite(), || "estimates.radius must be positive".into())?;
        need(e.points >= 32, || "estimates.points must be at least 32".into())?;
        need(e.decay_c_max > 0.0, || "estimates.decay_c_max must be positive".into())?;

        let q = &self.squeeze;
        need(q.p_min >= 1 && q.p_min <= q.p_max, || "squeeze needs 1 <= p_min <= p_max".into())?;
        need(q.forced_every >= 1, || "squeeze.forced_every must be at least 1".into())?;
        need(q.lower_bound_tau > 0.0, || "squeeze.lower_bound_tau must be positive".into())?;

        let f = &self.frame;
        need(f.frak_r > 0.0 && f.frak_r <= f.big_r / 4.0, || {
            format!("frame.frak_r = {} must lie in (0, R/4] with R = {}", f.frak_r, f.big_r)
        })?;
        if self.strict && self.command.uses_frame() {
            if let Some(msg) = strict_window_message(f.t, f.p) {
                return Err(ConfigError(msg));
            }
        }
        parameter_window(f.t, f.p, false).map_err(|m| ConfigError(format!("frame: {m}")))?;
        f.build().map_err(|e| ConfigError(format!("frame: {e}")))?;

        let d = &self.deform;
        need(d.s_fraction > 0.0 && d.s_fraction <= 1.0, || {
            format!("deform.s_fraction = {} must lie in (0, 1]", d.s_fraction)
        })?;
        need(d.terms >= 1, || "deform.terms must be at least 1".into())?;

        let it = &self.iterate;
        need(it.steps >= 1, || "iterate.steps must be at least 1".into())?;
        need(it.points >= 64, || "iterate.points must be at least 64".into())?;
        need(it.amplitude.is_finite(), || "iterate.amplitude must be finite".into())?;
        need(it.ratio_slack >= 1.0, || "iterate.ratio_slack must be at least 1".into())?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse a JSON config, apply defaults and check every constraint.
pub fn validate_config(raw: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = serde_json::from_str(raw).map_err(|e| ConfigError(format!("config: {e}")))?;
    cfg.check()?;
    Ok(cfg)
}
