use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::model::DampingSchedule;
use crate::problems::{problem, CustomProblem, ProblemSpec, CATALOG_IDS};

/// One simulation run. Every section and key is optional in the file; the
/// defaults describe a short run on `scalar-harmonic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub schedule: ScheduleSection,
    pub integrator: IntegratorSection,
    pub accumulators: AccumulatorSection,
    pub analysis: AnalysisSection,
    pub checks: CheckSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSection {
    /// Catalog id; ignored when `custom` is set.
    pub id: String,
    /// Path to a custom problem file, relative to the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom: Option<PathBuf>,
}

impl Default for ProblemSection {
    fn default() -> Self {
        ProblemSection { id: "scalar-harmonic".into(), custom: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// γ(t) = k/(1+t)^α
    PowerLaw,
    /// γ(t) = k
    Constant,
    /// γ ≡ 0
    Undamped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub kind: ScheduleKind,
    pub k: f64,
    pub alpha: f64,
    pub t0: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection { kind: ScheduleKind::PowerLaw, k: 1.0, alpha: 0.5, t0: 0.0 }
    }
}

impl ScheduleSection {
    pub fn build(&self) -> Result<DampingSchedule, CliError> {
        let sched = match self.kind {
            ScheduleKind::PowerLaw => DampingSchedule::power_law(self.k, self.alpha),
            ScheduleKind::Constant => DampingSchedule::constant(self.k),
            ScheduleKind::Undamped => Ok(DampingSchedule::undamped()),
        };
        sched.map(|s| s.with_onset(self.t0)).map_err(|e| CliError::invalid("schedule", e.to_string()))
    }

    /// Exponent driving the default accumulator lists (0 unless power-law).
    pub fn effective_alpha(&self) -> f64 {
        match self.kind {
            ScheduleKind::PowerLaw => self.alpha,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub h: f64,
    pub t_end: f64,
    pub sample_ratio: f64,
    pub enforce_step_bound: bool,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        IntegratorSection { h: 1e-3, t_end: 100.0, sample_ratio: 1.05, enforce_step_bound: true }
    }
}

/// Extra accumulator exponents. The run always adds `{−α, 0}` for the
/// weighted energy and `{1−2α, 1−α, α}` for the weighted speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct AccumulatorSection {
    pub energy_exponents: Vec<f64>,
    pub speed_exponents: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    /// Decades of log-time in the rate-fit window (at most 2).
    pub fit_decades: f64,
    /// Probe exponents ᾱ < α; empty means `[α − 0.1]` when positive.
    pub alpha_bar: Vec<f64>,
    pub theta: f64,
    /// Limit-point membership test `‖Au + f(u)‖ ≤ gradient_tol`.
    pub gradient_tol: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { fit_decades: 1.0, alpha_bar: Vec::new(), theta: 0.05, gradient_tol: 1e-6 }
    }
}

/// Tolerances of the assertion-class checks that decide exit status 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSection {
    /// Dissipation residual ≤ `tol_e·E(0)·t_end`.
    pub tol_e: f64,
    /// Energy rise between samples ≤ `energy_c·h²·(‖A‖ + L_f)·E(0)/4`.
    pub energy_c: f64,
    /// Anchor violation ≤ `anchor_tol·(1 + E(0))`.
    pub anchor_tol: f64,
}

impl Default for CheckSection {
    fn default() -> Self {
        CheckSection { tol_e: 1e-6, energy_c: 1.0, anchor_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub emit_svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), emit_svg: false }
    }
}

fn push_unique(list: &mut Vec<f64>, x: f64) {
    if !list.iter().any(|&y| (y - x).abs() <= 1e-12) {
        list.push(x);
    }
}

impl RunConfig {
    /// Parses and validates; errors name the offending key and line.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate().map_err(|e| e.with_line(text))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let (Some(custom), Some(dir)) = (&cfg.problem.custom, path.parent()) {
            if custom.is_relative() {
                cfg.problem.custom = Some(dir.join(custom));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.schedule;
        if s.kind == ScheduleKind::PowerLaw && !(0.0..1.0).contains(&s.alpha) {
            return Err(CliError::invalid("schedule.alpha", format!("must lie in [0, 1), got {}", s.alpha)));
        }
        if s.kind != ScheduleKind::Undamped && !(s.k > 0.0 && s.k.is_finite()) {
            return Err(CliError::invalid("schedule.k", format!("must be positive, got {}", s.k)));
        }
        if !(s.t0 >= 0.0) {
            return Err(CliError::invalid("schedule.t0", format!("must be ≥ 0, got {}", s.t0)));
        }
        let i = &self.integrator;
        if !(i.h > 0.0 && i.h.is_finite()) {
            return Err(CliError::invalid("integrator.h", format!("must be positive, got {}", i.h)));
        }
        if !(i.t_end > 0.0 && i.t_end.is_finite()) {
            return Err(CliError::invalid("integrator.t_end", format!("must be positive, got {}", i.t_end)));
        }
        if !(i.sample_ratio > 1.0 && i.sample_ratio.is_finite()) {
            return Err(CliError::invalid("integrator.sample_ratio", format!("must exceed 1, got {}", i.sample_ratio)));
        }
        let a = &self.accumulators;
        if a.energy_exponents.iter().any(|&r| r == -1.0) {
            return Err(CliError::invalid(
                "accumulators.energy_exponents",
                "r = -1 is excluded from the weighted-energy exponents (the decay statement needs r ≠ -1)".into(),
            ));
        }
        if a.energy_exponents.iter().chain(&a.speed_exponents).any(|r| !r.is_finite()) {
            return Err(CliError::invalid("accumulators", "exponents must be finite".into()));
        }
        let alpha = s.effective_alpha();
        if let Some(b) = self.analysis.alpha_bar.iter().find(|&&b| !(b < alpha)) {
            return Err(CliError::invalid("analysis.alpha_bar", format!("every probe must be < alpha = {alpha}, got {b}")));
        }
        if !(self.analysis.fit_decades > 0.0 && self.analysis.fit_decades <= 2.0) {
            return Err(CliError::invalid("analysis.fit_decades", format!("must lie in (0, 2], got {}", self.analysis.fit_decades)));
        }
        if !(self.analysis.theta > 0.0 && self.analysis.theta < 1.0) {
            return Err(CliError::invalid("analysis.theta", format!("must lie in (0, 1), got {}", self.analysis.theta)));
        }
        for (key, v) in [
            ("checks.tol_e", self.checks.tol_e),
            ("checks.energy_c", self.checks.energy_c),
            ("checks.anchor_tol", self.checks.anchor_tol),
            ("analysis.gradient_tol", self.analysis.gradient_tol),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::invalid(key, format!("must be a finite non-negative number, got {v}")));
            }
        }
        if self.problem.custom.is_none() && !CATALOG_IDS.contains(&self.problem.id.as_str()) {
            return Err(CliError::invalid(
                "problem.id",
                format!("unknown problem `{}` (known: {})", self.problem.id, CATALOG_IDS.join(", ")),
            ));
        }
        Ok(())
    }

    /// Configured weighted-energy exponents plus the ones the analysis needs.
    pub fn energy_exponents(&self) -> Vec<f64> {
        let alpha = self.schedule.effective_alpha();
        let mut v = self.accumulators.energy_exponents.clone();
        push_unique(&mut v, -alpha);
        push_unique(&mut v, 0.0);
        v
    }

    pub fn speed_exponents(&self) -> Vec<f64> {
        let alpha = self.schedule.effective_alpha();
        let mut v = self.accumulators.speed_exponents.clone();
        for q in [1.0 - 2.0 * alpha, 1.0 - alpha, alpha] {
            push_unique(&mut v, q);
        }
        v
    }

    pub fn alpha_bar(&self) -> Vec<f64> {
        if !self.analysis.alpha_bar.is_empty() {
            return self.analysis.alpha_bar.clone();
        }
        let alpha = self.schedule.effective_alpha();
        if alpha > 0.1 {
            vec![alpha - 0.1]
        } else {
            Vec::new()
        }
    }

    pub fn load_problem(&self) -> Result<ProblemSpec, CliError> {
        match &self.problem.custom {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let custom: CustomProblem = toml::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
                custom.build().map_err(|e| CliError::invalid("problem.custom", e.to_string()))
            }
            None => problem(&self.problem.id)
                .ok_or_else(|| CliError::invalid("problem.id", format!("unknown problem `{}`", self.problem.id))),
        }
    }
}

/// Line of `key = …` for a dotted `section.key`, if present in `text`.
pub(crate) fn locate_key(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = dotted.rsplit_once('.').unwrap_or(("", dotted));
    let mut current = String::new();
    for (no, line) in text.lines().enumerate() {
        let l = line.trim();
        if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim().to_string();
        } else if current == section {
            if let Some((k, _)) = l.split_once('=') {
                if k.trim() == key {
                    return Some(no + 1);
                }
            }
        }
    }
    if section.is_empty() {
        return None;
    }
    // Fall back to the section header.
    text.lines().position(|l| l.trim() == format!("[{section}]")).map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[problem]
id = "degenerate-flat"

[schedule]
kind = "power-law"
k = 1.0
alpha = 0.75
t0 = 0.0

[integrator]
h = 0.005
t_end = 1000.0
sample_ratio = 1.05
enforce_step_bound = true

[accumulators]
energy_exponents = [-0.7, -0.45]
speed_exponents = [0.75]

[analysis]
fit_decades = 1.0
alpha_bar = [0.65]
theta = 0.05
gradient_tol = 1e-6

[checks]
tol_e = 1e-6
energy_c = 1.0
anchor_tol = 1e-6

[output]
dir = "out/degenerate"
emit_svg = true
"#;

    fn keys(v: &toml::Value, prefix: &str, out: &mut Vec<String>) {
        if let toml::Value::Table(t) = v {
            for (k, v) in t {
                let name = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                keys(v, &name, out);
                out.push(name);
            }
        }
    }

    #[test]
    fn round_trip_is_key_equivalent() {
        let cfg = RunConfig::from_toml_str(FULL).unwrap();
        let text = cfg.to_toml_string();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        keys(&toml::from_str::<toml::Value>(FULL).unwrap(), "", &mut a);
        keys(&toml::from_str::<toml::Value>(&text).unwrap(), "", &mut b);
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn alpha_out_of_range_names_the_key() {
        let err = RunConfig::from_toml_str(&FULL.replace("alpha = 0.75", "alpha = 1.2")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("schedule.alpha"), "{msg}");
        assert!(msg.contains("line 8"), "{msg}");
    }

    #[test]
    fn excluded_exponent_is_rejected() {
        let err = RunConfig::from_toml_str(&FULL.replace("[-0.7, -0.45]", "[-1.0, 0.5]")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("accumulators.energy_exponents") && msg.contains("r = -1"), "{msg}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = RunConfig::from_toml_str("[schedule]\nalpha = \"fast\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        let err = RunConfig::from_toml_str("[schedule]\nbeta = 1\n").unwrap_err();
        assert!(err.to_string().contains("beta"));
    }

    #[test]
    fn alpha_bar_probes_stay_below_alpha() {
        let err = RunConfig::from_toml_str(&FULL.replace("alpha_bar = [0.65]", "alpha_bar = [0.8]")).unwrap_err();
        assert!(err.to_string().contains("analysis.alpha_bar"));
    }

    #[test]
    fn derived_exponents() {
        let cfg = RunConfig::from_toml_str(FULL).unwrap();
        assert_eq!(cfg.energy_exponents(), vec![-0.7, -0.45, -0.75, 0.0]);
        assert_eq!(cfg.speed_exponents(), vec![0.75, -0.5, 0.25]);
        assert_eq!(cfg.alpha_bar(), vec![0.65]);
        assert_eq!(RunConfig::default().alpha_bar().len(), 1);
    }
}
