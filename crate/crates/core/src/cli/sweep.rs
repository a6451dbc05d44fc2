use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::SummaryRow;
use super::run::run_to_dir;
use super::{output_dir, CliError, RunConfig, ScheduleKind};
use crate::dynamics::exponent_label as fmt;

/// Cartesian grid overriding fields of the base run config. Empty lists keep
/// the base value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub problems: Vec<String>,
    pub alpha: Vec<f64>,
    pub k: Vec<f64>,
    pub h: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid { problems: Vec::new(), alpha: vec![0.0, 0.25, 0.5, 0.6, 0.75, 0.9], k: Vec::new(), h: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Base run config, relative to the sweep file; defaults when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<PathBuf>,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub dir: PathBuf,
    pub grid: SweepGrid,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { base: None, workers: 0, dir: PathBuf::from("out/sweep"), grid: SweepGrid::default() }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// One row per cell, sorted by cell key.
    pub rows: Vec<SummaryRow>,
    pub summary_path: PathBuf,
    pub failed_cells: usize,
}

#[derive(Debug, Clone)]
struct Cell {
    key: String,
    cfg: RunConfig,
}

fn cells(base: &RunConfig, grid: &SweepGrid) -> Vec<Cell> {
    let or_base = |v: &Vec<f64>, b: f64| if v.is_empty() { vec![b] } else { v.clone() };
    let problems = if grid.problems.is_empty() { vec![base.problem.id.clone()] } else { grid.problems.clone() };
    let mut out = Vec::new();
    for p in &problems {
        for &a in &or_base(&grid.alpha, base.schedule.alpha) {
            for &k in &or_base(&grid.k, base.schedule.k) {
                for &h in &or_base(&grid.h, base.integrator.h) {
                    let mut cfg = base.clone();
                    cfg.problem.id = p.clone();
                    cfg.problem.custom = None;
                    cfg.schedule.kind = ScheduleKind::PowerLaw;
                    cfg.schedule.alpha = a;
                    cfg.schedule.k = k;
                    cfg.integrator.h = h;
                    cfg.analysis.alpha_bar.clear();
                    let key = format!("{p}_a{}_k{}_h{}", fmt(a), fmt(k), fmt(h));
                    out.push(Cell { key, cfg });
                }
            }
        }
    }
    out
}

fn run_cell(cell: &Cell, root: &Path) -> SummaryRow {
    let failed = |status: String| {
        let c = &cell.cfg;
        SummaryRow::failed(&c.problem.id, c.schedule.alpha, c.schedule.k, c.integrator.h, c.integrator.t_end, status)
    };
    if let Err(e) = cell.cfg.validate() {
        return failed(format!("error:{e}"));
    }
    match run_to_dir(&cell.cfg, &root.join("cells").join(&cell.key)) {
        Ok(outcome) => outcome.summary,
        Err(e) => failed(format!("error:{e}")),
    }
}

/// Runs every grid cell on a bounded pool and writes `sweep.csv` into `dir`.
/// Cell failures are recorded in their row and never abort the sweep.
pub fn sweep(cfg: &SweepConfig, base: &RunConfig, dir: &Path) -> Result<SweepOutcome, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut cells = cells(base, &cfg.grid);
    cells.sort_by(|a, b| a.key.cmp(&b.key));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::invalid("workers", e.to_string()))?;
    let rows: Vec<SummaryRow> = pool.install(|| cells.par_iter().map(|c| run_cell(c, dir)).collect());
    let failed_cells = rows.iter().filter(|r| r.status != "ok").count();
    let summary_path = dir.join("sweep.csv");
    let mut buf = Vec::new();
    SummaryRow::write_csv(&rows, &mut buf).map_err(|e| CliError::Parse(e.to_string()))?;
    fs::write(&summary_path, buf).map_err(|e| CliError::io(&summary_path, e))?;
    Ok(SweepOutcome { rows, summary_path, failed_cells })
}

/// Loads a sweep file and its base config, then sweeps into the configured
/// directory (or `VANISHDAMP_OUT`).
pub fn sweep_file(path: &Path) -> Result<SweepOutcome, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg = SweepConfig::from_toml_str(&text)?;
    let base = match &cfg.base {
        Some(b) => RunConfig::load(&path.parent().unwrap_or(Path::new(".")).join(b))?,
        None => RunConfig::default(),
    };
    sweep(&cfg, &base, &output_dir(&cfg.dir))
}
