use std::fs;
use std::path::{Path, PathBuf};

use super::report::{
    CheckOutcome, ChecksSection, ConvergenceSection, EnergySection, IntegralSummary, WeightedDecaySummary, RateSection, RunInfo, RunReport, SummaryRow,
};
use super::{decay_plot, output_dir, CliError, RunConfig};
use crate::analysis::{
    check_anchor_inequality, check_convergence, check_weighted_decay, check_speed_integrability, fit_decay_rate,
    integrability_set, supremum_saturated, tail_decay, AnalysisError,
};
use crate::dynamics::{
    dissipation_residual, energy_increase, integrate, tail_identity_defect, DynamicsError, IntegratorConfig, Trajectory,
    SCHEME_NAME,
};
use crate::problems::ProblemSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok,
    /// Names of the assertion-class checks that exceeded their tolerance.
    AssertionFailed(Vec<String>),
    NonFinite { t: f64 },
    Error(String),
}

impl RunStatus {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::Ok => 0,
            RunStatus::Error(_) => 1,
            RunStatus::AssertionFailed(_) => 2,
            RunStatus::NonFinite { .. } => 3,
        }
    }

    /// Short form used in reports and summary rows.
    pub fn label(&self) -> String {
        match self {
            RunStatus::Ok => "ok".into(),
            RunStatus::AssertionFailed(v) => format!("assertion-failed:{}", v.join("+")),
            RunStatus::NonFinite { t } => format!("non-finite@t={t}"),
            RunStatus::Error(m) => format!("error:{m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub report: Option<RunReport>,
    pub summary: SummaryRow,
    /// Artifacts written, in write order.
    pub files: Vec<PathBuf>,
}

/// Loads the problem and integrates it as configured.
pub fn execute(cfg: &RunConfig) -> Result<(ProblemSpec, Trajectory), CliError> {
    let spec = cfg.load_problem()?;
    let sched = cfg.schedule.build()?;
    let i = &cfg.integrator;
    let mut icfg = IntegratorConfig::new(i.h, i.t_end)
        .energy_exponents(&cfg.energy_exponents())
        .speed_exponents(&cfg.speed_exponents())
        .problem_id(spec.id.clone());
    icfg.sample_ratio = i.sample_ratio;
    icfg.enforce_step_bound = i.enforce_step_bound;
    let traj = integrate(&spec.certified, &sched, &spec.init, &icfg)?;
    Ok((spec, traj))
}

fn schedule_k(cfg: &RunConfig) -> f64 {
    match cfg.schedule.kind {
        super::ScheduleKind::Undamped => 0.0,
        _ => cfg.schedule.k,
    }
}

/// Full analysis of a finished run; the status reflects the assertion-class checks.
pub fn analyze(cfg: &RunConfig, spec: &ProblemSpec, traj: &Trajectory) -> Result<RunReport, CliError> {
    let alpha = cfg.schedule.effective_alpha();
    let theta = cfg.analysis.theta;
    let alpha_bar = cfg.alpha_bar();
    let e0 = traj.first().record.energy;
    let h = cfg.integrator.h;

    let energy = EnergySection {
        initial: e0,
        last: traj.last().record.energy,
        dissipation_residual: dissipation_residual(traj),
        tail_identity_defect: tail_identity_defect(traj),
        max_rise: energy_increase(traj),
    };

    let mut probes = vec![1.0];
    probes.extend(alpha_bar.iter().map(|b| 1.0 + b));
    let rate = match fit_decay_rate(traj, cfg.analysis.fit_decades, &probes) {
        Ok(fit) => RateSection { mode: "fit".into(), fit: Some(fit), note: None },
        Err(AnalysisError::EnergyUnderflow { t, energy }) => RateSection {
            mode: "superpolynomial".into(),
            fit: None,
            note: Some(format!("E = {energy:e} at t = {t}")),
        },
        Err(e) => RateSection { mode: "unavailable".into(), fit: None, note: Some(e.to_string()) },
    };

    let tails = probes.iter().map(|&s| tail_decay(traj, s, 1.0)).collect::<Result<Vec<_>, _>>()?;
    let set = integrability_set(traj, theta);
    let integrability = set.iter().map(IntegralSummary::from).collect();
    let saturated_sup = supremum_saturated(&set);

    let mut weighted_decay = Vec::new();
    for r in [-alpha, 0.0] {
        if weighted_decay.iter().any(|l: &WeightedDecaySummary| l.r == r) {
            continue;
        }
        let l = check_weighted_decay(traj, r, alpha, theta)?;
        weighted_decay.push(WeightedDecaySummary {
            r,
            premise_saturated: l.premise.saturated,
            decay_holds: l.decay_holds(),
            speed_saturated: l.conclusion_speed.saturated,
            holds: l.holds(),
        });
    }

    let anchor = check_anchor_inequality(traj, 0.0)?;
    let conv = check_convergence(traj, &spec.certified, cfg.analysis.gradient_tol)?;
    let convergence = ConvergenceSection {
        dist_to_argmin: conv.final_dist(),
        cauchy_defect: conv.cauchy_defect,
        gradient_norm: conv.gradient_norm,
        limit_in_argmin: conv.limit_in_argmin,
        limit_point: conv.limit_point,
    };
    let speed = check_speed_integrability(traj, alpha, theta)?;

    let c = &cfg.checks;
    let stiffness = spec.op().norm() + spec.lipschitz_bound().unwrap_or(0.0);
    let checks = ChecksSection {
        dissipation: CheckOutcome::new(energy.dissipation_residual, c.tol_e * e0 * cfg.integrator.t_end),
        energy_monotone: CheckOutcome::new(energy.max_rise, c.energy_c * h * h * stiffness * e0 / 4.0),
        anchor: CheckOutcome::new(anchor.max_violation.max(0.0), c.anchor_tol * (1.0 + e0)),
    };
    let mut report = RunReport {
        run: RunInfo {
            problem: spec.id.clone(),
            scheme: SCHEME_NAME.into(),
            schedule: traj.meta.schedule.clone(),
            alpha,
            k: schedule_k(cfg),
            h,
            t_end: cfg.integrator.t_end,
            samples: traj.len(),
            status: String::new(),
        },
        energy,
        rate,
        checks,
        anchor,
        convergence,
        speed_integrability: IntegralSummary::from(&speed),
        tails,
        integrability,
        weighted_decay,
        saturated_sup,
    };
    report.run.status = status_of(&report).label();
    Ok(report)
}

fn write(path: PathBuf, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    files.push(path);
    Ok(())
}

fn status_of(report: &RunReport) -> RunStatus {
    let failures = report.checks.failures();
    if failures.is_empty() {
        RunStatus::Ok
    } else {
        RunStatus::AssertionFailed(failures.into_iter().map(String::from).collect())
    }
}

/// Runs `cfg` and writes `trajectory.csv`, `report.toml`, `summary.csv` (and
/// `decay.svg` when enabled) into `dir`. A non-finite integration still
/// writes its summary row.
pub fn run_to_dir(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    let (spec, traj) = match execute(cfg) {
        Ok(v) => v,
        Err(CliError::Dynamics(DynamicsError::NonFinite { t })) => {
            let status = RunStatus::NonFinite { t };
            let i = &cfg.integrator;
            let summary = SummaryRow::failed(
                &cfg.problem.id,
                cfg.schedule.effective_alpha(),
                schedule_k(cfg),
                i.h,
                i.t_end,
                status.label(),
            );
            let mut buf = Vec::new();
            SummaryRow::write_csv(std::slice::from_ref(&summary), &mut buf).map_err(|e| CliError::Parse(e.to_string()))?;
            write(dir.join("summary.csv"), &buf, &mut files)?;
            return Ok(RunOutcome { status, report: None, summary, files });
        }
        Err(e) => return Err(e),
    };

    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    write(dir.join("trajectory.csv"), &buf, &mut files)?;

    let report = analyze(cfg, &spec, &traj)?;
    let status = status_of(&report);
    write(dir.join("report.toml"), report.to_toml_string().as_bytes(), &mut files)?;

    let summary = report.summary();
    let mut buf = Vec::new();
    SummaryRow::write_csv(std::slice::from_ref(&summary), &mut buf).map_err(|e| CliError::Parse(e.to_string()))?;
    write(dir.join("summary.csv"), &buf, &mut files)?;

    if cfg.output.emit_svg {
        let svg = decay_plot(&traj, &cfg.alpha_bar());
        write(dir.join("decay.svg"), svg.as_bytes(), &mut files)?;
    }
    Ok(RunOutcome { status, report: Some(report), summary, files })
}

/// Loads `config` and runs it into its output directory (or `VANISHDAMP_OUT`).
pub fn run(config: &Path) -> Result<RunOutcome, CliError> {
    let cfg = RunConfig::load(config)?;
    run_to_dir(&cfg, &output_dir(&cfg.output.dir))
}
