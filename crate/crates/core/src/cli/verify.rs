use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;

use crate::analysis::{
    check_anchor_inequality, check_bootstrap, check_convergence, check_weighted_decay, fit_decay_rate, tail_decay,
    weighted_energy_report,
};
use crate::dynamics::reference::reference_solution;
use crate::dynamics::{dissipation_residual, integrate, tail_identity_defect, IntegratorConfig, Trajectory};
use crate::model::DampingSchedule;
use crate::problems::{problem, ProblemSpec, CATALOG_IDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Integrator,
    Dissipation,
    Rates,
    Integrals,
    Anchor,
    Convergence,
    Control,
}

impl Group {
    pub const ALL: [Group; 7] = [
        Group::Integrator,
        Group::Dissipation,
        Group::Rates,
        Group::Integrals,
        Group::Anchor,
        Group::Convergence,
        Group::Control,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Integrator => "integrator",
            Group::Dissipation => "dissipation",
            Group::Rates => "rates",
            Group::Integrals => "integrals",
            Group::Anchor => "anchor",
            Group::Convergence => "convergence",
            Group::Control => "control",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL.into_iter().find(|g| g.name() == s).ok_or_else(|| {
            let names: Vec<_> = Group::ALL.iter().map(|g| g.name()).collect();
            format!("unknown group `{s}` (known: {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Criterion {
    pub id: u8,
    pub group: Group,
    pub name: &'static str,
}

impl Criterion {
    pub const ALL: [Criterion; 11] = [
        Criterion { id: 1, group: Group::Integrator, name: "integrator-order" },
        Criterion { id: 2, group: Group::Dissipation, name: "dissipation-identity" },
        Criterion { id: 3, group: Group::Dissipation, name: "tail-identity" },
        Criterion { id: 4, group: Group::Rates, name: "decay-inverse-t" },
        Criterion { id: 5, group: Group::Rates, name: "decay-improved-rate" },
        Criterion { id: 6, group: Group::Integrals, name: "weighted-energy-premise" },
        Criterion { id: 7, group: Group::Integrals, name: "weighted-decay-chain" },
        Criterion { id: 8, group: Group::Integrals, name: "weight-bootstrap" },
        Criterion { id: 9, group: Group::Anchor, name: "anchor-inequality" },
        Criterion { id: 10, group: Group::Convergence, name: "trajectory-convergence" },
        Criterion { id: 11, group: Group::Control, name: "undamped-control" },
    ];

    pub fn by_id(id: u8) -> Option<Criterion> {
        Criterion::ALL.into_iter().find(|c| c.id == id)
    }
}

/// Thresholds of the acceptance suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Minimum observed convergence order against the reference solver.
    pub order: f64,
    pub order_budget_s: f64,
    /// Dissipation residual relative to `E(0)·t_end`.
    pub dissipation: f64,
    /// Minimum residual reduction when `h` is halved.
    pub dissipation_halving: f64,
    pub dissipation_budget_s: f64,
    /// Tail-identity defect relative to `E(0)`.
    pub tail_identity: f64,
    /// Maximum `t^s·E` ratio across the last decade.
    pub decade_ratio: f64,
    pub theta: f64,
    /// Anchor violation relative to `1 + E(0)`.
    pub anchor: f64,
    pub dist: f64,
    pub cauchy: f64,
    pub gradient: f64,
    /// Largest `|fitted exponent|` of the undamped control.
    pub control_exponent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            order: 1.9,
            order_budget_s: 1.0,
            dissipation: 1e-6,
            dissipation_halving: 3.0,
            dissipation_budget_s: 60.0,
            tail_identity: 1e-8,
            decade_ratio: 0.5,
            theta: 0.05,
            anchor: 1e-6,
            dist: 1e-4,
            cauchy: 1e-4,
            gradient: 1e-5,
            control_exponent: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub criterion: Criterion,
    pub pass: bool,
    /// Worst observed value of the criterion's metric.
    pub value: f64,
    pub tolerance: f64,
    /// `upper` when `value ≤ tolerance` passes, `lower` when `value ≥ tolerance` does.
    pub bound: &'static str,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion={} group={} name={} status={} value={:e} {}={:e} seconds={:.2} detail=\"{}\"",
            self.criterion.id,
            self.criterion.group,
            self.criterion.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.value,
            if self.bound == "upper" { "max" } else { "min" },
            self.tolerance,
            self.seconds,
            self.detail.replace('"', "'")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub results: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn failed(&self) -> Vec<u8> {
        self.results.iter().filter(|r| !r.pass).map(|r| r.criterion.id).collect()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let passed = self.results.iter().filter(|r| r.pass).count();
        write!(f, "verify passed={passed} total={} status={}", self.results.len(), if self.all_pass() { "PASS" } else { "FAIL" })
    }
}

/// One integration of the suite.
#[derive(Debug, Clone)]
struct RunSpec {
    problem: &'static str,
    /// `None` for γ ≡ 0.
    alpha: Option<f64>,
    h: f64,
    t_end: f64,
}

#[derive(Debug)]
struct Run {
    spec: RunSpec,
    problem: ProblemSpec,
    traj: Result<Trajectory, String>,
}

impl Run {
    fn label(&self) -> String {
        match self.spec.alpha {
            Some(a) => format!("{} α={a} h={}", self.spec.problem, self.spec.h),
            None => format!("{} undamped h={}", self.spec.problem, self.spec.h),
        }
    }

    fn alpha(&self) -> f64 {
        self.spec.alpha.unwrap_or(0.0)
    }

    fn e0(&self) -> f64 {
        self.problem.initial_energy()
    }
}

fn push_unique(v: &mut Vec<f64>, x: f64) {
    if !v.iter().any(|&y| (y - x).abs() < 1e-12) {
        v.push(x);
    }
}

fn execute(spec: RunSpec) -> Run {
    let problem = problem(spec.problem).expect("catalog id");
    let alpha = spec.alpha.unwrap_or(0.0);
    let sched = match spec.alpha {
        Some(a) => DampingSchedule::power_law(1.0, a).expect("alpha in [0, 1)"),
        None => DampingSchedule::undamped(),
    };
    let mut energy = vec![-alpha, 0.0];
    if (alpha - 0.75).abs() < 1e-12 {
        push_unique(&mut energy, -0.7);
        push_unique(&mut energy, -0.45);
    }
    energy.dedup();
    let mut speed = Vec::new();
    for q in [1.0 - 2.0 * alpha, 1.0 - alpha, alpha] {
        push_unique(&mut speed, q);
    }
    let cfg = IntegratorConfig::new(spec.h, spec.t_end)
        .energy_exponents(&energy)
        .speed_exponents(&speed)
        .problem_id(spec.problem);
    let traj = integrate(&problem.certified, &sched, &problem.init, &cfg).map_err(|e| e.to_string());
    Run { spec, problem, traj }
}

fn execute_all(specs: Vec<RunSpec>) -> Vec<Run> {
    specs.into_par_iter().map(execute).collect()
}

#[derive(Default)]
struct Cache {
    dissipation: OnceLock<(Vec<Run>, f64)>,
    tail: OnceLock<Vec<Run>>,
    slow: OnceLock<Vec<Run>>,
    fast: OnceLock<Vec<Run>>,
    control: OnceLock<Run>,
}

/// The acceptance suite. Run sets are integrated on first use and shared by
/// every criterion that needs them.
pub struct Suite {
    pub tol: Tolerances,
    cache: Cache,
}

const DECAY_PROBLEMS: [&str; 4] = ["dirichlet-wave-20", "semilinear-wave-20", "degenerate-flat", "far-start"];
const FAST_PROBLEMS: [&str; 3] = ["semilinear-wave-20", "degenerate-flat", "far-start"];
const CONVERGENCE_PROBLEMS: [&str; 2] = ["degenerate-flat", "far-start"];

impl Default for Suite {
    fn default() -> Self {
        Suite::new(Tolerances::default())
    }
}

/// Accumulates the worst case of a criterion.
struct Worst {
    value: f64,
    what: String,
    pass: bool,
    notes: Vec<String>,
}

impl Worst {
    fn new(start: f64) -> Self {
        Worst { value: start, what: String::new(), pass: true, notes: Vec::new() }
    }

    /// Records `value` for `what`; `worse(a, b)` says whether `a` is worse than `b`.
    fn see(&mut self, value: f64, ok: bool, what: String, worse: fn(f64, f64) -> bool) {
        if !ok {
            self.pass = false;
            self.notes.push(what.clone());
        }
        if worse(value, self.value) || value.is_nan() || self.what.is_empty() {
            self.value = value;
            self.what = what;
        }
    }

    fn fail(&mut self, what: String) {
        self.pass = false;
        self.value = f64::NAN;
        self.notes.push(what);
    }

    fn detail(&self) -> String {
        let mut d = format!("worst: {}", self.what);
        if !self.notes.is_empty() {
            d.push_str(&format!("; failing: {}", self.notes.join(", ")));
        }
        d
    }
}

fn larger(a: f64, b: f64) -> bool {
    a > b
}

fn smaller(a: f64, b: f64) -> bool {
    a < b
}

impl Suite {
    pub fn new(tol: Tolerances) -> Self {
        Suite { tol, cache: Cache::default() }
    }

    /// Catalog problems at α = 0.5 and t_end = 1e3, with `h` and `h/2`.
    fn dissipation_runs(&self) -> &(Vec<Run>, f64) {
        self.cache.dissipation.get_or_init(|| {
            let start = Instant::now();
            let specs = CATALOG_IDS
                .iter()
                .flat_map(|&p| [1e-3, 5e-4].map(|h| RunSpec { problem: p, alpha: Some(0.5), h, t_end: 1e3 }))
                .collect();
            (execute_all(specs), start.elapsed().as_secs_f64())
        })
    }

    /// Catalog problems at α = 0.5 with a small step for the tail identity.
    fn tail_runs(&self) -> &[Run] {
        self.cache.tail.get_or_init(|| {
            execute_all(CATALOG_IDS.iter().map(|&p| RunSpec { problem: p, alpha: Some(0.5), h: 1e-5, t_end: 100.0 }).collect())
        })
    }

    /// α ∈ {0, 0.25, 0.5}, t_end = 1e5.
    fn slow_runs(&self) -> &[Run] {
        self.cache.slow.get_or_init(|| {
            let specs = [0.0, 0.25, 0.5]
                .iter()
                .flat_map(|&a| DECAY_PROBLEMS.map(|p| RunSpec { problem: p, alpha: Some(a), h: 5e-3, t_end: 1e5 }))
                .collect();
            execute_all(specs)
        })
    }

    /// α ∈ {0.6, 0.75, 0.9}, t_end = 1e5.
    fn fast_runs(&self) -> &[Run] {
        self.cache.fast.get_or_init(|| {
            let specs = [0.6, 0.75, 0.9]
                .iter()
                .flat_map(|&a| FAST_PROBLEMS.map(|p| RunSpec { problem: p, alpha: Some(a), h: 5e-3, t_end: 1e5 }))
                .collect();
            execute_all(specs)
        })
    }

    fn decay_regime_runs(&self) -> impl Iterator<Item = &Run> {
        self.slow_runs().iter().chain(self.fast_runs())
    }

    fn control_run(&self) -> &Run {
        self.cache
            .control
            .get_or_init(|| execute(RunSpec { problem: "scalar-harmonic", alpha: None, h: 1e-2, t_end: 1e4 }))
    }

    /// Criteria of `only` (every group when `None`), in id order.
    pub fn selected(only: Option<Group>) -> Vec<Criterion> {
        Criterion::ALL.into_iter().filter(|c| only.is_none_or(|g| c.group == g)).collect()
    }

    pub fn run(&self, only: Option<Group>) -> VerifyReport {
        VerifyReport { results: Self::selected(only).iter().map(|c| self.check(c.id)).collect() }
    }

    /// Evaluates one criterion by id (1–11).
    pub fn check(&self, id: u8) -> CriterionResult {
        let criterion = Criterion::by_id(id).unwrap_or_else(|| panic!("no criterion {id}"));
        let start = Instant::now();
        let (worst, tolerance, bound) = match id {
            1 => self.integrator_order(),
            2 => self.dissipation_identity(),
            3 => self.tail_identity(),
            4 => self.decay_inverse_t(),
            5 => self.decay_improved(),
            6 => self.premise(),
            7 => self.weighted_decay_chain(),
            8 => self.bootstrap(),
            9 => self.anchor(),
            10 => self.convergence(),
            _ => self.control(),
        };
        CriterionResult {
            criterion,
            pass: worst.pass,
            value: worst.value,
            tolerance,
            bound,
            detail: worst.detail(),
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn integrator_order(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let start = Instant::now();
        let mut w = Worst::new(f64::INFINITY);
        let spec = problem("scalar-harmonic").expect("catalog id");
        let sched = DampingSchedule::power_law(1.0, 0.5).expect("valid schedule");
        let t_end = 10.0;
        let reference = match reference_solution(&spec.certified, &sched, &spec.init, t_end, 1e-13) {
            Ok(r) => r,
            Err(e) => {
                w.fail(format!("reference: {e}"));
                return (w, t.order, "lower");
            }
        };
        let mut errors = Vec::new();
        for h in [1e-2, 5e-3, 2.5e-3] {
            match integrate(&spec.certified, &sched, &spec.init, &IntegratorConfig::new(h, t_end)) {
                Ok(traj) => {
                    let s = &traj.last().state;
                    let e = s
                        .u
                        .iter()
                        .zip(&reference.u)
                        .chain(s.w.iter().zip(&reference.w))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    errors.push((h, e));
                }
                Err(e) => {
                    w.fail(format!("h={h}: {e}"));
                    return (w, t.order, "lower");
                }
            }
        }
        for pair in errors.windows(2) {
            let order = (pair[0].1 / pair[1].1).ln() / (pair[0].0 / pair[1].0).ln();
            w.see(order, order >= t.order, format!("h={}→{} order {order:.3}", pair[0].0, pair[1].0), smaller);
        }
        let secs = start.elapsed().as_secs_f64();
        if secs > t.order_budget_s {
            w.fail(format!("runtime {secs:.2}s over {}s", t.order_budget_s));
        }
        w.what = format!("{} (errors {:?})", w.what, errors.iter().map(|e| format!("{:.3e}", e.1)).collect::<Vec<_>>());
        (w, t.order, "lower")
    }

    fn dissipation_identity(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let (runs, secs) = self.dissipation_runs();
        let mut w = Worst::new(0.0);
        let mut min_ratio = f64::INFINITY;
        for pair in runs.chunks(2) {
            let (coarse, fine) = (&pair[0], &pair[1]);
            let (a, b) = match (&coarse.traj, &fine.traj) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    w.fail(format!("{}: {e}", coarse.label()));
                    continue;
                }
            };
            let rel = dissipation_residual(a) / (coarse.e0() * a.meta.t_end);
            w.see(rel, rel <= t.dissipation, coarse.label(), larger);
            let ratio = dissipation_residual(a) / dissipation_residual(b);
            min_ratio = min_ratio.min(ratio);
            if !(ratio >= t.dissipation_halving) {
                w.fail(format!("{} halving ratio {ratio:.2}", coarse.spec.problem));
            }
        }
        if *secs > t.dissipation_budget_s {
            w.fail(format!("runtime {secs:.1}s over {}s", t.dissipation_budget_s));
        }
        w.what = format!("{}; min halving ratio {min_ratio:.2}", w.what);
        (w, t.dissipation, "upper")
    }

    fn tail_identity(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        for run in self.tail_runs() {
            match &run.traj {
                Ok(traj) => {
                    let rel = tail_identity_defect(traj) / run.e0();
                    w.see(rel, rel <= t.tail_identity, run.label(), larger);
                }
                Err(e) => w.fail(format!("{}: {e}", run.label())),
            }
        }
        // The O(h²) boundary term at coarser steps, for the record.
        let coarse = self
            .dissipation_runs()
            .0
            .iter()
            .filter_map(|r| r.traj.as_ref().ok().map(|traj| tail_identity_defect(traj) / r.e0()))
            .fold(0.0, f64::max);
        w.what = format!("{}; at h=1e-3/5e-4 the worst is {coarse:.2e}", w.what);
        (w, t.tail_identity, "upper")
    }

    fn decay_inverse_t(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        for run in self.slow_runs() {
            match run.traj.as_ref().map_err(String::clone).and_then(|tr| tail_decay(tr, 1.0, 1.0).map_err(|e| e.to_string())) {
                Ok(d) => w.see(d.decade_ratio, d.passes(t.decade_ratio), run.label(), larger),
                Err(e) => w.fail(format!("{}: {e}", run.label())),
            }
        }
        (w, t.decade_ratio, "upper")
    }

    fn decay_improved(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        for run in self.fast_runs().iter().filter(|r| r.spec.problem != "far-start") {
            let s = 1.0 + run.alpha() - 0.1;
            match run.traj.as_ref().map_err(String::clone).and_then(|tr| tail_decay(tr, s, 1.0).map_err(|e| e.to_string())) {
                Ok(d) => {
                    let ok = d.superpolynomial || d.decade_ratio <= t.decade_ratio;
                    let tag = if d.superpolynomial { " (superpolynomial)" } else { "" };
                    w.see(d.decade_ratio, ok, format!("{}{tag}", run.label()), larger);
                }
                Err(e) => w.fail(format!("{}: {e}", run.label())),
            }
        }
        (w, t.decade_ratio, "upper")
    }

    fn premise(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        for run in self.decay_regime_runs() {
            let r = -run.alpha();
            match run.traj.as_ref().map_err(String::clone).and_then(|tr| weighted_energy_report(tr, r, t.theta).map_err(|e| e.to_string())) {
                Ok(rep) => w.see(rep.last_decade_share(), rep.saturated, run.label(), larger),
                Err(e) => w.fail(format!("{}: {e}", run.label())),
            }
        }
        (w, t.theta, "upper")
    }

    fn weighted_decay_chain(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        let mut premises = 0;
        for run in self.decay_regime_runs() {
            let alpha = run.alpha();
            let mut rs = vec![-alpha];
            push_unique(&mut rs, 0.0);
            for r in rs {
                let what = format!("{} r={r}", run.label());
                match run
                    .traj
                    .as_ref()
                    .map_err(String::clone)
                    .and_then(|tr| check_weighted_decay(tr, r, alpha, t.theta).map_err(|e| e.to_string()))
                {
                    Ok(rep) => {
                        premises += usize::from(rep.premise.saturated);
                        // Metric: share of the speed integral in its last decade.
                        let share = if rep.premise.saturated { rep.conclusion_speed.last_decade_share() } else { 0.0 };
                        w.see(share, rep.holds(), what, larger);
                    }
                    Err(e) => w.fail(format!("{what}: {e}")),
                }
            }
        }
        w.what = format!("{}; {premises} saturated premises", w.what);
        (w, t.theta, "upper")
    }

    fn bootstrap(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        for run in self.fast_runs().iter().filter(|r| (r.alpha() - 0.75).abs() < 1e-12) {
            match run
                .traj
                .as_ref()
                .map_err(String::clone)
                .and_then(|tr| check_bootstrap(tr, 0.75, -0.7, t.theta).map_err(|e| e.to_string()))
            {
                Ok(b) => {
                    let share = b.premise.last_decade_share().max(b.conclusion.last_decade_share());
                    w.see(share, b.premise.saturated && b.conclusion.saturated, run.label(), larger);
                }
                Err(e) => w.fail(format!("{}: {e}", run.label())),
            }
        }
        (w, t.theta, "upper")
    }

    fn anchor(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(f64::NEG_INFINITY);
        for run in &self.dissipation_runs().0 {
            match run.traj.as_ref().map_err(String::clone).and_then(|tr| check_anchor_inequality(tr, 1.0).map_err(|e| e.to_string())) {
                Ok(a) => {
                    let rel = a.max_violation / (1.0 + run.e0());
                    w.see(rel, rel <= t.anchor, format!("{} at t={}", run.label(), a.at_t), larger);
                }
                Err(e) => w.fail(format!("{}: {e}", run.label())),
            }
        }
        (w, t.anchor, "upper")
    }

    fn convergence(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        let mut worst_parts = (0.0f64, 0.0f64, 0.0f64);
        for run in self.decay_regime_runs().filter(|r| CONVERGENCE_PROBLEMS.contains(&r.spec.problem)) {
            match run
                .traj
                .as_ref()
                .map_err(String::clone)
                .and_then(|tr| check_convergence(tr, &run.problem.certified, t.gradient).map_err(|e| e.to_string()))
            {
                Ok(c) => {
                    let (d, cd, g) = (c.final_dist(), c.cauchy_defect, c.gradient_norm);
                    worst_parts = (worst_parts.0.max(d), worst_parts.1.max(cd), worst_parts.2.max(g));
                    let ok = d <= t.dist && cd <= t.cauchy && g <= t.gradient;
                    // Metric: largest ratio of a component to its tolerance.
                    let m = (d / t.dist).max(cd / t.cauchy).max(g / t.gradient);
                    w.see(m, ok, format!("{} dist={d:.2e} cauchy={cd:.2e} grad={g:.2e}", run.label()), larger);
                }
                Err(e) => w.fail(format!("{}: {e}", run.label())),
            }
        }
        w.what = format!(
            "{}; maxima dist={:.2e} cauchy={:.2e} grad={:.2e}",
            w.what, worst_parts.0, worst_parts.1, worst_parts.2
        );
        (w, 1.0, "upper")
    }

    fn control(&self) -> (Worst, f64, &'static str) {
        let t = &self.tol;
        let mut w = Worst::new(0.0);
        let run = self.control_run();
        let traj = match &run.traj {
            Ok(tr) => tr,
            Err(e) => {
                w.fail(format!("{}: {e}", run.label()));
                return (w, t.control_exponent, "upper");
            }
        };
        match weighted_energy_report(traj, 0.0, t.theta) {
            Ok(rep) if rep.saturated => w.fail(format!("∫E saturated (share {:.3})", rep.last_decade_share())),
            Ok(rep) => w.what = format!("∫E share {:.3}", rep.last_decade_share()),
            Err(e) => w.fail(e.to_string()),
        }
        match fit_decay_rate(traj, 1.0, &[]) {
            Ok(fit) => {
                let what = format!("{}; fitted exponent {:.4}", w.what, fit.fitted_exponent);
                w.see(fit.fitted_exponent.abs(), fit.fitted_exponent.abs() <= t.control_exponent, what, larger);
            }
            Err(e) => w.fail(e.to_string()),
        }
        (w, t.control_exponent, "upper")
    }
}
