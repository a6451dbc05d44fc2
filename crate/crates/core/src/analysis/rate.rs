use serde::Serialize;

use super::AnalysisError;
use crate::dynamics::Trajectory;

/// Energies at or below this value are treated as underflow.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

pub const MIN_FIT_SAMPLES: usize = 40;

/// Least-squares slope of `−log E` against `log t` on a tail window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub fitted_exponent: f64,
    pub window: [f64; 2],
    /// Root-mean-square residual of the fit in `log E`.
    pub residual: f64,
    pub samples: usize,
    /// `(s, max t^s·E(t))` over the window for each probe `s`.
    pub tail_sup: Vec<(f64, f64)>,
}

impl RateReport {
    pub fn tail_sup(&self, s: f64) -> Option<f64> {
        self.tail_sup.iter().find(|(p, _)| (p - s).abs() < 1e-12).map(|(_, v)| *v)
    }
}

/// Fits the decay exponent over the last `decades` decades of `(t, E)`.
pub fn fit_decay_samples(t: &[f64], e: &[f64], decades: f64, probes: &[f64]) -> Result<RateReport, AnalysisError> {
    if !(decades > 0.0 && decades <= 2.0) {
        return Err(AnalysisError::BadWindow(decades));
    }
    let t_hi = match t.last() {
        Some(&v) if v > 0.0 => v,
        _ => return Err(AnalysisError::TooFewSamples { found: 0, needed: MIN_FIT_SAMPLES }),
    };
    let t_lo = t_hi / 10f64.powf(decades);
    let idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] > 0.0 && t[i] >= t_lo * (1.0 - 1e-12)).collect();
    if idx.len() < MIN_FIT_SAMPLES {
        return Err(AnalysisError::TooFewSamples { found: idx.len(), needed: MIN_FIT_SAMPLES });
    }
    if let Some(&i) = idx.iter().find(|&&i| !(e[i] > UNDERFLOW_FLOOR)) {
        return Err(AnalysisError::EnergyUnderflow { t: t[i], energy: e[i] });
    }
    let xs: Vec<f64> = idx.iter().map(|&i| t[i].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| -e[i].ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / m).sqrt();
    let tail_sup = probes
        .iter()
        .map(|&s| (s, idx.iter().map(|&i| (s * t[i].ln() + e[i].ln()).exp()).fold(0.0, f64::max)))
        .collect();
    Ok(RateReport { fitted_exponent: slope, window: [t_lo, t_hi], residual, samples: idx.len(), tail_sup })
}

pub fn fit_decay_rate(traj: &Trajectory, decades: f64, probes: &[f64]) -> Result<RateReport, AnalysisError> {
    fit_decay_samples(&traj.times(), &traj.energies(), decades, probes)
}

/// Finite-horizon proxy for `E(t) = o(t^{−s})`: behavior of `t^s·E(t)` on
/// the tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailDecay {
    pub s: f64,
    pub t_hi: f64,
    /// Sample time nearest (in log t) to `t_hi/10`.
    pub t_decade: f64,
    pub value_decade: f64,
    pub value_end: f64,
    /// `value_end / value_decade` (0 when both vanish).
    pub decade_ratio: f64,
    /// `t^s·E` never increases between consecutive samples of the monotone window.
    pub nonincreasing: bool,
    /// Largest relative rise `v_{k+1}/v_k − 1` inside the monotone window.
    pub worst_rise: f64,
    /// E fell to the underflow floor by `t_hi`.
    pub superpolynomial: bool,
}

impl TailDecay {
    /// Decade-ratio and monotonicity proxy; superpolynomial decay always passes.
    pub fn passes(&self, max_ratio: f64) -> bool {
        self.superpolynomial || (self.decade_ratio <= max_ratio && self.nonincreasing)
    }
}

/// `t^s·E(t)` tail diagnostics with monotonicity checked over the last
/// `monotone_decades` decades.
pub fn tail_decay_samples(t: &[f64], e: &[f64], s: f64, monotone_decades: f64) -> Result<TailDecay, AnalysisError> {
    let n = t.len();
    if n < 2 || t[n - 1] <= 0.0 {
        return Err(AnalysisError::TooFewSamples { found: n, needed: 2 });
    }
    let t_hi = t[n - 1];
    let target = (t_hi / 10.0).ln();
    let k10 = (0..n)
        .filter(|&i| t[i] > 0.0)
        .min_by(|&a, &b| (t[a].ln() - target).abs().total_cmp(&(t[b].ln() - target).abs()))
        .ok_or(AnalysisError::TooFewSamples { found: 0, needed: 2 })?;
    let value = |i: usize| if e[i] > 0.0 { (s * t[i].ln() + e[i].ln()).exp() } else { 0.0 };
    let (v10, vend) = (value(k10), value(n - 1));
    let decade_ratio = if v10 > 0.0 { vend / v10 } else if vend == 0.0 { 0.0 } else { f64::INFINITY };
    let t_mono = t_hi / 10f64.powf(monotone_decades) * (1.0 - 1e-12);
    let mut nonincreasing = true;
    let mut worst_rise: f64 = 0.0;
    let window: Vec<usize> = (0..n).filter(|&i| t[i] > 0.0 && t[i] >= t_mono).collect();
    for pair in window.windows(2) {
        let (a, b) = (value(pair[0]), value(pair[1]));
        if b > a {
            nonincreasing = false;
            worst_rise = worst_rise.max(if a > 0.0 { b / a - 1.0 } else { f64::INFINITY });
        }
    }
    Ok(TailDecay {
        s,
        t_hi,
        t_decade: t[k10],
        value_decade: v10,
        value_end: vend,
        decade_ratio,
        nonincreasing,
        worst_rise,
        superpolynomial: !(e[n - 1] > UNDERFLOW_FLOOR),
    })
}

pub fn tail_decay(traj: &Trajectory, s: f64, monotone_decades: f64) -> Result<TailDecay, AnalysisError> {
    tail_decay_samples(&traj.times(), &traj.energies(), s, monotone_decades)
}
