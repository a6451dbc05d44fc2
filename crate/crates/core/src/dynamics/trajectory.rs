use std::io::{Read, Write};

use super::{DynamicsError, EnergyRecord, StateVector};

/// Running integrals at a sample time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccumulatorSnapshot {
    /// ∫₀ᵗ γ|u'|²
    pub dissipation: f64,
    /// ∫₀ᵗ (1+s)^r E(s) ds, aligned with `TrajectoryMeta::energy_exponents`.
    pub weighted_energy: Vec<f64>,
    /// ∫₀ᵗ (1+s)^q |u'(s)|² ds, aligned with `TrajectoryMeta::speed_exponents`.
    pub weighted_speed: Vec<f64>,
    /// p(t) = ½|u(t) − v|²
    pub p: f64,
    /// Backward difference of p at step resolution.
    pub dp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Empty `u`/`w` when the trajectory was loaded from csv.
    pub state: StateVector,
    pub record: EnergyRecord,
    pub acc: AccumulatorSnapshot,
    /// p one integrator step before and after the sample.
    pub p_prev: f64,
    pub p_next: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub problem_id: String,
    pub scheme: String,
    pub h: f64,
    pub t_end: f64,
    pub sample_ratio: f64,
    pub energy_exponents: Vec<f64>,
    pub speed_exponents: Vec<f64>,
    pub anchor: Vec<f64>,
    pub schedule: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub samples: Vec<Sample>,
}

fn find_exponent(list: &[f64], x: f64) -> Option<usize> {
    list.iter().position(|&r| (r - x).abs() <= 1e-12 * (1.0 + x.abs()))
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.record.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.record.energy).collect()
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn energy_index(&self, r: f64) -> Option<usize> {
        find_exponent(&self.meta.energy_exponents, r)
    }

    pub fn speed_index(&self, q: f64) -> Option<usize> {
        find_exponent(&self.meta.speed_exponents, q)
    }

    /// Running ∫(1+s)^r E over the samples, if `r` was configured.
    pub fn weighted_energy_series(&self, r: f64) -> Option<Vec<f64>> {
        let k = self.energy_index(r)?;
        Some(self.samples.iter().map(|s| s.acc.weighted_energy[k]).collect())
    }

    pub fn weighted_speed_series(&self, q: f64) -> Option<Vec<f64>> {
        let k = self.speed_index(q)?;
        Some(self.samples.iter().map(|s| s.acc.weighted_speed[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DynamicsError> {
        let mut wr = csv::Writer::from_writer(out);
        let mut header: Vec<String> =
            ["t", "E", "speed_sq", "gamma", "phi_gap", "dissipation"].iter().map(|s| s.to_string()).collect();
        header.extend(self.meta.energy_exponents.iter().map(|r| format!("wE_r{}", exponent_label(*r))));
        header.extend(self.meta.speed_exponents.iter().map(|q| format!("wS_q{}", exponent_label(*q))));
        header.push("p".into());
        header.push("dp".into());
        wr.write_record(&header).map_err(csv_err)?;
        for s in &self.samples {
            let mut row = vec![
                fmt_f64(s.record.t),
                fmt_f64(s.record.energy),
                fmt_f64(s.record.speed_sq),
                fmt_f64(s.record.gamma),
                fmt_f64(s.record.phi_gap),
                fmt_f64(s.acc.dissipation),
            ];
            row.extend(s.acc.weighted_energy.iter().map(|v| fmt_f64(*v)));
            row.extend(s.acc.weighted_speed.iter().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(s.acc.p));
            row.push(fmt_f64(s.acc.dp));
            wr.write_record(&row).map_err(csv_err)?;
        }
        wr.flush().map_err(|e| DynamicsError::Csv(e.to_string()))?;
        Ok(())
    }

    /// Reads a trajectory csv back. Positions and velocities are not stored in
    /// the csv, so the loaded samples carry empty state vectors.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, DynamicsError> {
        let mut rd = csv::Reader::from_reader(input);
        let header = rd.headers().map_err(csv_err)?.clone();
        let col = |name: &str| header.iter().position(|h| h == name);
        let need = |name: &str| col(name).ok_or_else(|| DynamicsError::Csv(format!("missing column `{name}`")));
        let (ct, ce) = (need("t")?, need("E")?);
        let optional = ["speed_sq", "gamma", "phi_gap", "dissipation", "p", "dp"].map(col);
        let mut energy_exponents = Vec::new();
        let mut energy_cols = Vec::new();
        let mut speed_exponents = Vec::new();
        let mut speed_cols = Vec::new();
        for (i, h) in header.iter().enumerate() {
            if let Some(r) = h.strip_prefix("wE_r") {
                energy_exponents.push(parse_num(r)?);
                energy_cols.push(i);
            } else if let Some(q) = h.strip_prefix("wS_q") {
                speed_exponents.push(parse_num(q)?);
                speed_cols.push(i);
            }
        }
        let mut samples = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(csv_err)?;
            let get = |i: usize| parse_num(rec.get(i).unwrap_or(""));
            let opt = |c: Option<usize>| -> Result<f64, DynamicsError> { c.map_or(Ok(f64::NAN), get) };
            let t = get(ct)?;
            let record = EnergyRecord {
                t,
                energy: get(ce)?,
                speed_sq: opt(optional[0])?,
                gamma: opt(optional[1])?,
                phi_gap: opt(optional[2])?,
            };
            let acc = AccumulatorSnapshot {
                dissipation: opt(optional[3])?,
                weighted_energy: energy_cols.iter().map(|&i| get(i)).collect::<Result<_, _>>()?,
                weighted_speed: speed_cols.iter().map(|&i| get(i)).collect::<Result<_, _>>()?,
                p: opt(optional[4])?,
                dp: opt(optional[5])?,
            };
            samples.push(Sample {
                state: StateVector::new(t, Vec::new(), Vec::new()),
                record,
                acc,
                p_prev: f64::NAN,
                p_next: f64::NAN,
            });
        }
        if samples.is_empty() {
            return Err(DynamicsError::Csv("no data rows".into()));
        }
        let t_end = samples.last().map(|s| s.record.t).unwrap_or(f64::NAN);
        Ok(Trajectory {
            meta: TrajectoryMeta {
                problem_id: "csv".into(),
                scheme: "unknown".into(),
                h: f64::NAN,
                t_end,
                sample_ratio: f64::NAN,
                energy_exponents,
                speed_exponents,
                anchor: Vec::new(),
                schedule: "unknown".into(),
            },
            samples,
        })
    }
}

fn csv_err(e: csv::Error) -> DynamicsError {
    DynamicsError::Csv(e.to_string())
}

fn parse_num(s: &str) -> Result<f64, DynamicsError> {
    s.trim().parse::<f64>().map_err(|_| DynamicsError::Csv(format!("not a number: `{s}`")))
}

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Column suffix for an exponent, e.g. `-0.5` or `0`.
pub fn exponent_label(r: f64) -> String {
    fmt_f64(r)
}

/// `max_k |E(t_k) − E(0) + ∫₀^{t_k} γ|u'|²|`, the discrete energy-balance defect.
pub fn dissipation_residual(traj: &Trajectory) -> f64 {
    let e0 = traj.first().record.energy;
    let d0 = traj.first().acc.dissipation;
    traj.samples
        .iter()
        .map(|s| (s.record.energy - e0 + (s.acc.dissipation - d0)).abs())
        .fold(0.0, f64::max)
}

/// `max_k |[E(t_k) − E(t_end)] − ∫_{t_k}^{t_end} γ|u'|²|`.
pub fn tail_identity_defect(traj: &Trajectory) -> f64 {
    let end = traj.last();
    traj.samples
        .iter()
        .map(|s| ((s.record.energy - end.record.energy) - (end.acc.dissipation - s.acc.dissipation)).abs())
        .fold(0.0, f64::max)
}

/// Largest rise `max (E_{k+1} − E_k)` between consecutive samples, clamped at 0.
pub fn energy_increase(traj: &Trajectory) -> f64 {
    traj.samples.windows(2).map(|p| p[1].record.energy - p[0].record.energy).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.0, -0.5, 1e-300, 123456.789, 1e20, 5e-324, f64::MAX, 0.1 + 0.2] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(1e-300), "1e-300");
        assert_eq!(exponent_label(-0.75), "-0.75");
        assert_eq!(exponent_label(0.0), "0");
    }
}
