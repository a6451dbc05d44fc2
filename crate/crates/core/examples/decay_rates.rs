//! Fits the energy decay exponent on the kernel-quartic problem, where the
//! decay is polynomial and its exponent grows with α.

use vanishdamp::analysis::{fit_decay_rate, tail_decay, AnalysisError};
use vanishdamp::dynamics::{integrate, IntegratorConfig};
use vanishdamp::model::DampingSchedule;
use vanishdamp::problems::problem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = problem("kernel-quartic").expect("catalog problem");
    let t_end = 1e5;
    for alpha in [0.0, 0.25, 0.5, 0.75] {
        let sched = DampingSchedule::power_law(1.0, alpha)?;
        let traj = integrate(&p.certified, &sched, &p.init, &IntegratorConfig::new(5e-3, t_end))?;
        let tail = tail_decay(&traj, 1.0, 1.0)?;
        match fit_decay_rate(&traj, 1.0, &[1.0]) {
            Ok(fit) => println!(
                "α = {alpha:<5} exponent {:.3} (rms {:.1e}), t·E ratio over the last decade {:.3e}",
                fit.fitted_exponent, fit.residual, tail.decade_ratio
            ),
            Err(AnalysisError::EnergyUnderflow { t, .. }) => println!("α = {alpha:<5} superpolynomial (underflow by t = {t})"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}
