//! Loads a custom problem file, certifies it and integrates it.

use vanishdamp::analysis::fit_decay_rate;
use vanishdamp::dynamics::{dissipation_residual, integrate, IntegratorConfig};
use vanishdamp::model::DampingSchedule;
use vanishdamp::problems::CustomProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/custom.toml");
    let custom: CustomProblem = toml::from_str(&std::fs::read_to_string(path)?)?;
    let p = custom.build()?;
    println!("{}: minimizer {:?}, min φ = {:.6}", p.id, p.certified.minimizer(), p.certified.min_phi());

    let sched = DampingSchedule::power_law(1.0, 0.5)?;
    let traj = integrate(&p.certified, &sched, &p.init, &IntegratorConfig::new(1e-3, 200.0))?;
    println!("dissipation residual {:.3e}", dissipation_residual(&traj));
    match fit_decay_rate(&traj, 1.0, &[]) {
        Ok(fit) => println!("fitted exponent {:.3}", fit.fitted_exponent),
        Err(e) => println!("no fit: {e}"),
    }
    Ok(())
}
