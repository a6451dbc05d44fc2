//! Empirical integrability set of `∫(1+t)^r E`, the weighted decay chain for
//! `r ∈ {−α, 0}` and one step of the weight bootstrap.

use vanishdamp::analysis::{check_bootstrap, check_weighted_decay, integrability_set, supremum_saturated, DEFAULT_THETA};
use vanishdamp::dynamics::{integrate, IntegratorConfig};
use vanishdamp::model::DampingSchedule;
use vanishdamp::problems::problem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha = 0.75;
    let p = problem("kernel-quartic").expect("catalog problem");
    let sched = DampingSchedule::power_law(1.0, alpha)?;
    let cfg = IntegratorConfig::new(5e-3, 1e4)
        .energy_exponents(&[-alpha, -0.7, -0.45, 0.0, 0.5, 1.0, 1.5, 2.0])
        .speed_exponents(&[1.0 - 2.0 * alpha, 1.0 - alpha, alpha]);
    let traj = integrate(&p.certified, &sched, &p.init, &cfg)?;

    let set = integrability_set(&traj, DEFAULT_THETA);
    for r in &set {
        println!("r = {:<6} last-decade share {:.3e} saturated {}", r.exponent, r.last_decade_share(), r.saturated);
    }
    println!("largest saturated exponent: {:?}", supremum_saturated(&set));

    for r in [-alpha, 0.0] {
        let l = check_weighted_decay(&traj, r, alpha, DEFAULT_THETA)?;
        println!(
            "r = {r}: premise {} ⇒ decay {} and speed integral {} (holds: {})",
            l.premise.saturated,
            l.decay_holds(),
            l.conclusion_speed.saturated,
            l.holds()
        );
    }
    let b = check_bootstrap(&traj, alpha, -0.7, DEFAULT_THETA)?;
    println!("bootstrap ν = -0.7 → {:.2}: {} ⇒ {}", b.conclusion.exponent, b.premise.saturated, b.conclusion.saturated);
    Ok(())
}
