//! Measures the observed order of the damped velocity-Verlet scheme against
//! the adaptive Dormand–Prince reference on the damped oscillator.

use vanishdamp::dynamics::reference::reference_solution;
use vanishdamp::dynamics::{integrate, IntegratorConfig};
use vanishdamp::model::DampingSchedule;
use vanishdamp::problems::problem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = problem("scalar-harmonic").expect("catalog problem");
    let sched = DampingSchedule::power_law(1.0, 0.5)?;
    let t_end = 10.0;
    let reference = reference_solution(&p.certified, &sched, &p.init, t_end, 1e-13)?;
    let mut prev: Option<(f64, f64)> = None;
    for h in [2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let traj = integrate(&p.certified, &sched, &p.init, &IntegratorConfig::new(h, t_end))?;
        let s = &traj.last().state;
        let err = ((s.u[0] - reference.u[0]).powi(2) + (s.w[0] - reference.w[0]).powi(2)).sqrt();
        match prev {
            Some((hp, ep)) => println!("h = {h:<8} error = {err:.3e}  order = {:.3}", (ep / err).ln() / (hp / h).ln()),
            None => println!("h = {h:<8} error = {err:.3e}"),
        }
        prev = Some((h, err));
    }
    Ok(())
}
