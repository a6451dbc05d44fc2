//! Convergence of the trajectory to the minimizer set from a far initial
//! state, with the anchor inequality checked along the way.

use vanishdamp::analysis::{check_anchor_inequality, check_convergence};
use vanishdamp::dynamics::{integrate, IntegratorConfig};
use vanishdamp::model::DampingSchedule;
use vanishdamp::problems::problem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for id in ["degenerate-flat", "far-start"] {
        let p = problem(id).expect("catalog problem");
        for alpha in [0.25, 0.5, 0.75] {
            let sched = DampingSchedule::power_law(1.0, alpha)?;
            let traj = integrate(&p.certified, &sched, &p.init, &IntegratorConfig::new(5e-3, 1e4))?;
            let c = check_convergence(&traj, &p.certified, 1e-5)?;
            let a = check_anchor_inequality(&traj, 1.0)?;
            println!(
                "{id:<16} α = {alpha:<5} dist {:.2e}  cauchy {:.2e}  ‖∇φ‖ {:.2e}  anchor max {:.2e}",
                c.final_dist(),
                c.cauchy_defect,
                c.gradient_norm,
                a.max_violation
            );
        }
    }
    Ok(())
}
