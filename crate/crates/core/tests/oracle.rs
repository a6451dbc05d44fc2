//! The production integrator against the adaptive reference solver on every
//! catalog problem over a moderate horizon.

use vanishdamp::dynamics::reference::reference_solution;
use vanishdamp::dynamics::{integrate, IntegratorConfig};
use vanishdamp::model::DampingSchedule;
use vanishdamp::problems::catalog;

#[test]
fn catalog_matches_reference_at_t_100() {
    let sched = DampingSchedule::power_law(1.0, 0.5).unwrap();
    for p in catalog() {
        let t_end = 100.0;
        let traj = integrate(&p.certified, &sched, &p.init, &IntegratorConfig::new(1e-3, t_end)).unwrap();
        let reference = reference_solution(&p.certified, &sched, &p.init, t_end, 1e-10).unwrap();
        let u = &traj.last().state.u;
        let du = u.iter().zip(&reference.u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(du <= 1e-4, "{}: ‖Δu‖ = {du:e}", p.id);
    }
}
