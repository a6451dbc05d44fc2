use vanishdamp::dynamics::{energy_increase, integrate, IntegratorConfig};
use vanishdamp::model::DampingSchedule;
use vanishdamp::problems::{catalog, problem};

#[test]
fn catalog_energies_decrease_over_long_runs() {
    let sched = DampingSchedule::power_law(1.0, 0.5).unwrap();
    let h = 5e-3;
    for p in catalog() {
        let traj = integrate(&p.certified, &sched, &p.init, &IntegratorConfig::new(h, 1e4)).unwrap();
        let e0 = traj.first().record.energy;
        // Rises are bounded by the O(h²) offset between E and the scheme's conserved shadow energy.
        let bound = h * h * (p.op().norm() + p.lipschitz_bound().unwrap()) * e0 / 4.0;
        assert!(energy_increase(&traj) <= bound, "{}: rise {:e} > {bound:e}", p.id, energy_increase(&traj));
        assert!(traj.last().record.energy < e0, "{}", p.id);
    }
}

#[test]
fn far_start_reaches_the_limit_of_its_near_twin() {
    let sched = DampingSchedule::power_law(1.0, 0.5).unwrap();
    let cfg = IntegratorConfig::new(5e-3, 1e4);
    let limit = |id: &str| {
        let p = problem(id).unwrap();
        let traj = integrate(&p.certified, &sched, &p.init, &cfg).unwrap();
        let u = traj.last().state.u.clone();
        assert!(p.certified.gradient_norm(&u) <= 1e-5, "{id}");
        u
    };
    let (near, far) = (limit("semilinear-wave-20"), limit("far-start"));
    let gap = near.iter().zip(&far).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    assert!(gap <= 1e-5, "{gap:e}");
}

#[test]
fn degenerate_limit_lies_on_the_minimizer_line() {
    let p = problem("degenerate-flat").unwrap();
    let sched = DampingSchedule::power_law(1.0, 0.5).unwrap();
    let traj = integrate(&p.certified, &sched, &p.init, &IntegratorConfig::new(5e-3, 1e4)).unwrap();
    let u = &traj.last().state.u;
    assert!(p.certified.dist_to_argmin(u) <= 1e-6);
    // The flat coordinate keeps a drift-dependent value away from its start.
    assert!((u[1] - p.init.u[1]).abs() > 1e-3);
}
