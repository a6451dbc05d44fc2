use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vanishdamp::analysis::{fit_decay_samples, integrability_set};
use vanishdamp::cli::RunConfig;
use vanishdamp::dynamics::{dissipation_residual, integrate, IntegratorConfig, StateVector, Trajectory};
use vanishdamp::model::{gradient_fd_defect, midpoint_convexity_excess, CompositePotential, DampingSchedule, OperatorSpec, PotentialSpec};

fn small_problem(a: f64, b: f64, weight: f64, shift: f64) -> CompositePotential {
    let op = OperatorSpec::diagonal(&[a, b], 1.0).unwrap();
    let pot = PotentialSpec::quartic(vec![shift, -shift], vec![weight, weight]).unwrap();
    CompositePotential::certify(op, pot).unwrap()
}

fn run(cp: &CompositePotential, alpha: f64, u0: [f64; 2], w0: [f64; 2]) -> Trajectory {
    let sched = DampingSchedule::power_law(1.0, alpha).unwrap();
    let cfg = IntegratorConfig::new(5e-3, 50.0)
        .energy_exponents(&[-alpha, -0.5, 0.0, 0.5, 1.0, 2.0])
        .speed_exponents(&[1.0 - alpha, alpha]);
    integrate(cp, &sched, &StateVector::new(0.0, u0.to_vec(), w0.to_vec()), &cfg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accumulators_are_nondecreasing(
        a in 0.0f64..4.0, b in 0.1f64..4.0, weight in 0.0f64..1.0, shift in -1.0f64..1.0,
        alpha in 0.0f64..0.95, u in prop::array::uniform2(-2.0f64..2.0), w in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let traj = run(&small_problem(a, b, weight, shift), alpha, u, w);
        for pair in traj.samples.windows(2) {
            let (x, y) = (&pair[0].acc, &pair[1].acc);
            prop_assert!(y.dissipation >= x.dissipation);
            for (p, q) in x.weighted_energy.iter().zip(&y.weighted_energy) {
                prop_assert!(q >= p);
            }
            for (p, q) in x.weighted_speed.iter().zip(&y.weighted_speed) {
                prop_assert!(q >= p);
            }
        }
    }

    #[test]
    fn energy_balance_holds_to_second_order(
        a in 0.5f64..4.0, weight in 0.0f64..1.0, alpha in 0.0f64..0.95, u in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let cp = small_problem(a, a, weight, 0.3);
        let traj = run(&cp, alpha, u, [0.0, 0.0]);
        let e0 = traj.first().record.energy;
        prop_assert!(dissipation_residual(&traj) <= 1e-4 * (1.0 + e0));
    }

    /// A heavier weight moves mass toward the tail, so the last-decade share
    /// grows with the exponent and saturation is downward closed.
    #[test]
    fn integrability_set_is_downward_closed(
        a in 0.5f64..4.0, b in 0.0f64..2.0, alpha in 0.0f64..0.95, u in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let cp = small_problem(a, b.max(1e-3), 0.2, 0.0);
        let traj = run(&cp, alpha, u, [0.1, 0.0]);
        let set = integrability_set(&traj, 0.05);
        for pair in set.windows(2) {
            prop_assert!(pair[0].exponent < pair[1].exponent);
            prop_assert!(pair[1].last_decade_share() >= pair[0].last_decade_share() - 1e-12);
            prop_assert!(!pair[1].saturated || pair[0].saturated);
        }
    }

    #[test]
    fn potential_gradients_match_finite_differences(
        x in prop::collection::vec(-3.0f64..3.0, 3), d in prop::collection::vec(-1.0f64..1.0, 3),
        shift in prop::collection::vec(-1.0f64..1.0, 3), weight in 0.0f64..2.0,
    ) {
        for pot in [
            PotentialSpec::quartic(shift.clone(), vec![weight; 3]).unwrap(),
            PotentialSpec::log_cosh(shift.clone(), vec![weight; 3]).unwrap(),
        ] {
            let scale = 1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max).powi(3);
            prop_assert!(gradient_fd_defect(&pot, &x, &d, 1e-5) <= 1e-6 * scale * (1.0 + weight));
        }
    }

    #[test]
    fn potentials_are_midpoint_convex(seed in any::<u64>(), weight in 0.0f64..3.0, shift in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for pot in [
            PotentialSpec::quartic(vec![shift; 4], vec![weight; 4]).unwrap(),
            PotentialSpec::log_cosh(vec![shift; 4], vec![weight; 4]).unwrap(),
        ] {
            prop_assert!(midpoint_convexity_excess(&pot, 4, 5.0, 32, &mut rng) <= 1e-9);
        }
    }

    #[test]
    fn integration_is_deterministic(alpha in 0.0f64..0.95, u in prop::array::uniform2(-2.0f64..2.0)) {
        let cp = small_problem(1.0, 0.5, 0.3, 0.2);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        run(&cp, alpha, u, [0.0, 0.1]).write_csv(&mut a).unwrap();
        run(&cp, alpha, u, [0.0, 0.1]).write_csv(&mut b).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn trajectory_csv_round_trips(alpha in 0.0f64..0.95, u in prop::array::uniform2(-2.0f64..2.0)) {
        let traj = run(&small_problem(2.0, 1.0, 0.5, 0.1), alpha, u, [0.2, 0.0]);
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let back = Trajectory::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), traj.len());
        for (x, y) in back.samples.iter().zip(&traj.samples) {
            prop_assert_eq!(x.record.t, y.record.t);
            prop_assert_eq!(x.record.energy, y.record.energy);
            prop_assert_eq!(&x.acc.weighted_energy, &y.acc.weighted_energy);
        }
        prop_assert_eq!(&back.meta.energy_exponents, &traj.meta.energy_exponents);
    }

    #[test]
    fn power_law_fit_recovers_exponent(rho in 0.2f64..4.0, c in 0.01f64..100.0) {
        let mut t: Vec<f64> = vec![1.0];
        while *t.last().unwrap() < 1e4 {
            t.push(t.last().unwrap() * 1.05);
        }
        let e: Vec<f64> = t.iter().map(|t| c * t.powf(-rho)).collect();
        let fit = fit_decay_samples(&t, &e, 1.0, &[]).unwrap();
        prop_assert!((fit.fitted_exponent - rho).abs() < 1e-8);
    }

    #[test]
    fn run_config_round_trips(
        alpha in 0.0f64..0.99, k in 0.1f64..5.0, h in 1e-4f64..1e-2, t_end in 1.0f64..1e4,
        theta in 0.01f64..0.5, svg in any::<bool>(),
        extra in prop::collection::vec(-0.9f64..3.0, 0..4),
    ) {
        let mut cfg = RunConfig::default();
        cfg.schedule.alpha = alpha;
        cfg.schedule.k = k;
        cfg.integrator.h = h;
        cfg.integrator.t_end = t_end;
        cfg.analysis.theta = theta;
        cfg.output.emit_svg = svg;
        cfg.accumulators.energy_exponents = extra;
        let text = cfg.to_toml_string();
        prop_assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
