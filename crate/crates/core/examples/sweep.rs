//! Small α sweep over two problems on a bounded worker pool.

use vanishdamp::cli::{output_dir, sweep, RunConfig, SweepConfig, SweepGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut base = RunConfig::default();
    base.integrator.h = 5e-3;
    base.integrator.t_end = 1e3;
    let cfg = SweepConfig {
        workers: 2,
        grid: SweepGrid {
            problems: vec!["kernel-quartic".into(), "semilinear-wave-20".into()],
            alpha: vec![0.25, 0.5, 0.75],
            ..SweepGrid::default()
        },
        ..SweepConfig::default()
    };
    let outcome = sweep(&cfg, &base, &output_dir(&cfg.dir))?;
    for r in &outcome.rows {
        println!("{:<20} α = {:<5} {:<16} exponent {:>8.3}  {}", r.problem, r.alpha, r.rate_mode, r.fitted_exponent, r.status);
    }
    println!("summary: {}", outcome.summary_path.display());
    Ok(())
}
