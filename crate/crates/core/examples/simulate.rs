//! Runs one configured simulation and prints where the artifacts went.
//!
//! `cargo run --release --example simulate [config.toml]`

use std::path::PathBuf;

use vanishdamp::cli::{output_dir, run_to_dir, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(&PathBuf::from(path))?,
        None => RunConfig::from_toml_str(
            r#"
[problem]
id = "semilinear-wave-20"

[schedule]
alpha = 0.6

[integrator]
h = 0.005
t_end = 1000.0

[output]
dir = "out/simulate-example"
emit_svg = true
"#,
        )?,
    };
    let outcome = run_to_dir(&cfg, &output_dir(&cfg.output.dir))?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    if let Some(report) = &outcome.report {
        println!("E(0) = {:.4e}, E(t_end) = {:.4e}", report.energy.initial, report.energy.last);
        match &report.rate.fit {
            Some(fit) => println!("fitted decay exponent {:.3} on [{}, {}]", fit.fitted_exponent, fit.window[0], fit.window[1]),
            None => println!("rate: {}", report.rate.mode),
        }
    }
    println!("status {} (exit code {})", outcome.status.label(), outcome.status.exit_code());
    Ok(())
}
