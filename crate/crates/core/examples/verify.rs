//! Runs one group of the acceptance suite (default `integrator`).
//!
//! `cargo run --release --example verify -- dissipation`

use vanishdamp::cli::{Group, Suite};

fn main() -> Result<(), String> {
    let group: Group = std::env::args().nth(1).as_deref().unwrap_or("integrator").parse()?;
    let report = Suite::default().run(Some(group));
    println!("{report}");
    Ok(())
}
