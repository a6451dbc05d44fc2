//! The eleven acceptance criteria. Runs without the libtest harness so that
//! every result line is printed, passing or not; exits 1 if any fails.

use std::process::ExitCode;

use vanishdamp::cli::{Criterion, Suite};

fn main() -> ExitCode {
    let suite = Suite::default();
    let mut failed = Vec::new();
    for c in Criterion::ALL {
        let r = suite.check(c.id);
        println!("{r}");
        if !r.pass {
            failed.push(c.id);
        }
    }
    println!("acceptance passed={} total={}", Criterion::ALL.len() - failed.len(), Criterion::ALL.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
