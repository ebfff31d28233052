//! Acceptance criteria: one PASS/FAIL line per check. Exits non-zero when
//! any check fails.

use std::process::ExitCode;
use std::time::Instant;

use concentrate::verify::{run_all, VerifyConfig};

fn main() -> ExitCode {
    let start = Instant::now();
    let checks = run_all(&VerifyConfig::default());
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed ({:.1} s)",
        checks.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
