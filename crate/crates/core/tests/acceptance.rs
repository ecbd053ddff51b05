//! Runs every acceptance criterion, printing one PASS/FAIL line each, and
//! exits nonzero if any fails.

use std::process::ExitCode;

fn main() -> ExitCode {
    let outcomes = axion_optomech::acceptance::run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
