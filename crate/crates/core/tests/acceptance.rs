//! One pass/fail line per acceptance criterion; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use resurgence::verify::{run_criterion, VerifyOptions};

fn main() -> ExitCode {
    let opts = VerifyOptions { quick: std::env::var_os("ACCEPTANCE_QUICK").is_some() };
    let mut failed = 0;
    for id in 1..=10 {
        let start = Instant::now();
        let report = run_criterion(id, opts);
        println!("{} [{:.1}s]", report.line(), start.elapsed().as_secs_f64());
        if !report.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
