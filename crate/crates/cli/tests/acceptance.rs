//! Runs every acceptance check at full size and prints one line per check.

use std::process::ExitCode;

use elstat::suite::{run_suite, Suite};

fn main() -> ExitCode {
    let outcomes = run_suite(Suite::Full);
    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2}: {} [{} ms] — {}", o.id, o.name, o.runtime_ms, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
