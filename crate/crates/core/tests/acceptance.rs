//! Runs every acceptance criterion and prints one PASS/FAIL line each.

use std::process::ExitCode;

use spatperm::verify::{run_criterion, VerifyOptions};

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for id in 1..=11 {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let r = run_criterion(id, &opts);
        println!(
            "{} criterion {:>2} ({}): measured {:.6e}, target {:.6e}, tolerance {:.3e}, {:.2}s/{}s | {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.measured,
            r.target,
            r.tolerance,
            r.seconds,
            r.runtime_limit,
            r.detail
        );
        failed += usize::from(!r.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
