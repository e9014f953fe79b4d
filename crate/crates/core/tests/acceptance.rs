use std::process::ExitCode;
use std::time::Instant;

use weakwigner::checks::{acceptance, SuiteConfig};

fn main() -> ExitCode {
    let start = Instant::now();
    let cfg = SuiteConfig::full(1.0).expect("reference grid");
    let outcomes = acceptance(&cfg).expect("catalogue states on the reference grid");
    let mut failed = 0;
    for c in &outcomes {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let measured = c.measured.map_or_else(|| "n/a".to_string(), |m| format!("{m:.3e}"));
        println!("{status} {} measured={measured} tolerance={:.1e} {}", c.name, c.tolerance, c.detail);
        failed += usize::from(!c.passed);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        outcomes.len() - failed,
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
