//! One line per acceptance criterion; exits nonzero if any fails.
//!
//! `ACCEPTANCE_SUITE=quick` trims Monte Carlo sizes; the default is full.

use fracskellam::validation::{run_suite, Suite, ValidationOptions};

fn main() {
    let suite = match std::env::var("ACCEPTANCE_SUITE").as_deref() {
        Ok("quick") => Suite::Quick,
        _ => Suite::Full,
    };
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let opts = ValidationOptions { suite, ..ValidationOptions::default() };
    let report = run_suite(&opts, &ids).expect("criterion ids are valid");
    for c in &report.criteria {
        println!("{}", c.line());
        for check in &c.checks {
            let mark = if check.passed { "ok  " } else { "FAIL" };
            println!("    {mark} {}: {:.6e} ({})", check.name, check.measured, check.threshold);
        }
    }
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} of {} criteria passed", report.criteria.len() - failed, report.criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
