//! One line per acceptance criterion; exits nonzero when any fails.

use std::process::ExitCode;

use corrko_cli::acceptance::{run_suite, ALL_CRITERIA};
use corrko_cli::experiments::Ctx;

fn main() -> ExitCode {
    // Ignore libtest flags such as `--nocapture` or `--quiet`.
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let results = run_suite(&ALL_CRITERIA, &Ctx::default(), workers);
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
