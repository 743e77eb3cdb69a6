//! The acceptance suite: every criterion runs its experiments and reports
//! one pass/fail line with its runtime.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::experiments::{by_criterion, run_experiment, Ctx};
use crate::report::Report;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub criterion: u32,
    pub pass: bool,
    pub elapsed: Duration,
    /// Failed checks and errors, one per entry.
    pub failures: Vec<String>,
    pub reports: Vec<Report>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("criterion {:>2}: {status} ({:.1}s)", self.criterion, self.elapsed.as_secs_f64());
        if !self.failures.is_empty() {
            s.push_str(" - ");
            s.push_str(&self.failures.join("; "));
        }
        s
    }
}

pub fn run_criterion(c: u32, ctx: &Ctx) -> CriterionResult {
    let start = Instant::now();
    let mut failures = vec![];
    let mut reports = vec![];
    for e in by_criterion(c) {
        match run_experiment(e, ctx) {
            Ok(r) => {
                failures.extend(
                    r.checks
                        .iter()
                        .filter(|ch| !ch.pass)
                        .map(|ch| format!("{}: {} ({})", e.id, ch.name, ch.detail)),
                );
                reports.push(r);
            }
            Err(err) => failures.push(format!("{err:#}")),
        }
    }
    CriterionResult {
        criterion: c,
        pass: failures.is_empty(),
        elapsed: start.elapsed(),
        failures,
        reports,
    }
}

/// Runs the selected criteria concurrently on up to `workers` threads;
/// results come back in criterion order.
pub fn run_suite(criteria: &[u32], ctx: &Ctx, workers: usize) -> Vec<CriterionResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| criteria.par_iter().map(|&c| run_criterion(c, ctx)).collect())
}

pub const ALL_CRITERIA: [u32; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];
