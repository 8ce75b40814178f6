//! Runs the acceptance computations and bundles them into one report.

use crate::criteria::{Faults, Outcome, CRITERIA};
use serde::Serialize;
use std::time::Duration;

#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    pub quick: bool,
    pub faults: Faults,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub quick: bool,
    pub criteria: Vec<Outcome>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn failed_ids(&self) -> Vec<u8> {
        self.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }
}

/// Timings stay out of the report so that it is reproducible byte for byte.
pub fn pipeline_paper_suite(opts: SuiteOptions, mut on_done: impl FnMut(&Outcome, Duration)) -> SuiteReport {
    let mut criteria = Vec::new();
    for c in CRITERIA.iter().filter(|c| !opts.quick || c.quick) {
        let (outcome, elapsed) = c.evaluate(&opts.faults);
        on_done(&outcome, elapsed);
        criteria.push(outcome);
    }
    let passed = criteria.iter().all(|c| c.passed);
    SuiteReport { quick: opts.quick, criteria, passed }
}
