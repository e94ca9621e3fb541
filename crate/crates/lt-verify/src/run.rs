//! Executes the selected suites over every resolved configuration.

use std::time::Instant;


use rayon::prelude::*;

use crate::checks::{run_suite, RunCtx};
use crate::config::RunConfig;
use crate::report::{sort_records, Record, Summary};

/// All records for one configuration; a setup failure becomes a single failed record.
pub fn run_config(cfg: &RunConfig) -> Vec<Record> {
    let t = Instant::now();
    let ctx = match RunCtx::build(cfg) {
        Ok(c) => c,
        Err(e) => {
            let mut r = Record::new(cfg.suites[0], "setup", Default::default()).verdict(false).detail("error", e);
            r.params.insert("p".into(), cfg.p.into());
            r.params.insert("d".into(), cfg.d.into());
            return vec![r];
        }
    };
    let setup_ms = t.elapsed().as_millis() as u64;
    let mut out: Vec<Record> = cfg.suites.par_iter().flat_map_iter(|&s| run_suite(&ctx, s)).collect();
    // sampling is shared by the suites; charge it to every record of the run
    for r in &mut out {
        r.wall_ms += setup_ms;
    }
    out
}

/// Runs every configuration and returns the sorted records with their summary.
pub fn run(cfgs: &[RunConfig]) -> (Vec<Record>, Summary) {
    let t = Instant::now();
    let mut rs: Vec<Record> = cfgs.par_iter().flat_map_iter(run_config).collect();
    sort_records(&mut rs);
    let summary = Summary::of(&rs, t.elapsed().as_millis() as u64);
    (rs, summary)
}
