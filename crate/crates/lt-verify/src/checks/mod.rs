//! Per-suite checks over one resolved configuration.

mod anomaly;
mod coleman;
mod core;
mod equations;
mod exp;
mod lattice;

use std::time::Instant;

use lt_core::coleman::{CoherentUnit, ColemanCtx};
use lt_core::hecke::{anomaly_index, uniformiser_for, AnomalyData, HeckeInput};
use lt_core::lubin_tate::LtGroup;
use lt_core::series::Series;
use lt_core::unramified::Unr;
use lt_core::{PrimeConfig, Scalar};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{PiMode, RunConfig, Suite};
use crate::report::{Params, Record, Status};

/// Everything shared by the suites of one configuration.
pub struct RunCtx {
    pub cfg: RunConfig,
    pub c: ColemanCtx,
    pub hecke: Option<HeckeInput>,
    pub anom: Result<AnomalyData, String>,
    /// sampled coherent units and their logarithms, index-aligned with the seed stream
    pub units: Vec<CoherentUnit>,
    pub logs: Vec<Series<Unr>>,
}

impl RunCtx {
    pub fn build(cfg: &RunConfig) -> Result<Self, String> {
        let p = cfg.p;
        let pc = PrimeConfig::new(p, cfg.m, cfg.deg).map_err(|e| e.to_string())?;
        let (pi, hecke) = match cfg.pi {
            PiMode::Explicit(x) => (Scalar::from_i64(p, x), None),
            PiMode::Hecke(h) => {
                let hi = HeckeInput::new(Scalar::from_i64(p, h.pi_e), h.k, h.j).map_err(|e| e.to_string())?;
                (uniformiser_for(&hi).map_err(|e| e.to_string())?, Some(hi))
            }
        };
        let grp = LtGroup::build(pc, pi).map_err(|e| e.to_string())?;
        let c = ColemanCtx::build(grp, cfg.d).map_err(|e| e.to_string())?;
        let anom = anomaly_index(&c.grp.pi, c.l(), cfg.m).map_err(|e| e.to_string());
        let needs_units = cfg.suites.iter().any(|s| matches!(s, Suite::Coleman | Suite::Equations | Suite::Exp | Suite::Lattice));
        let n = if needs_units { cfg.samples } else { 0 };
        let units = (0..n as u64)
            .into_par_iter()
            .map(|i| c.sample(cfg.seed, i).map_err(|e| format!("unit {i}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        let logs = units.iter().map(|u| c.log(u)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        Ok(RunCtx { cfg: cfg.clone(), c, hecke, anom, units, logs })
    }

    pub fn p(&self) -> u32 {
        self.cfg.p
    }

    pub fn m(&self) -> u32 {
        self.cfg.m
    }

    /// `(p, d, pi)` identifying the configuration.
    pub fn params(&self) -> Params {
        let pi = match self.cfg.pi {
            PiMode::Explicit(x) => json!(x),
            PiMode::Hecke(h) => json!({ "pi_e": h.pi_e, "k": h.k, "j": h.j }),
        };
        [("p", json!(self.cfg.p)), ("d", json!(self.cfg.d)), ("pi", pi)].into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn params_with(&self, extra: &[(&str, Value)]) -> Params {
        let mut p = self.params();
        for (k, v) in extra {
            p.insert(k.to_string(), v.clone());
        }
        p
    }

    /// Seed, index and the settings needed to rebuild a unit in isolation.
    pub fn reproducer(&self, index: Option<usize>) -> Value {
        json!({
            "seed": self.cfg.seed,
            "index": index,
            "precision": self.cfg.m,
            "series_degree": self.cfg.deg,
            "params": self.params(),
        })
    }

    pub fn record(&self, suite: Suite, name: &str, extra: &[(&str, Value)]) -> Record {
        Record::new(suite, name, self.params_with(extra))
    }

    /// A graded record that carries the reproducer of the worst sample when it fails.
    pub fn graded(&self, r: Record, budget: i32, w: Worst) -> Record {
        let r = r.graded(self.m(), budget, w.val);
        if r.status == Status::Fail {
            let rep = self.reproducer(w.index);
            r.detail("worst_index", w.index).detail("reproducer", rep)
        } else {
            r
        }
    }
}

/// The least valuation over samples and where it occurred.
#[derive(Clone, Copy, Debug)]
pub struct Worst {
    pub val: i32,
    pub index: Option<usize>,
}

impl Worst {
    pub fn new() -> Self {
        Worst { val: i32::MAX, index: None }
    }

    pub fn of(val: i32) -> Self {
        Worst { val, index: None }
    }

    pub fn see(&mut self, i: usize, v: i32) {
        if v < self.val {
            self.val = v;
            self.index = Some(i);
        }
    }

    pub fn over(it: impl IntoIterator<Item = (usize, i32)>) -> Self {
        let mut w = Worst::new();
        for (i, v) in it {
            w.see(i, v);
        }
        w
    }
}

impl Default for Worst {
    fn default() -> Self {
        Self::new()
    }
}

/// Runs `f` and stamps the elapsed time on every record it returns.
pub fn timed(f: impl FnOnce() -> Vec<Record>) -> Vec<Record> {
    let t = Instant::now();
    let mut rs = f();
    let ms = t.elapsed().as_millis() as u64;
    for r in &mut rs {
        r.wall_ms = ms;
    }
    rs
}

/// A failed record for a check that could not be evaluated.
pub fn errored(r: Record, e: impl std::fmt::Display) -> Record {
    r.verdict(false).detail("error", e.to_string())
}

pub fn run_suite(ctx: &RunCtx, s: Suite) -> Vec<Record> {
    match s {
        Suite::Core => core::run(ctx),
        Suite::Coleman => coleman::run(ctx),
        Suite::Equations => equations::run(ctx),
        Suite::Anomaly => anomaly::run(ctx),
        Suite::Exp => exp::run(ctx),
        Suite::Lattice => lattice::run(ctx),
    }
}
