//! The identities linking `phi_CW`, the measure and `phi_k`, over all sampled units.

use lt_core::coates_wiles::{h_tilde_defect, moment_identity, torsion_value_identity};
use lt_core::coeff::Coeff;
use lt_core::lattice_image::{eigen_decomposition_identity, GaussZero};
use lt_core::series::Series;
use lt_core::unramified::Unr;
use serde_json::json;

use super::{RunCtx, Worst};
use crate::config::Suite;
use crate::report::{Record, Status};

const S: Suite = Suite::Equations;

/// Loss allowed at weight `k`.
pub fn budget(k: usize) -> i32 {
    2 * k as i32 + 4
}

pub fn run(x: &RunCtx) -> Vec<Record> {
    let mut out = Vec::new();
    for &k in &x.cfg.ks {
        out.extend(super::timed(|| vec![identity(x, k, "h_tilde_defect", |lg| Ok(h_tilde_defect(&x.c, lg, k).vmin()))]));
        out.extend(super::timed(|| {
            vec![identity(x, k, "moment_identity", |lg| moment_identity(&x.c, lg, k).map(|(a, b)| a.sub(&b).vmin()))]
        }));
        out.extend(super::timed(|| {
            vec![identity(x, k, "torsion_value_identity", |lg| torsion_value_identity(&x.c, lg, k).map(|(a, b)| a.sub(&b).vmin()))]
        }));
        let derived = super::timed(|| {
            vec![identity(x, k, "eigen_decomposition_identity", |lg| {
                eigen_decomposition_identity(&x.c, lg, k, GaussZero::Derived).map(|(a, b)| a.sub(&b).vmin())
            })]
        });
        let reached = derived[0].precision.map_or(i32::MAX, |p| p.certified.unwrap_or(i32::MAX));
        out.extend(derived);
        out.extend(super::timed(|| vec![printed_reading(x, k, reached)]));
    }
    out
}

fn identity(x: &RunCtx, k: usize, name: &str, f: impl Fn(&Series<Unr>) -> lt_core::Result<i32>) -> Record {
    let r = x.record(S, name, &[("k", json!(k)), ("samples", json!(x.logs.len()))]);
    let mut w = Worst::new();
    for (i, lg) in x.logs.iter().enumerate() {
        match f(lg) {
            Ok(v) => w.see(i, v),
            Err(e) => return super::errored(r, e).detail("reproducer", x.reproducer(Some(i))),
        }
    }
    x.graded(r, budget(k), w)
}

/// The same decomposition with `G(0) = 1`: a reading, reported but never failing the run.
/// It holds when certified as far as the `G(0) = -1/(p-1)` form reached.
fn printed_reading(x: &RunCtx, k: usize, reached: i32) -> Record {
    let r = x.record(S, "eigen_decomposition_gauss_zero_one", &[("k", json!(k)), ("samples", json!(x.logs.len()))]).evidence();
    let mut w = Worst::new();
    for (i, lg) in x.logs.iter().enumerate() {
        match eigen_decomposition_identity(&x.c, lg, k, GaussZero::Printed) {
            Ok((a, b)) => w.see(i, a.sub(&b).vmin()),
            Err(e) => return super::errored(r, e),
        }
    }
    let holds = w.val >= reached;
    r.graded(x.m(), budget(k), w.val).status(Status::Inconclusive).detail("reading_holds", holds).detail("worst_index", w.index)
}
