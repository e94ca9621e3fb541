//! The explicit exponential against the reciprocity pairing.

use lt_core::coates_wiles::galois_twist;
use lt_core::coleman::rng_for;
use lt_core::hecke::{exp_argument, exp_bk, reciprocity_pairing, HeckeInput};
use lt_core::unramified::Unr;
use lt_core::Scalar;
use rand_core::RngCore;
use serde_json::json;

use super::{RunCtx, Worst};
use crate::config::{PiMode, Suite};
use crate::report::{Record, Status};

const S: Suite = Suite::Exp;

const B_EXP: i32 = 0;
const STREAM: u64 = 4 << 40;

pub fn run(x: &RunCtx) -> Vec<Record> {
    let p = x.p();
    let inputs: Vec<HeckeInput> = match (x.cfg.pi, &x.hecke) {
        (PiMode::Hecke(_), Some(h)) => vec![*h],
        _ => x
            .cfg
            .ks
            .iter()
            .filter(|&&k| k % p as usize != 0)
            .filter_map(|&k| HeckeInput::new(x.c.grp.pi, k as u32, 0).ok())
            .collect(),
    };
    let mut out = Vec::new();
    for h in &inputs {
        out.extend(super::timed(|| checks(x, h)));
    }
    out
}

fn random_a(x: &RunCtx, k: u32) -> Unr {
    let p = x.p();
    let mut rng = rng_for(x.cfg.seed, STREAM + k as u64);
    let l = x.c.l();
    Unr::from_coords(l, (0..l.d).map(|_| Scalar::from_i64(p, (rng.next_u64() % 10_000) as i64 - 5_000)).collect())
}

/// Valuation of `a - b` taken relative to the size of the values compared.
fn rel(a: &Scalar, b: &Scalar) -> i32 {
    let scale = a.val().min(b.val()).min(0);
    (*a - *b).val() - scale
}

fn checks(x: &RunCtx, h: &HeckeInput) -> Vec<Record> {
    let c = &x.c;
    let k = h.k as usize;
    let a = random_a(x, h.k);
    let pi = c.grp.pi;
    let arg = exp_argument(&a, &pi, k);
    let extra = [("k", json!(k)), ("j", json!(h.j)), ("samples", json!(x.logs.len()))];
    let mut pair = Worst::new();
    let mut add = Worst::new();
    let mut equiv = Worst::new();
    let mut vals = Vec::with_capacity(x.logs.len());
    let mut err = None;
    for (i, lg) in x.logs.iter().enumerate() {
        let e = match exp_bk(c, h, &a, lg) {
            Ok(e) => e,
            Err(e) => {
                err = Some((i, e));
                break;
            }
        };
        match reciprocity_pairing(c, &arg, k, lg) {
            Ok(r) => pair.see(i, rel(&e, &r)),
            Err(e) => err = Some((i, e)),
        }
        vals.push(e);
    }
    if let Some((i, e)) = err {
        let r = x.record(S, "exp_matches_pairing", &extra);
        return vec![super::errored(r, e).detail("reproducer", x.reproducer(Some(i)))];
    }
    let n = x.logs.len();
    for i in 0..n.saturating_sub(1) {
        let sum = x.logs[i].add(&x.logs[i + 1]);
        if let Ok(e) = exp_bk(c, h, &a, &sum) {
            add.see(i, rel(&e, &(vals[i] + vals[i + 1])));
        }
    }
    for (i, lg) in x.logs.iter().enumerate() {
        for w in c.tor.omegas.iter().skip(1) {
            if let Ok(e) = exp_bk(c, h, &a, &galois_twist(lg, w)) {
                equiv.see(i, rel(&e, &(vals[i] * w.pow(k as u64))));
            }
        }
    }
    let zero = exp_bk(c, h, &Unr::zero(c.l()), &x.logs[0]).map(|z| z.is_zero()).unwrap_or(false);
    let mut out = vec![
        x.graded(x.record(S, "exp_matches_pairing", &extra), B_EXP, pair).detail("zero_argument_vanishes", zero),
        x.graded(x.record(S, "exp_additive", &extra), B_EXP, add),
        x.graded(x.record(S, "exp_equivariant", &extra), B_EXP, equiv),
    ];
    if !zero {
        out[0].status = Status::Fail;
    }
    out
}
