//! Norm-coherent units, the modified logarithm, level-one values and the measure.

use lt_core::coeff::{Coeff, Twist};
use lt_core::coleman::{moment, random_seed_unit, rng_for};
use lt_core::tower::Tower;
use serde_json::json;

use super::{RunCtx, Worst};
use crate::config::Suite;
use crate::report::{Record, Status};

const S: Suite = Suite::Coleman;

const B_COHERENT: i32 = 0;
const B_LOG_TILDE: i32 = 0;
const B_LEVELS: i32 = 0;
const B_TRANSFER: i32 = 0;
/// random series fed to the transfer identity
const TRANSFER_SAMPLES: u64 = 4;
const STREAM: u64 = 2 << 40;

pub fn run(x: &RunCtx) -> Vec<Record> {
    let mut out = Vec::new();
    out.extend(super::timed(|| vec![coherence(x)]));
    out.extend(super::timed(|| vec![product(x)]));
    out.extend(super::timed(|| log_tilde(x)));
    out.extend(super::timed(|| vec![levels(x)]));
    out.extend(super::timed(|| vec![transfer(x)]));
    out.extend(super::timed(|| vec![first_moment(x)]));
    out
}

fn coherence(x: &RunCtx) -> Record {
    let w = Worst::over(x.units.iter().map(|u| u.cert).enumerate());
    let iters = x.units.iter().map(|u| u.iters).max().unwrap_or(0);
    let r = x.record(S, "unit_coherence", &[("samples", json!(x.units.len()))]).detail("max_iterations", iters);
    x.graded(r, B_COHERENT, w)
}

fn product(x: &RunCtx) -> Record {
    let r = x.record(S, "unit_product_coherence", &[]);
    if x.units.len() < 2 {
        return r.status(Status::Inconclusive).detail("reason", "fewer than two samples");
    }
    match x.units[0].mul(&x.units[1], &x.c.grp.pi) {
        Ok(u) => x.graded(r.detail("indices", [0, 1]), B_COHERENT, Worst::of(u.cert)),
        Err(e) => super::errored(r, e),
    }
}

fn log_tilde(x: &RunCtx) -> Vec<Record> {
    let c = &x.c;
    let r1 = &c.tor.r1;
    let tp = c.tau_powers();
    let mut forms = Worst::new();
    let mut integral = Worst::new();
    let mut err = None;
    for (i, (u, lg)) in x.units.iter().zip(&x.logs).enumerate() {
        let lt = c.log_tilde(lg);
        integral.see(i, lt.vmin());
        match c.log_tilde_by_translates(u, &tp) {
            Ok(other) => forms.see(i, other.sub(&lt.map(|y| Tower::from_unr(r1, y))).vmin()),
            Err(e) => err = Some((i, e)),
        }
    }
    let n = json!(x.units.len());
    let a = x.graded(x.record(S, "log_tilde_forms_agree", &[("samples", n.clone())]), B_LOG_TILDE, forms);
    let a = match err {
        Some((i, e)) => super::errored(a, e).detail("reproducer", x.reproducer(Some(i))),
        None => a,
    };
    // integrality: every coefficient has valuation at least 0
    let b = x.record(S, "log_tilde_integral", &[("samples", n)]).verdict(integral.val >= 0).detail("least_valuation", integral.val);
    let b = if integral.val >= 0 { b } else { b.detail("reproducer", x.reproducer(integral.index)) };
    vec![a, b]
}

fn levels(x: &RunCtx) -> Record {
    let c = &x.c;
    let r1 = &c.tor.r1;
    let d1 = x.cfg.d == 1;
    let mut w = Worst::new();
    let mut u0_trivial = true;
    let mut err = None;
    for (i, u) in x.units.iter().enumerate() {
        match u.levels(r1) {
            Ok((u0, u1)) => {
                let mut prod = Tower::one(r1);
                for om in &c.tor.omegas {
                    prod = prod.mul(&u1.sigma(om));
                }
                w.see(i, prod.sub(&Tower::from_unr(r1, &u0)).vmin());
                u0_trivial &= u0.sub(&u0.one_like()).is_zero();
            }
            Err(e) => err = Some((i, e)),
        }
    }
    let r = x.record(S, "level_norm_compatibility", &[("samples", json!(x.units.len()))]);
    let r = x.graded(r, B_LEVELS, w);
    let r = if d1 { r.detail("u0_trivial", u0_trivial) } else { r };
    match err {
        Some((i, e)) => super::errored(r, e).detail("reproducer", x.reproducer(Some(i))),
        None if d1 && !u0_trivial => r.verdict(false),
        None => r,
    }
}

fn transfer(x: &RunCtx) -> Record {
    let c = &x.c;
    let w = Worst::over((0..TRANSFER_SAMPLES).map(|i| {
        let mut rng = rng_for(x.cfg.seed, STREAM + i);
        let h = random_seed_unit(c.l(), c.len(), &mut rng);
        (i as usize, c.transfer_defect(&h))
    }));
    x.graded(x.record(S, "transfer_identity", &[("samples", json!(TRANSFER_SAMPLES))]), B_TRANSFER, w)
}

/// The first moment vanishes modulo `p^N` on the `alpha^{-S}` coordinate, where `F` acts
/// on `alpha^s` by `eps^s` and `pi/p = eps^S mod p^N`.  Other coordinates need not vanish.
fn first_moment(x: &RunCtx) -> Record {
    let r = x.record(S, "first_moment_vanishing", &[("samples", json!(x.units.len()))]);
    let (n, s) = match &x.anom {
        Ok(a) => (a.n as i32, a.s as usize),
        Err(e) => return super::errored(r, e),
    };
    let c = &x.c;
    let d = c.l().d;
    let slot = (d - s % d) % d;
    let w = Worst::over(x.logs.iter().enumerate().map(|(i, lg)| {
        let m = moment(&c.measure(&c.log_tilde(lg)), 1);
        (i, m.c.iter().map(|u| u.coord(slot).val()).min().unwrap_or(i32::MAX))
    }));
    let r = r.detail("coordinate", slot);
    let r = r.detail("n", n).detail("least_valuation", w.val);
    if n == 0 {
        return r.detail("vacuous", true);
    }
    let ok = w.val >= n;
    let r = r.verdict(ok);
    if ok {
        r
    } else {
        r.detail("reproducer", x.reproducer(w.index))
    }
}
