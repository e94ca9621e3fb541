//! Gauss sums, eigenspaces at level one, the image of `phi_k` and its annihilator.

use lt_core::coates_wiles::{galois_twist, phi_cw};
use lt_core::coeff::{Coeff, Twist};
use lt_core::coleman::rng_for;
use lt_core::lattice_image::{
    annihilator, certify_projected_unit, conjugates, eigen_decomposition_identity, eigen_moments, full_moment_defect,
    gauss_data, gauss_orthogonality_defect, image_lattice, project_log, project_ring, rho_readings, sampled_annihilator,
    AnnihilatorReport, EigenFrame, GaussZero, ImageReport,
};
use lt_core::tower::Tower;
use lt_core::Scalar;
use rand_core::RngCore;
use serde_json::{json, Value};

use super::equations::budget;
use super::{RunCtx, Worst};
use crate::config::Suite;
use crate::report::{Record, Status};

const S: Suite = Suite::Lattice;

const B_GAUSS: i32 = 0;
const B_RING: i32 = 0;
const B_PROJECTED: i32 = 0;
/// units used by the per-slot auxiliary checks
const AUX_UNITS: usize = 4;
/// `(p^m, Y^n)` window certified for projected units
const PROJ_N: usize = 3;
const STREAM: u64 = 5 << 40;

pub fn run(x: &RunCtx) -> Vec<Record> {
    let mut out = Vec::new();
    let frame = EigenFrame::new(&x.c.tor.r1);
    out.extend(super::timed(|| gauss(x)));
    out.extend(super::timed(|| vec![pairing(x, &frame)]));
    out.extend(super::timed(|| frame_checks(x, &frame)));
    for &k in &x.cfg.ks {
        out.extend(super::timed(|| vec![moments(x, k)]));
        out.extend(super::timed(|| vec![single_summand(x, k)]));
        out.extend(super::timed(|| rho(x, k)));
    }
    out.extend(super::timed(|| vec![projected_unit(x)]));
    out.extend(super::timed(|| image(x, &frame)));
    out
}

fn gauss(x: &RunCtx) -> Vec<Record> {
    let tor = &x.c.tor;
    let p = x.p() as i64;
    let mut out: Vec<Record> = (0..p - 1)
        .map(|t| {
            let r = x.record(S, "gauss_sum_valuation", &[("t", json!(t))]);
            match gauss_data(tor, t) {
                Ok(g) => r.detail("v", g.v).detail("ratio_v", g.ratio_v),
                Err(e) => super::errored(r, e),
            }
        })
        .collect();
    let zero = tor.gauss_sum(0).sub(&Tower::one(&tor.r2)).is_zero();
    out[0] = out[0].clone().detail("g0_is_one", zero);
    if !zero {
        out[0].status = Status::Fail;
    }
    out.push(x.graded(x.record(S, "gauss_sum_orthogonality", &[]), B_GAUSS, Worst::of(gauss_orthogonality_defect(tor))));
    out
}

/// `Tr(b_i b_j)` vanishes unless the slots are opposite, where it has valuation `[t != 0]`.
fn pairing(x: &RunCtx, f: &EigenFrame) -> Record {
    let g = f.gram();
    let (d, e) = (f.d, f.e);
    let mut bad = Vec::new();
    for i in 0..f.dim() {
        let (s, t) = f.slot(i);
        for j in 0..f.dim() {
            let (s1, t1) = f.slot(j);
            let paired = (s + s1) % d == 0 && (t + t1) % e == 0;
            let v = g.get(i, j);
            let ok = if paired { !v.is_zero() && v.val() == (t != 0) as i32 } else { v.is_zero() };
            if !ok {
                bad.push((s, t, s1, t1));
            }
        }
    }
    x.record(S, "trace_pairing", &[]).verdict(bad.is_empty()).detail("violations", &bad[..bad.len().min(8)])
}

fn frame_checks(x: &RunCtx, f: &EigenFrame) -> Vec<Record> {
    let tor = &x.c.tor;
    let l = x.c.l();
    let mut bad = Vec::new();
    for i in 0..f.dim() {
        let (s, t) = f.slot(i);
        let b = f.basis(s as i64, t as i64);
        let sig = tor.omegas.iter().all(|w| b.sigma(w).sub(&b.scale(&w.pow(t as u64))).is_zero());
        let frob = b.frob().sub(&b.scale(&l.eps(s))).is_zero();
        let proj = project_ring(tor, &b, s, t).sub(&b).is_zero();
        if !(sig && frob && proj && b.v_p() == t as i32) {
            bad.push((s, t));
        }
    }
    let eig = x.record(S, "eigen_frame", &[]).verdict(bad.is_empty()).detail("bad_slots", &bad);
    // a random element is the sum of its components, each an eigenvector
    let p = x.p();
    let mut rng = rng_for(x.cfg.seed, STREAM);
    let mut y = Tower::zero(&tor.r1);
    for c in y.c.iter_mut() {
        *c = Scalar::from_i64(p, (rng.next_u64() % 100_000) as i64);
    }
    let mut acc = Tower::zero(&tor.r1);
    let mut eigen = Worst::new();
    for i in 0..f.dim() {
        let (s, t) = f.slot(i);
        let q = project_ring(tor, &y, s, t);
        let w = tor.omegas[1];
        eigen.see(i, q.sigma(&w).sub(&q.scale(&w.pow(t as u64))).vmin().min(q.frob().sub(&q.scale(&l.eps(s))).vmin()));
        acc = acc.add(&q);
    }
    let part = x.graded(x.record(S, "ring_projection_partition", &[]), B_RING, Worst::of(acc.sub(&y).vmin().min(eigen.val)));
    vec![eig, part]
}

fn aux(x: &RunCtx) -> usize {
    x.logs.len().min(AUX_UNITS)
}

/// `psi_k` against the full moment, and `psi_t(u^sigma) = omega^t psi_t(u)`.
fn moments(x: &RunCtx, k: usize) -> Record {
    let c = &x.c;
    let r = x.record(S, "eigen_moments", &[("k", json!(k)), ("samples", json!(aux(x)))]);
    let w1 = c.tor.omegas[1];
    let mut w = Worst::new();
    for (i, lg) in x.logs.iter().take(aux(x)).enumerate() {
        let res = full_moment_defect(c, lg, k).and_then(|full| {
            let a = eigen_moments(c, lg, k)?;
            let b = eigen_moments(c, &galois_twist(lg, &w1), k)?;
            let eq = a.iter().zip(&b).enumerate().map(|(t, (u, v))| v.sub(&u.scale(&w1.pow(t as u64))).vmin()).min().unwrap();
            Ok(full.min(eq))
        });
        match res {
            Ok(v) => w.see(i, v),
            Err(e) => return super::errored(r, e).detail("reproducer", x.reproducer(Some(i))),
        }
    }
    x.graded(r, budget(k), w)
}

/// For a unit in slot `(s, t)` with `t != k mod (p-1)`: `phi_CW^k` vanishes, only `psi_t`
/// survives, and the eigen-decomposition still holds.
fn single_summand(x: &RunCtx, k: usize) -> Record {
    let c = &x.c;
    let e = c.tor.r1.e;
    let d = c.l().d;
    let r = x.record(S, "single_summand", &[("k", json!(k))]);
    let Some(lg) = x.logs.first() else {
        return r.status(Status::Inconclusive);
    };
    let conj = conjugates(&c.tor, lg);
    let mut w = Worst::new();
    let mut slots = Vec::new();
    for t in (0..e).filter(|t| t % e != k % e) {
        let s = (t + k) % d;
        slots.push((s, t));
        let pl = project_log(&c.tor, &conj, s, t);
        let res = (|| -> lt_core::Result<i32> {
            let cw = phi_cw(c, &pl, k).vmin();
            let psi = eigen_moments(c, &pl, k)?;
            let off = psi.iter().enumerate().filter(|(t1, _)| *t1 != t).map(|(_, v)| v.vmin()).min().unwrap_or(i32::MAX);
            let (a, b) = eigen_decomposition_identity(c, &pl, k, GaussZero::Derived)?;
            Ok(cw.min(off).min(a.sub(&b).vmin()))
        })();
        match res {
            Ok(v) => w.see(t, v),
            Err(er) => return super::errored(r, er),
        }
    }
    x.graded(r.detail("slots", &slots), budget(k), w).detail("worst_t", w.index)
}

/// Slot `(s, k)`: `phi_CW^F = eps^s phi_CW`, and the moment relation with and without `rho^s`.
fn rho(x: &RunCtx, k: usize) -> Vec<Record> {
    let c = &x.c;
    let e = c.tor.r1.e;
    let d = c.l().d;
    let Some(lg) = x.logs.first() else {
        return vec![];
    };
    let conj = conjugates(&c.tor, lg);
    let t = k % e;
    let (mut frob, mut with, mut without) = (Worst::new(), Worst::new(), Worst::new());
    for s in 0..d {
        let pl = project_log(&c.tor, &conj, s, t);
        match rho_readings(c, &pl, s, k) {
            Ok(rr) => {
                frob.see(s, rr.frob_eigen);
                with.see(s, rr.with_rho);
                without.see(s, rr.without_rho);
            }
            Err(er) => return vec![super::errored(x.record(S, "rho_reading_eps_f", &[("k", json!(k))]), er)],
        }
    }
    let ex = [("k", json!(k))];
    let dropped = x.record(S, "rho_reading_dropped", &ex).evidence();
    // the dropped reading holds when it is certified as far as the adopted one
    let holds = without.val >= with.val;
    vec![
        x.graded(x.record(S, "projected_frobenius_eigen", &ex), budget(k), frob),
        x.graded(x.record(S, "rho_reading_eps_f", &ex), budget(k), with).detail("worst_s", with.index),
        dropped.graded(x.m(), budget(k), without.val).status(Status::Inconclusive).detail("reading_holds", holds).detail("worst_s", without.index),
    ]
}

/// The multiplicative projection of the first unit to two slots is again norm-coherent.
fn projected_unit(x: &RunCtx) -> Record {
    let c = &x.c;
    let r = x.record(S, "projected_unit_coherence", &[("window", json!(PROJ_N))]);
    let Some(u) = x.units.first() else {
        return r.status(Status::Inconclusive);
    };
    let (d, e) = (c.l().d, c.tor.r1.e);
    let slots = [(0, 1 % e), ((d - 1) % d, e - 1)];
    let mut w = Worst::new();
    for (i, &(s, t)) in slots.iter().enumerate() {
        match certify_projected_unit(c, &u.g, s, t, PROJ_N, x.m() as i32) {
            Ok((_, cert)) => w.see(i, cert),
            Err(er) => return super::errored(r, er),
        }
    }
    x.graded(r.detail("slots", slots), B_PROJECTED, w)
}

fn slot_table(rep: &ImageReport) -> Value {
    rep.slots
        .iter()
        .map(|s| json!({ "s": s.s, "t": s.t, "coord": s.coord, "bound": s.bound, "min_val": s.min_val, "leak": s.leak, "contained": s.contained }))
        .collect()
}

fn annihilator_record(x: &RunCtx, name: &str, k: usize, a: &AnnihilatorReport) -> Record {
    x.record(S, name, &[("k", json!(k))])
        .verdict(a.equal && a.mismatches.is_empty())
        .detail("dual_exponents", &a.dual_exps)
        .detail("closed_exponents", &a.closed_exps)
        .detail("mismatches", &a.mismatches)
        .detail("collision", a.collision)
}

fn image(x: &RunCtx, f: &EigenFrame) -> Vec<Record> {
    let ks: Vec<usize> = x.cfg.ks.iter().copied().filter(|&k| k >= 2).collect();
    let anom = match &x.anom {
        Ok(a) => *a,
        Err(e) => return vec![super::errored(x.record(S, "image_containment", &[]), e)],
    };
    let reps = match image_lattice(&x.c, &anom, &x.logs, &ks) {
        Ok(r) => r,
        Err(e) => return vec![super::errored(x.record(S, "image_containment", &[]), e)],
    };
    let mut out = Vec::new();
    let n = json!(x.logs.len());
    for rep in &reps {
        let k = rep.k;
        let ex = [("k", json!(k)), ("samples", n.clone())];
        let table = slot_table(rep);
        let cont = x.record(S, "image_containment", &ex).verdict(rep.contained()).detail("unprojected_contained", rep.unprojected_contained);
        let cont = if rep.contained() { cont } else { cont.detail("slots", &table).detail("reproducer", x.reproducer(None)) };
        out.push(cont);
        let missed: Vec<(usize, usize)> = rep.slots.iter().filter(|s| !s.attained()).map(|s| (s.s, s.t)).collect();
        out.push(
            x.record(S, "image_attainment", &ex)
                .evidence()
                .status(if rep.attained() { Status::Pass } else { Status::Inconclusive })
                .detail("missed_slots", &missed)
                .detail("slots", &table),
        );
        out.push(x.graded(x.record(S, "image_projection_oracle", &ex), budget(k), Worst::of(rep.oracle_defect)));
        match annihilator(f, &anom, k) {
            Ok(a) => {
                out.push(annihilator_record(x, "annihilator_closed_form", k, &a));
                out.push(x.record(S, "annihilator_double_dual", &[("k", json!(k))]).verdict(a.double_dual));
            }
            Err(e) => out.push(super::errored(x.record(S, "annihilator_closed_form", &[("k", json!(k))]), e)),
        }
        let sampled = match sampled_annihilator(f, &anom, rep) {
            Ok(Some(a)) => annihilator_record(x, "annihilator_sampled", k, &a),
            Ok(None) => x.record(S, "annihilator_sampled", &[("k", json!(k))]).status(Status::Inconclusive).detail("reason", "a slot attained no value"),
            Err(e) => super::errored(x.record(S, "annihilator_sampled", &[("k", json!(k))]), e),
        };
        let sampled = sampled.evidence();
        let sampled = if sampled.status == Status::Fail { sampled.status(Status::Inconclusive) } else { sampled };
        out.push(sampled);
    }
    out
}
