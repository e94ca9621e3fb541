//! The formal group, its logarithm, multiplication maps, `theta`, and level-one torsion.

use lt_core::coeff::{Coeff, Twist};
use lt_core::coleman::rng_for;
use lt_core::period::Period;
use lt_core::series::Series;
use lt_core::tower::Tower;
use lt_core::Scalar;
use rand_core::RngCore;
use serde_json::json;

use super::{RunCtx, Worst};
use crate::config::Suite;
use crate::report::{Record, Status};

const S: Suite = Suite::Core;

/// Loss budgets, in powers of `p`.
const B_LAMBDA: i32 = 0;
const B_LAW: i32 = 0;
const B_MULT: i32 = 1;
const B_THETA: i32 = 0;
const B_TORSION: i32 = 0;

/// Bidegree of the homomorphism check for `theta`.
const THETA_BOX: usize = 24;
/// Stream offset separating these draws from the unit stream.
const STREAM: u64 = 1 << 40;

pub fn run(x: &RunCtx) -> Vec<Record> {
    let mut out = Vec::new();
    out.extend(super::timed(|| vec![lambda_equation(x)]));
    out.extend(super::timed(|| law_axioms(x)));
    out.extend(super::timed(|| mult_maps(x)));
    out.extend(super::timed(|| vec![lambda_theta(x)]));
    out.extend(super::timed(|| vec![theta_hom(x)]));
    out.extend(super::timed(|| vec![theta_frobenius(x)]));
    out.extend(super::timed(|| torsion(x)));
    out
}

fn lambda_equation(x: &RunCtx) -> Record {
    let g = &x.c.grp;
    let d = g.lambda.compose(&g.f).sub(&g.lambda.scale(&g.pi));
    let r = x.record(S, "lambda_functional_equation", &[]).detail("first_below", d.first_below(x.m() as i32 - B_LAMBDA));
    x.graded(r, B_LAMBDA, Worst::of(d.vmin()))
}

/// A series `a_1 T + ... ` with small integer coefficients.
fn random_series(p: u32, len: usize, rng: &mut impl RngCore) -> Series<Scalar> {
    let mut c = vec![0i64; len];
    for x in c.iter_mut().skip(1) {
        *x = (rng.next_u64() % 41) as i64 - 20;
    }
    Series::from_i64(p, &c, len)
}

fn law_axioms(x: &RunCtx) -> Vec<Record> {
    let g = &x.c.grp;
    let p = x.p();
    let deg = g.cfg.deg;
    let mut comm = Worst::new();
    let mut unit = Worst::new();
    for i in 0..=deg {
        for j in 0..=deg - i {
            comm.see(0, (g.law.get(i, j) - g.law.get(j, i)).val());
        }
        let want = if i == 1 { Scalar::one(p) } else { Scalar::zero_exact(p) };
        unit.see(0, (g.law.get(i, 0) - want).val());
    }
    let mut rng = rng_for(x.cfg.seed, STREAM);
    let len = g.len();
    let (u, v, w) = (random_series(p, len, &mut rng), random_series(p, len, &mut rng), random_series(p, len, &mut rng));
    let assoc = g.add_series(&g.add_series(&u, &v), &w).sub(&g.add_series(&u, &g.add_series(&v, &w)));
    let log = g.lambda.compose(&g.add_series(&u, &v)).sub(&g.lambda.compose(&u).add(&g.lambda.compose(&v)));
    vec![
        x.graded(x.record(S, "law_commutative", &[]), B_LAW, comm),
        x.graded(x.record(S, "law_unit", &[]), B_LAW, unit),
        x.graded(x.record(S, "law_associative", &[]), B_LAW, Worst::of(assoc.vmin())),
        x.graded(x.record(S, "law_logarithm", &[]), B_LAW, Worst::of(log.vmin())),
    ]
}

fn mult_maps(x: &RunCtx) -> Vec<Record> {
    let g = &x.c.grp;
    let p = x.p();
    let mut rng = rng_for(x.cfg.seed, STREAM + 1);
    let mut comp = Worst::new();
    let mut commute = Worst::new();
    let mut pairs = Vec::new();
    for i in 0..3 {
        let draw = |rng: &mut dyn RngCore| loop {
            let a = (rng.next_u64() % 10_000) as i64 + 1;
            if a % p as i64 != 0 {
                return a;
            }
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        pairs.push((a, b));
        let ma = g.mult(Scalar::from_i64(p, a));
        let mb = g.mult(Scalar::from_i64(p, b));
        let mab = g.mult(Scalar::from_i64(p, a * b));
        comp.see(i, ma.compose(&mb).sub(&mab).vmin());
        commute.see(i, g.f.compose(&ma).sub(&ma.compose(&g.f)).vmin());
    }
    let pim = g.mult(g.pi).sub(&g.f).vmin();
    vec![
        x.graded(x.record(S, "mult_composition", &[]).detail("pairs", &pairs), B_MULT, comp),
        x.graded(x.record(S, "mult_commutes_with_f", &[]), B_MULT, commute),
        x.graded(x.record(S, "mult_pi_is_f", &[]), B_MULT, Worst::of(pim)),
    ]
}

fn lambda_theta(x: &RunCtx) -> Record {
    let g = &x.c.grp;
    let len = THETA_BOX + 1;
    let w = g.w();
    let lhs = g.lambda_period(len).compose(&g.theta(len));
    let rhs = Series::log1p_x(x.p(), len).map(|c| Period::monomial(*c, 1, w));
    x.graded(x.record(S, "lambda_of_theta", &[("len", json!(len))]), B_THETA, Worst::of(lhs.sub(&rhs).vmin()))
}

fn theta_hom(x: &RunCtx) -> Record {
    let (v, first) = x.c.grp.theta_hom_defect(THETA_BOX);
    let r = x.record(S, "theta_homomorphism", &[("box", json!(THETA_BOX))]).detail("first_failing", first);
    x.graded(r, B_THETA, Worst::of(v))
}

fn theta_frobenius(x: &RunCtx) -> Record {
    let len = THETA_BOX + 1;
    let v = x.c.grp.theta_frobenius_defect(len).vmin();
    x.graded(x.record(S, "theta_frobenius", &[("len", json!(len))]), B_THETA, Worst::of(v))
}

fn torsion(x: &RunCtx) -> Vec<Record> {
    let tor = &x.c.tor;
    let p = x.p();
    let z = &tor.zeta;
    let one = Tower::one(&tor.r2);
    let order = z.pow(p as u64).sub(&one).vmin();
    let mut sum = Tower::zero(&tor.r2);
    for i in 0..p as i64 {
        sum = sum.add(&tor.zeta_pow(i));
    }
    let nontrivial = !z.sub(&one).is_zero();
    let root = x
        .graded(x.record(S, "zeta_root_of_unity", &[]), B_TORSION, Worst::of(order.min(sum.vmin())))
        .detail("zeta_minus_one_valuation", z.sub(&one).v_p())
        .detail("order_defect", order)
        .detail("sum_defect", sum.vmin());
    let root = if nontrivial { root } else { root.verdict(false).detail("error", "zeta_1 = 1") };

    // sigma_a(zeta_1) = zeta_1^{m(a)}: m is multiplicative and bijective on (Z/p)^x
    let m = &tor.m;
    let pm = p as usize;
    let mult = (1..pm).all(|a| (1..pm).all(|b| m[a * b % pm - 1] as usize == m[a - 1] as usize * m[b - 1] as usize % pm));
    let mut seen = m.clone();
    seen.sort_unstable();
    let bijective = seen == (1..p).collect::<Vec<_>>();
    // the action is computed from sigma_a, so check it against the conjugates directly
    let action = tor.omegas.iter().zip(m).map(|(w, &e)| z.sigma(w).sub(&z.pow(e as u64)).vmin()).min().unwrap_or(i32::MAX);
    let ch = x
        .graded(x.record(S, "zeta_galois_character", &[]), B_TORSION, Worst::of(action))
        .detail("m", m)
        .detail("multiplicative", mult)
        .detail("order_p_minus_1", bijective);
    let ch = if mult && bijective { ch } else { ch.verdict(false) };

    let teich = match &x.anom {
        Ok(a) if a.n >= 1 => x
            .record(S, "zeta_character_is_teichmuller", &[])
            .verdict(tor.m_is_teichmuller())
            .detail("n", a.n)
            .detail("m", m),
        Ok(a) => x
            .record(S, "zeta_character_is_teichmuller", &[])
            .status(if tor.m_is_teichmuller() { Status::Pass } else { Status::Inconclusive })
            .detail("n", a.n)
            .detail("vacuous", true)
            .detail("m", m),
        Err(e) => super::errored(x.record(S, "zeta_character_is_teichmuller", &[]), e),
    };
    vec![root, ch, teich]
}
