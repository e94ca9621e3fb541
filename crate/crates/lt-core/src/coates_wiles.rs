//! Coates-Wiles homomorphisms and the level-one map `phi_k`.

use crate::coeff::{Coeff, Twist};
use crate::coleman::{compose_scalar, moment, ColemanCtx};
use crate::error::{Error, Result};
use crate::padic::Scalar;
use crate::series::Series;
use crate::tower::Tower;
use crate::unramified::Unr;

/// `h^k = ((1/lambda') d/dX)^k log g`.
pub fn h_k(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Series<Unr> {
    c.dop(lg, k)
}

/// `phi_CW^k = h^k(0)`.
pub fn phi_cw(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Unr {
    h_k(c, lg, k).c[0].clone()
}

/// `s^{F^{-1}}(pi_1)` for a series over `O_L`, with the truncation tail accounted for.
pub fn eval_at_pi1(c: &ColemanCtx, s: &Series<Unr>) -> Tower {
    let r1 = &c.tor.r1;
    let tail = s.len() as i64 + r1.e as i64 * s.vmin().min(0) as i64;
    Tower::eval_t(r1, &s.frob_inv().c).cap_tail(tail)
}

/// `phi_k(u) = pi^{-k} (h^k)^{F^{-1}}(pi_1)`.
pub fn phi_k(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Tower {
    let pik = c.grp.pi.powi(-(k as i64));
    eval_at_pi1(c, &h_k(c, lg, k)).scale(&pik)
}

/// `D^k log~ g` against `h^k - (pi^k/p) (h^k)^F([pi](X))`; returns the difference.
pub fn h_tilde_defect(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Series<Unr> {
    let hk = h_k(c, lg, k);
    let n = hk.len();
    let fpow: alloc::vec::Vec<Series<Scalar>> = c.fpow.iter().take(n).map(|f| f.truncate(n)).collect();
    let p = Scalar::from_i64(c.p(), c.p() as i64);
    let w = c.grp.pi.pow(k as u64) / p;
    let rhs = hk.sub(&compose_scalar(&hk.frob(), &fpow).scale(&w));
    let lhs = c.dop(&c.log_tilde(lg), k);
    lhs.sub(&rhs)
}

/// Both sides of `phi_CW - (pi^k/p) phi_CW^F = Omega^{-k} int kappa^k d mu`.
pub fn moment_identity(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Result<(Unr, Unr)> {
    let cw = phi_cw(c, lg, k);
    let p = Scalar::from_i64(c.p(), c.p() as i64);
    let lhs = cw.sub(&cw.frob().scale(&(c.grp.pi.pow(k as u64) / p)));
    let a = c.measure(&c.log_tilde(lg));
    let rhs = moment(&a, k)
        .shift(-(k as i32))
        .pure(0)
        .ok_or(Error::Identity { name: "Omega-degrees cancel in the moment identity", index: k })?;
    Ok((lhs, rhs))
}

/// Both sides of `phi_k(u) = (p Omega)^{-k} int kappa^k zeta_1^kappa d mu^{F^{-1}} + p^{-1} phi_CW^k(u)`, over `R_1`.
pub fn torsion_value_identity(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Result<(Tower, Tower)> {
    let r1 = &c.tor.r1;
    let lhs = phi_k(c, lg, k);
    let vals = c.torsion_values(&c.log_tilde(lg), k);
    let tw = vals[1]
        .shift(-(k as i32))
        .pure(0)
        .ok_or(Error::Identity { name: "Omega-degrees cancel in the twisted moment", index: k })?;
    let p = Scalar::from_i64(c.p(), c.p() as i64);
    let cw = Tower::from_unr(r1, &phi_cw(c, lg, k)).scale(&p.inv()?);
    Ok((lhs, tw.scale(&p.powi(-(k as i64))).add(&cw)))
}

/// `log g(omega X)`: the unit `u^{sigma_a}` for `omega = omega(a)`.
pub fn galois_twist(lg: &Series<Unr>, omega: &Scalar) -> Series<Unr> {
    let mut wp = Scalar::one(omega.prime());
    let mut out = lg.clone();
    for x in out.c.iter_mut() {
        *x = x.scale(&wp);
        wp = wp * *omega;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coleman::CoherentUnit;
    use crate::lubin_tate::LtGroup;
    use crate::padic::PrimeConfig;

    fn ctx(p: u32, d: usize, pi: i64, deg: usize) -> ColemanCtx {
        let g = LtGroup::build(PrimeConfig::new(p, 10, deg).unwrap(), Scalar::from_i64(p, pi)).unwrap();
        ColemanCtx::build(g, d).unwrap()
    }

    #[test]
    fn trivial_unit_gives_zero() {
        let c = ctx(5, 1, 30, 16);
        let lg = c.log(&CoherentUnit::one(c.l(), c.len())).unwrap();
        for k in 1..4 {
            assert!(phi_cw(&c, &lg, k).is_zero());
            assert!(phi_k(&c, &lg, k).is_zero());
        }
    }

    #[test]
    fn identities_hold_for_a_sample() {
        let c = ctx(5, 4, 35, 48);
        let u = c.sample(1, 0).unwrap();
        let lg = c.log(&u).unwrap();
        for k in 1..=4 {
            let d2 = h_tilde_defect(&c, &lg, k).vmin();
            let (a, b) = moment_identity(&c, &lg, k).unwrap();
            let d3 = a.sub(&b).vmin();
            let (x, y) = torsion_value_identity(&c, &lg, k).unwrap();
            let d4 = x.sub(&y).vmin();
            assert!(d2 >= 10 - 2 * k as i32 && d3 >= 6 && d4 >= 6, "k = {k}: {d2} {d3} {d4}");
        }
    }

    #[test]
    fn equivariance_under_delta() {
        let c = ctx(5, 4, 35, 40);
        let u = c.sample(4, 2).unwrap();
        let lg = c.log(&u).unwrap();
        let om = c.tor.omegas[1];
        let tw = galois_twist(&lg, &om);
        for k in 1..4 {
            let lhs = phi_cw(&c, &tw, k);
            let rhs = phi_cw(&c, &lg, k).scale(&om.pow(k as u64));
            assert!(lhs.sub(&rhs).vmin() >= 8);
            let lhs = phi_k(&c, &tw, k);
            let rhs = phi_k(&c, &lg, k).sigma(&om).scale(&om.pow(k as u64));
            let t = lhs.sub(&rhs);
            assert!(t.vmin() >= 6, "{k} {:?}", t);
        }
    }
}
