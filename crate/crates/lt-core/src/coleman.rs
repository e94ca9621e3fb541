//! Coleman's norm operator, norm-coherent units and the measures they carry.
//!
//! For `f(X) = pi X + X^p` the roots of `f(Z) = Y` are the translates
//! `X [+] lambda`, so `(N g)(Y)` is the norm of `g(X)` from
//! `O[[Y]][X]/(X^p + pi X - Y)` down to `O[[Y]]`.  We compute it as the
//! determinant of multiplication by `g` on the basis `1, X, ..., X^{p-1}`.
//! A polynomial of degree `D` has a polynomial norm of degree `D`, so no
//! truncation enters and the fixed-point iteration stays in degree `D`.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::coeff::{Coeff, Twist};
use crate::error::{Error, Result};
use crate::lubin_tate::{LtGroup, PSeries};
use crate::period::Period;
use crate::torsion::Torsion;
use crate::padic::{cap, ipow, Scalar};
use crate::series::Series;
use crate::tower::Tower;
use crate::unramified::{Unr, UnrRing};

/// Coefficients `a_b(Y)` with `g = sum_{b<p} a_b(Y) X^b` modulo `X^p + pi X - Y`.
pub fn weierstrass<R: Coeff>(g: &Series<R>, p: u32, pi: &Scalar, ylen: usize) -> Vec<Series<R>> {
    let p = p as usize;
    let z = g.proto().zero_like();
    let mut w: Vec<Vec<R>> = g.c.iter().map(|x| alloc::vec![x.clone()]).collect();
    let mpi = pi.neg();
    for n in (p..w.len()).rev() {
        let top = core::mem::take(&mut w[n]);
        if top.iter().all(|x| x.is_exact_zero()) {
            continue;
        }
        // X^n = X^{n-p} Y - pi X^{n-p+1}
        let lo = &mut w[n - p];
        if lo.len() < top.len() + 1 {
            lo.resize(top.len() + 1, z.clone());
        }
        for (j, x) in top.iter().enumerate() {
            lo[j + 1] = lo[j + 1].add(x);
        }
        let mid = &mut w[n - p + 1];
        if mid.len() < top.len() {
            mid.resize(top.len(), z.clone());
        }
        for (j, x) in top.iter().enumerate() {
            mid[j] = mid[j].add(&x.scale(&mpi));
        }
    }
    w.truncate(p);
    while w.len() < p {
        w.push(Vec::new());
    }
    w.into_iter()
        .map(|mut c| {
            c.resize(ylen, z.clone());
            Series::new(c)
        })
        .collect()
}

/// `X^j g` as a polynomial of degree `deg g + j`.
fn shifted<R: Coeff>(g: &Series<R>, j: usize) -> Series<R> {
    let z = g.proto().zero_like();
    let mut c = alloc::vec![z; j];
    c.extend(g.c.iter().cloned());
    Series::new(c)
}

/// `(N g)(Y)` for a polynomial `g` with `g(0)` a unit.
///
/// The result has the length of `g`; the determinant is computed with `p`
/// extra degrees and those are checked to vanish.
pub fn norm<R: Coeff>(g: &Series<R>, pi: &Scalar) -> Result<Series<R>> {
    let p = pi.prime();
    let pu = p as usize;
    let len = g.len();
    let ylen = len + pu;
    // m[i][j]: coefficient of X^i in X^j g
    let cols: Vec<Vec<Series<R>>> = (0..pu).map(|j| weierstrass(&shifted(g, j), p, pi, ylen)).collect();
    let mut m: Vec<Vec<Series<R>>> = (0..pu).map(|i| (0..pu).map(|j| cols[j][i].clone()).collect()).collect();
    let mut det = Series::one(g.proto(), ylen);
    for c in 0..pu {
        let piv = m[c][c].clone();
        let inv = piv.inv()?;
        det = det.mul_trunc(&piv, ylen);
        for r in c + 1..pu {
            let fac = m[r][c].mul_trunc(&inv, ylen);
            if fac.c.iter().all(|x| x.is_exact_zero()) {
                continue;
            }
            for j in c + 1..pu {
                let t = fac.mul_trunc(&m[c][j], ylen);
                m[r][j] = m[r][j].sub(&t);
            }
        }
    }
    if let Some(i) = det.c[len..].iter().position(|x| !x.is_zero()) {
        return Err(Error::Identity { name: "norm of a polynomial is a polynomial", index: len + i });
    }
    Ok(det.truncate(len))
}

/// A polynomial `g` over `O_L` with `N g = g^F` modulo `p^cert`.
#[derive(Clone, Debug)]
pub struct CoherentUnit {
    pub g: Series<Unr>,
    /// certified valuation of `N g - g^F`
    pub cert: i32,
    pub iters: usize,
}

/// Deterministic stream of units for sample `index` under `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

fn random_scalar(p: u32, rng: &mut ChaCha8Rng) -> Scalar {
    let c = cap(p);
    Scalar::from_residue(p, rng.next_u64() % ipow(p, c), c)
}

fn random_unr(l: &UnrRing, rng: &mut ChaCha8Rng) -> Unr {
    Unr::from_coords(l, (0..l.d).map(|_| random_scalar(l.p, rng)).collect())
}

/// A random polynomial of length `len` over `O_L` with constant term in `1 + p Z_p`.
pub fn random_seed_unit(l: &UnrRing, len: usize, rng: &mut ChaCha8Rng) -> Series<Unr> {
    let p = l.p;
    let mut c: Vec<Unr> = (0..len).map(|_| random_unr(l, rng)).collect();
    c[0] = Unr::from_scalar(l, Scalar::one(p) + random_scalar(p, rng).shift(1));
    Series::new(c)
}

/// Certified valuation of `N g - g^F`.
pub fn coherence_defect(g: &Series<Unr>, pi: &Scalar) -> Result<i32> {
    Ok(norm(g, pi)?.sub(&g.frob()).vmin())
}

/// Length to which a series must be known for its norm to be determined modulo `(p^m, Y^n)`.
pub fn norm_window(p: u32, n: usize, m: i32) -> usize {
    let p = p as usize;
    p * n + p + (p - 1) * m.max(0) as usize
}

/// Certified valuation of `N g - g^F` in the first `n` coefficients, `g` known to [`norm_window`].
pub fn coherence_defect_below(g: &Series<Unr>, pi: &Scalar, n: usize) -> Result<i32> {
    Ok(norm(g, pi)?.sub(&g.frob()).truncate(n).vmin())
}

/// Iterates `g <- (N g)^{F^{-1}}` from `h` until `N g = g^F` modulo `p^target`.
pub fn make_coherent(h: Series<Unr>, pi: &Scalar, target: i32) -> Result<CoherentUnit> {
    let mut g = h;
    for iters in 0..=target.max(0) as usize + 4 {
        let n = norm(&g, pi)?;
        let cert = n.sub(&g.frob()).vmin();
        if cert >= target {
            return Ok(CoherentUnit { g: g.cap(cert), cert, iters });
        }
        g = n.frob_inv();
    }
    Err(Error::Convergence("norm-coherent iteration"))
}

/// Working precision asked of coherent units.
pub fn unit_target(g: &LtGroup) -> i32 {
    g.cfg.m as i32 + 4
}

/// The `index`-th sampled coherent unit for `seed`.
pub fn sample_unit(g: &LtGroup, l: &UnrRing, seed: u64, index: u64) -> Result<CoherentUnit> {
    let mut rng = rng_for(seed, index);
    let h = random_seed_unit(l, g.len(), &mut rng);
    make_coherent(h, &g.pi, unit_target(g))
}

impl CoherentUnit {
    pub fn one(l: &UnrRing, len: usize) -> Self {
        CoherentUnit { g: Series::one(&Unr::one(l), len), cert: crate::padic::EXACT, iters: 0 }
    }

    pub fn ring(&self) -> &UnrRing {
        &self.g.c[0].ring
    }

    /// Product of two coherent units, re-certified.
    pub fn mul(&self, o: &Self, pi: &Scalar) -> Result<Self> {
        let n = self.g.len() + o.g.len() - 1;
        let g = self.g.resize(n).mul(&o.g.resize(n));
        let cert = coherence_defect(&g, pi)?;
        Ok(CoherentUnit { g: g.cap(cert), cert, iters: 0 })
    }

    /// `u_1 = g^{F^{-1}}(pi_1)` in `R_1` and `u_0 = g(0)^{1 - F^{-1}}`.
    pub fn levels(&self, r1: &crate::tower::TowerRing) -> Result<(Unr, Tower)> {
        let gi = self.g.frob_inv().map(|x| Tower::from_unr(r1, x));
        let u1 = gi.eval(&Tower::t_pow(r1, 1));
        let c0 = &self.g.c[0];
        let u0 = c0.mul(&c0.frob_inv().inv().ok_or(Error::Singular("g(0) is not a unit"))?);
        if u1.sub(&Tower::one(r1)).v_p() < 1 {
            return Err(Error::Identity { name: "u_1 is a principal unit", index: 0 });
        }
        Ok((u0, u1))
    }
}

/// `sum_n h_n P_n` for scalar series `P_n` (typically powers of a series).
pub fn compose_scalar<R: Coeff>(h: &Series<R>, pw: &[Series<Scalar>]) -> Series<R> {
    let len = pw[0].len();
    let mut acc = Series::zero(h.proto(), len);
    for (hn, pn) in h.c.iter().zip(pw) {
        if hn.is_exact_zero() {
            continue;
        }
        for (i, x) in pn.c.iter().enumerate() {
            if !x.is_exact_zero() {
                acc.c[i] = acc.c[i].add(&hn.scale(x));
            }
        }
    }
    acc
}

/// Data shared by all units of one configuration.
#[derive(Clone, Debug)]
pub struct ColemanCtx {
    pub grp: LtGroup,
    pub tor: Torsion,
    /// `f^n`, `n <= D`
    pub fpow: Vec<Series<Scalar>>,
    /// `theta^n`, `n <= D`
    pub theta_pow: Vec<PSeries>,
}

impl ColemanCtx {
    pub fn build(grp: LtGroup, d: usize) -> Result<Self> {
        let tor = Torsion::build(&grp, d)?;
        let len = grp.len();
        let fpow = grp.f.powers(len - 1, len);
        let theta_pow = grp.theta(len).powers(len - 1, len);
        Ok(ColemanCtx { grp, tor, fpow, theta_pow })
    }

    pub fn p(&self) -> u32 {
        self.grp.p()
    }

    pub fn l(&self) -> &UnrRing {
        &self.tor.l
    }

    pub fn len(&self) -> usize {
        self.grp.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn pinv(&self) -> Scalar {
        Scalar::from_i64(self.p(), self.p() as i64).inv().unwrap()
    }

    pub fn sample(&self, seed: u64, index: u64) -> Result<CoherentUnit> {
        sample_unit(&self.grp, self.l(), seed, index)
    }

    /// `log g`.
    pub fn log(&self, u: &CoherentUnit) -> Result<Series<Unr>> {
        u.g.log()
    }

    /// `log g - (1/p) (log g)^F([pi](X))` from `log g`.
    pub fn log_tilde(&self, lg: &Series<Unr>) -> Series<Unr> {
        let tw = compose_scalar(&lg.frob(), &self.fpow);
        lg.sub(&tw.scale(&self.pinv()))
    }

    /// `tau^n`, `n <= D`, for the translation `tau(X) = X [+] pi_1`.
    pub fn tau_powers(&self) -> Vec<Series<Tower>> {
        self.tor.tau.powers(self.len() - 1, self.len())
    }

    /// `log g - (1/p) sum_lambda log g(X [+] lambda)` over `R_1`.
    pub fn log_tilde_by_translates(&self, u: &CoherentUnit, tau_pow: &[Series<Tower>]) -> Result<Series<Tower>> {
        let r1 = &self.tor.r1;
        let gt = u.g.map(|x| Tower::from_unr(r1, x)).compose_with_powers(tau_pow);
        let lt = gt.log()?;
        let mut s = lt.clone();
        for w in &self.tor.omegas[1..] {
            s = s.add(&lt.sigma(w));
        }
        let lg = self.log(u)?.map(|x| Tower::from_unr(r1, x));
        Ok(lg.sub(&lg.add(&s).scale(&self.pinv())))
    }

    /// `h(theta(X))` for `h` over `O_L`.
    pub fn along_theta(&self, h: &Series<Unr>) -> Series<Period<Unr>> {
        let w = self.grp.w();
        let len = h.len().min(self.theta_pow.len());
        let zero = Period::constant(Unr::zero(self.l()), w);
        let mut a = Series::zero(&zero, len);
        for (n, hn) in h.c.iter().enumerate().take(len) {
            if hn.is_exact_zero() {
                continue;
            }
            for m in n..len {
                let th = &self.theta_pow[n].c[m];
                if !th.is_exact_zero() {
                    a.c[m] = a.c[m].add(&th.map(|s| hn.scale(s)));
                }
            }
        }
        a
    }

    /// The measure series `A = log~ g (theta(X))`.
    pub fn measure(&self, lt: &Series<Unr>) -> Series<Period<Unr>> {
        self.along_theta(lt)
    }

    /// `D^k h` with `D = (1/lambda') d/dX`.
    pub fn dop(&self, h: &Series<Unr>, k: usize) -> Series<Unr> {
        let l = self.l();
        h.dop(&self.grp.lp_inv.map(|x| Unr::from_scalar(l, *x)), k)
    }

    /// Certified valuation of `d_m (h o theta) - Omega (D h) o theta`.
    pub fn transfer_defect(&self, h: &Series<Unr>) -> i32 {
        let lhs = self.along_theta(h).partial_m();
        let rhs = self.along_theta(&self.dop(h, 1));
        let n = lhs.len().min(rhs.len());
        lhs.truncate(n).sub(&rhs.truncate(n).map(|x| x.shift(1))).vmin()
    }

    /// Values at the torsion points `omega(i) pi_1`, `i = 0, ..., p-1`, of
    /// `d_m^k A^{F^{-1}}` transported through `theta^{F^{-1}}`; that is
    /// `Omega'^k (D^k log~ g)^{F^{-1}}` with `Omega' = (p/pi) Omega`.
    pub fn torsion_values(&self, lt: &Series<Unr>, k: usize) -> Vec<Period<Tower>> {
        let r1 = &self.tor.r1;
        let ht = self.dop(lt, k).frob_inv();
        let e = r1.e as i64;
        let tail = ht.len() as i64 + e * ht.vmin().min(0) as i64;
        let at_pi1 = Tower::eval_t(r1, &ht.c).cap_tail(tail);
        let c = (Scalar::from_i64(self.p(), self.p() as i64) / self.grp.pi).pow(k as u64);
        let w = self.grp.w();
        let mut out = Vec::with_capacity(self.p() as usize);
        out.push(Period::monomial(Tower::from_unr(r1, &ht.c[0]).scale(&c), k as i32, w));
        for om in &self.tor.omegas {
            out.push(Period::monomial(at_pi1.sigma(om).scale(&c), k as i32, w));
        }
        out
    }

    /// `r_a = (1/p) sum_i zeta_1^{-ia} M_i` over `R_1''`; `r_0` is the part supported off `Z_p^x`.
    pub fn restricted_moments(&self, vals: &[Period<Tower>]) -> Vec<Period<Tower>> {
        let p = self.p() as i64;
        let lifted: Vec<Period<Tower>> = vals.iter().map(|v| v.map(|x| self.tor.lift(x))).collect();
        (0..p)
            .map(|a| {
                let mut acc = lifted[0].clone();
                for (i, v) in lifted.iter().enumerate().skip(1) {
                    let z = self.tor.zeta_pow(-(i as i64) * a);
                    acc = acc.add(&v.map(|x| x.mul(&z)));
                }
                acc.scale(&self.pinv())
            })
            .collect()
    }
}

/// `(d_m^k A)(0)`.
pub fn moment<R: Coeff>(a: &Series<R>, k: usize) -> R {
    let mut s = a.clone();
    for _ in 0..k {
        s = s.partial_m();
    }
    s.c[0].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeConfig;
    use crate::unramified::build_l;

    fn sc(p: u32, x: i64) -> Scalar {
        Scalar::from_i64(p, x)
    }

    #[test]
    fn reduction_of_x_to_the_p() {
        // X^p = Y - pi X
        let p = 5;
        let pi = sc(p, 30);
        let g = Series::from_i64(p, &[0, 0, 0, 0, 0, 1], 6);
        let a = weierstrass(&g, p, &pi, 3);
        assert!(a[0].c[1].eq_to(&sc(p, 1)));
        assert!(a[1].c[0].eq_to(&sc(p, -30)));
        assert!(a[2].vmin() >= 20 && a[4].vmin() >= 20);
    }

    #[test]
    fn norm_of_constants() {
        let p = 5;
        let pi = sc(p, 30);
        let one = Series::one(&sc(p, 1), 10);
        assert!(norm(&one, &pi).unwrap().sub(&one).vmin() >= 20);
        let c = Series::constant(sc(p, 7), 10);
        let n = norm(&c, &pi).unwrap();
        assert!(n.c[0].eq_to(&sc(p, 16807)));
        assert!(n.c[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn norm_of_x_plus_one() {
        // prod (1 + z_i) over the roots of Z^p + pi Z - Y is 1 + pi + Y
        let p = 5;
        let pi = sc(p, 30);
        let g = Series::from_i64(p, &[1, 1, 0, 0, 0, 0, 0], 7);
        let n = norm(&g, &pi).unwrap();
        assert!(n.c[0].eq_to(&sc(p, 31)));
        assert!(n.c[1].eq_to(&sc(p, 1)));
        assert!(n.c[2..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn norm_congruence_and_coherence() {
        let p = 5;
        let l = build_l(p, 4).unwrap();
        let pi = sc(p, 35);
        let mut rng = rng_for(7, 0);
        let h = random_seed_unit(&l, 13, &mut rng);
        assert!(coherence_defect(&h, &pi).unwrap() >= 1);
        let u = make_coherent(h, &pi, 12).unwrap();
        assert!(u.cert >= 12);
        assert!(coherence_defect(&u.g, &pi).unwrap() >= 12);
    }

    #[test]
    fn levels_are_norm_compatible() {
        let p = 5;
        let g = LtGroup::build(PrimeConfig::new(p, 10, 16).unwrap(), sc(p, 35)).unwrap();
        let l = build_l(p, 4).unwrap();
        let r1 = crate::tower::build_tower(&l, g.pi).unwrap();
        let u = sample_unit(&g, &l, 3, 1).unwrap();
        let (u0, u1) = u.levels(&r1).unwrap();
        let mut prod = Tower::one(&r1);
        for a in 1..p as i64 {
            prod = prod.mul(&u1.sigma(&sc(p, a).teichmuller().unwrap()));
        }
        assert!(prod.sub(&Tower::from_unr(&r1, &u0)).vmin() >= 12);
    }

    fn ctx(p: u32, d: usize, pi: i64, deg: usize) -> ColemanCtx {
        let g = LtGroup::build(PrimeConfig::new(p, 10, deg).unwrap(), sc(p, pi)).unwrap();
        ColemanCtx::build(g, d).unwrap()
    }

    #[test]
    fn log_tilde_of_one_vanishes() {
        let c = ctx(5, 4, 35, 16);
        let u = CoherentUnit::one(c.l(), c.len());
        let lt = c.log_tilde(&c.log(&u).unwrap());
        assert!(lt.vmin() >= 20);
    }

    #[test]
    fn log_tilde_forms_agree() {
        let c = ctx(5, 4, 35, 16);
        let u = c.sample(11, 0).unwrap();
        let lt = c.log_tilde(&c.log(&u).unwrap());
        assert!(lt.vmin() >= 0);
        let other = c.log_tilde_by_translates(&u, &c.tau_powers()).unwrap();
        let diff = other.sub(&lt.map(|x| Tower::from_unr(&c.tor.r1, x)));
        assert!(diff.vmin() >= 10, "{}", diff.vmin());
    }

    #[test]
    fn transfer_identity() {
        let c = ctx(5, 4, 35, 16);
        let mut rng = rng_for(5, 5);
        let h = random_seed_unit(c.l(), c.len(), &mut rng);
        assert!(c.transfer_defect(&h) >= 10);
    }

    #[test]
    fn restricted_moments_partition_the_moment() {
        let c = ctx(5, 1, 30, 40);
        let u = c.sample(2, 3).unwrap();
        let lt = c.log_tilde(&c.log(&u).unwrap());
        let a = c.measure(&lt);
        for k in 1..4 {
            let vals = c.torsion_values(&lt, k);
            let r = c.restricted_moments(&vals);
            assert!(r[0].vmin() >= 8, "r_0 at k = {k}: {}", r[0].vmin());
            let mut s = r[0].clone();
            for x in &r[1..] {
                s = s.add(x);
            }
            assert!(s.sub(&vals[0].map(|x| c.tor.lift(x))).vmin() >= 8);
            // the plain moment through theta against the torsion route at 0
            let m = moment(&a, k).frob_inv().map(|x| Tower::from_unr(&c.tor.r1, x));
            assert!(m.sub(&vals[0]).vmin() >= 8, "k = {k}");
        }
    }
}
