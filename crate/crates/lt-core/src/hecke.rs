//! Uniformisers from Hecke data, the index of anomaly, and the explicit
//! exponential as a trace formula.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use crate::coates_wiles::phi_cw;
use crate::coeff::{Coeff, Twist};
use crate::coleman::ColemanCtx;
use crate::error::{Error, Result};
use crate::padic::{vp_int, Scalar};
use crate::series::Series;
use crate::unramified::{Unr, UnrRing};

/// `pi_E = psi(P)` together with the weight `k` and twist `j`.
#[derive(Clone, Copy, Debug)]
pub struct HeckeInput {
    pub pi_e: Scalar,
    pub k: u32,
    pub j: i64,
}

impl HeckeInput {
    pub fn new(pi_e: Scalar, k: u32, j: i64) -> Result<Self> {
        if pi_e.is_zero() || pi_e.val() != 1 {
            return Err(Error::Hypothesis("pi_E must have valuation one"));
        }
        if k == 0 || k % pi_e.prime() == 0 {
            return Err(Error::Hypothesis("k must be positive and prime to p"));
        }
        Ok(HeckeInput { pi_e, k, j })
    }

    /// `w = p / pi_E`
    pub fn w(&self) -> Scalar {
        Scalar::from_i64(self.pi_e.prime(), self.pi_e.prime() as i64) / self.pi_e
    }
}

/// `r = log u / log(p/pi_E) + 1` for `pi = u p`.
pub fn compute_r(pi: &Scalar, pi_e: &Scalar) -> Result<Scalar> {
    let p = pi.prime();
    let ps = Scalar::from_i64(p, p as i64);
    let u = *pi / ps;
    let w = ps / *pi_e;
    let lw = w.iw_log()?;
    if lw.is_zero() {
        return Err(Error::Degenerate("log of p/pi_E vanishes to working precision"));
    }
    let r = u.iw_log()? / lw + Scalar::one(p);
    // <u> = <w>^{r-1}
    let back = ((r - Scalar::one(p)) * lw).iw_exp()?;
    if !back.eq_to(&u.angle()?) {
        return Err(Error::Identity { name: "u recovered from r", index: 0 });
    }
    Ok(r)
}

/// `pi = pi_E <w^{-j}>^{1/k}`.
pub fn uniformiser_for(h: &HeckeInput) -> Result<Scalar> {
    let p = h.pi_e.prime();
    let w = h.w();
    let a = w.angle()?.powi(-h.j);
    let root = a.kth_root_one_unit(h.k as i64)?;
    let pi = h.pi_e * root;
    if pi.val() != 1 {
        return Err(Error::Valuation("uniformiser"));
    }
    if !(pi / h.pi_e).pow(h.k as u64).eq_to(&a) {
        return Err(Error::Identity { name: "k-th power of pi / pi_E", index: 0 });
    }
    // log(pi / pi_E) = (-j/k) log <w>
    let lhs = (pi / h.pi_e).iw_log()?;
    let rhs = w.iw_log()? * Scalar::from_ratio(p, -(h.j as i128), h.k as i128);
    if !lhs.eq_to(&rhs) {
        return Err(Error::Identity { name: "logarithm of pi / pi_E", index: 0 });
    }
    Ok(pi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnomalyData {
    pub n: u32,
    pub s: u32,
    /// `eps(F)`: the Frobenius multiplier on `alpha`, as an integer mod `p^M`
    pub eps_f: u64,
    /// `N` reached the working precision
    pub capped: bool,
}

/// Largest `n <= m` with `(pi/p)^d = 1 mod p^n`.
fn congruence_depth(x: &Scalar, m: u32) -> u32 {
    let y = *x - Scalar::one(x.prime());
    if y.is_zero() {
        m.min(y.val().max(0) as u32)
    } else {
        (y.val().max(0) as u32).min(m)
    }
}

/// Index of anomaly `(N, S)` of the group of `pi` over the degree `d` field `l`.
pub fn anomaly_index(pi: &Scalar, l: &UnrRing, m: u32) -> Result<AnomalyData> {
    let p = pi.prime();
    let u = *pi / Scalar::from_i64(p, p as i64);
    if !u.is_unit() {
        return Err(Error::Valuation("pi / p is not a unit"));
    }
    let d = l.d as u64;
    let n = congruence_depth(&u.pow(d), m);
    let capped = n >= m;
    let eps = l.frob_mult;
    let s = if n == 0 {
        0
    } else {
        let cands: Vec<u32> =
            (0..d as u32).filter(|&s| congruence_depth(&(u / eps.pow(s as u64)), m) >= n).collect();
        if cands.len() != 1 && !(capped && !cands.is_empty()) {
            return Err(Error::Identity { name: "unique S with pi/p = eps^S", index: cands.len() });
        }
        cands[0]
    };
    if capped && u.pow(d).sub(&Scalar::one(p)).is_zero() && u.teichmuller()?.eq_to(&u) {
        return Err(Error::CappedAtPrecision("pi/p is a root of unity"));
    }
    Ok(AnomalyData { n, s, eps_f: eps.residue(m), capped })
}

/// Whether `(pi/p)^d = 1 mod p^n` and `pi/p = eps^S mod p^n` (some `S`) agree for every `n <= m`.
pub fn anomaly_statements_agree(pi: &Scalar, l: &UnrRing, m: u32) -> bool {
    let p = pi.prime();
    let u = *pi / Scalar::from_i64(p, p as i64);
    let d = l.d as u64;
    let ud = congruence_depth(&u.pow(d), m);
    (1..=m).all(|n| {
        let a = ud >= n;
        let b = (0..d).any(|s| congruence_depth(&(u / l.frob_mult.pow(s)), m) >= n);
        a == b
    })
}

/// `N_k = min(N, 1 + v_p(k - 1))`; for `k = 1` this is `N`.
pub fn n_k(p: u32, k: u32, n: u32) -> u32 {
    if k == 1 {
        n
    } else {
        n.min(1 + vp_int(p, k as i128 - 1))
    }
}

#[derive(Clone, Debug)]
pub struct PolyLemmaReport {
    pub trials: usize,
    /// smallest `v_p(P((1+p)^k - 1))` seen
    pub min_val: u32,
    pub n_k: u32,
    /// coefficients of a polynomial attaining `N_k`
    pub witness: Option<Vec<i64>>,
    /// whether the bound `N k` also held on every sample
    pub nk_product_bound_holds: bool,
}

fn poly_eval_val(p: u32, coeffs: &[Scalar], x: &Scalar) -> u32 {
    let mut acc = Scalar::zero_exact(p);
    for c in coeffs.iter().rev() {
        acc = acc * *x + *c;
    }
    acc.val().max(0) as u32
}

/// Random `P` of degree `<= deg` with `P(p) = 0 mod p^N`, evaluated at `(1+p)^k - 1`.
pub fn poly_lemma_check(p: u32, n: u32, k: u32, deg: usize, trials: usize, rng: &mut ChaCha8Rng) -> PolyLemmaReport {
    let nk = n_k(p, k, n);
    let x = Scalar::from_i64(p, 1 + p as i64).pow(k as u64) - Scalar::one(p);
    let ps = Scalar::from_i64(p, p as i64);
    let mut min_val = u32::MAX;
    let mut witness = None;
    let mut nk_prod = true;
    let h = 4 * p as u64;
    let try_poly = |c: Vec<i64>, min_val: &mut u32, witness: &mut Option<Vec<i64>>, nk_prod: &mut bool| {
        let s: Vec<Scalar> = c.iter().map(|&a| Scalar::from_i64(p, a)).collect();
        let v = poly_eval_val(p, &s, &x);
        *min_val = (*min_val).min(v);
        if v < n * k {
            *nk_prod = false;
        }
        if v == nk && witness.is_none() {
            *witness = Some(c);
        }
    };
    for _ in 0..trials {
        // small random coefficients c_1..c_deg, then c_0 fixes P(p) = p^N r
        let mut c: Vec<i64> = (0..=deg).map(|_| (rng.next_u64() % (2 * h + 1)) as i64 - h as i64).collect();
        let mut at_p: i128 = 0;
        for (i, &a) in c.iter().enumerate().skip(1) {
            at_p += a as i128 * (p as i128).pow(i as u32);
        }
        let r = (rng.next_u64() % h) as i128;
        let c0 = (p as i128).pow(n) * r - at_p;
        c[0] = c0 as i64;
        debug_assert!(poly_eval_val(p, &c.iter().map(|&a| Scalar::from_i64(p, a)).collect::<Vec<_>>(), &ps) >= n);
        try_poly(c, &mut min_val, &mut witness, &mut nk_prod);
    }
    if witness.is_none() {
        // X - p and the constant p^N
        try_poly(alloc::vec![-(p as i64), 1], &mut min_val, &mut witness, &mut nk_prod);
        try_poly(alloc::vec![(p as i64).pow(n)], &mut min_val, &mut witness, &mut nk_prod);
    }
    PolyLemmaReport { trials, min_val, n_k: nk, witness, nk_product_bound_holds: nk_prod }
}

fn factorial_inv(p: u32, k: u32) -> Scalar {
    let mut f = Scalar::one(p);
    for i in 1..k as i64 {
        f = f * Scalar::from_i64(p, i);
    }
    f.inv().unwrap()
}

/// `(1/(k-1)!) Tr_{L/Q_p}(a phi_CW^k(u))`: the coefficient of `t_pi^k`.
pub fn reciprocity_pairing(c: &ColemanCtx, a: &Unr, k: usize, lg: &Series<Unr>) -> Result<Scalar> {
    let x = a.mul(&phi_cw(c, lg, k));
    Ok(x.trace()? * factorial_inv(c.p(), k as u32))
}

/// `(1/(k-1)!) Tr[(a - a^F / pi^k) phi_CW^k(u)]`, summing Frobenius conjugates.
pub fn exp_bk(c: &ColemanCtx, h: &HeckeInput, a: &Unr, lg: &Series<Unr>) -> Result<Scalar> {
    let pi = uniformiser_for(h)?;
    if !pi.eq_to(&c.grp.pi) {
        return Err(Error::Config("group was not built from the Hecke uniformiser"));
    }
    let k = h.k as usize;
    let b = a.sub(&a.frob().scale(&pi.powi(-(k as i64))));
    let x = b.mul(&phi_cw(c, lg, k));
    let mut s = x.clone();
    let mut y = x;
    for _ in 1..c.l().d {
        y = y.frob();
        s = s.add(&y);
    }
    Ok(s.to_scalar()? * factorial_inv(c.p(), k as u32))
}

/// `a - a^F / pi^k`
pub fn exp_argument(a: &Unr, pi: &Scalar, k: usize) -> Unr {
    a.sub(&a.frob().scale(&pi.powi(-(k as i64))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coleman::rng_for;
    use crate::unramified::build_l;

    fn sc(p: u32, x: i64) -> Scalar {
        Scalar::from_i64(p, x)
    }

    #[test]
    fn r_for_constructed_uniformisers() {
        let p = 5;
        let pi_e = sc(p, 5) * sc(p, 2).inv().unwrap() * sc(p, 6);
        let w = sc(p, 5) / pi_e;
        let r = compute_r(&(sc(p, 5) * w * w), &pi_e).unwrap();
        assert!(r.eq_to(&sc(p, 3)));
        let r = compute_r(&pi_e, &pi_e).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn uniformiser_degenerates_at_j_zero() {
        let p = 5;
        let pi_e = sc(p, 5 * 7);
        let h = HeckeInput::new(pi_e, 2, 0).unwrap();
        assert!(uniformiser_for(&h).unwrap().eq_to(&pi_e));
        let h = HeckeInput::new(pi_e, 2, -2).unwrap();
        let w = h.w().angle().unwrap();
        assert!(uniformiser_for(&h).unwrap().eq_to(&(pi_e * w)));
        assert!(HeckeInput::new(pi_e, 5, 1).is_err());
    }

    #[test]
    fn anomaly_examples() {
        let l4 = build_l(5, 4).unwrap();
        let a = anomaly_index(&sc(5, 35), &l4, 10).unwrap();
        assert_eq!((a.n, a.s), (2, 1));
        assert_eq!(a.eps_f % 25, 7);
        let l1 = build_l(5, 1).unwrap();
        let a = anomaly_index(&sc(5, 30), &l1, 10).unwrap();
        assert_eq!((a.n, a.s), (1, 0));
        let a = anomaly_index(&sc(5, 5 * (1 + 125 * 2)), &l1, 10).unwrap();
        assert_eq!(a.n, 3);
        assert!(anomaly_statements_agree(&sc(5, 35), &l4, 10));
    }

    #[test]
    fn n_k_values() {
        assert_eq!(n_k(5, 2, 0), 0);
        assert_eq!(n_k(5, 2, 3), 1);
        assert_eq!(n_k(5, 6, 2), 2);
    }

    #[test]
    fn polynomial_lemma_small() {
        let mut rng = rng_for(9, 0);
        let r = poly_lemma_check(5, 2, 6, 4, 64, &mut rng);
        assert!(r.min_val >= r.n_k);
        assert!(r.witness.is_some());
        let r = poly_lemma_check(5, 1, 2, 4, 64, &mut rng);
        assert!(!r.nk_product_bound_holds);
    }

    #[test]
    fn explicit_exponential_matches_pairing() {
        use crate::lubin_tate::LtGroup;
        use crate::padic::PrimeConfig;
        let p = 5;
        let h = HeckeInput::new(sc(p, 35), 2, 1).unwrap();
        let pi = uniformiser_for(&h).unwrap();
        let g = LtGroup::build(PrimeConfig::new(p, 10, 16).unwrap(), pi).unwrap();
        let c = ColemanCtx::build(g, 4).unwrap();
        let lg1 = c.log(&c.sample(3, 0).unwrap()).unwrap();
        let lg2 = c.log(&c.sample(3, 1).unwrap()).unwrap();
        let a = Unr::from_coords(c.l(), (0..4).map(|i| sc(p, 3 + i)).collect());
        let e = exp_bk(&c, &h, &a, &lg1).unwrap();
        let r = reciprocity_pairing(&c, &exp_argument(&a, &pi, 2), 2, &lg1).unwrap();
        assert!(e.eq_to(&r));
        let e2 = exp_bk(&c, &h, &a, &lg2).unwrap();
        let e12 = exp_bk(&c, &h, &a, &lg1.add(&lg2)).unwrap();
        assert!(e12.eq_to(&(e + e2)));
        assert!(exp_bk(&c, &h, &Unr::zero(c.l()), &lg1).unwrap().is_zero());
    }
}
