//! The level-one tower ring `R1 = O[T]/(T^{p-1} + pi)` over an unramified base.
//!
//! `T` is the torsion point `pi_1` of the special Lubin-Tate series
//! `f(X) = pi X + X^p`.  Coordinates are flattened with index `t * d + s` for
//! the basis element `T^t alpha^s`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::coeff::{Coeff, Twist};
use crate::error::{Error, Result};
use crate::padic::Scalar;
use crate::unramified::{Unr, UnrRing};

#[derive(Debug)]
pub struct TowerCtx {
    pub p: u32,
    pub base: UnrRing,
    pub pi: Scalar,
    /// ramification index `p - 1`
    pub e: usize,
    pub d: usize,
}

pub type TowerRing = Arc<TowerCtx>;

pub fn build_tower(base: &UnrRing, pi: Scalar) -> Result<TowerRing> {
    if pi.val() != 1 || pi.is_zero() {
        return Err(Error::Valuation("pi must have valuation one"));
    }
    let p = base.p;
    Ok(Arc::new(TowerCtx { p, base: base.clone(), pi, e: p as usize - 1, d: base.d }))
}

#[derive(Clone)]
pub struct Tower {
    pub ring: TowerRing,
    pub c: Vec<Scalar>,
}

impl Tower {
    pub fn zero(ring: &TowerRing) -> Self {
        Tower { ring: ring.clone(), c: alloc::vec![Scalar::zero_exact(ring.p); ring.e * ring.d] }
    }

    pub fn from_scalar(ring: &TowerRing, x: Scalar) -> Self {
        let mut z = Self::zero(ring);
        z.c[0] = x;
        z
    }

    pub fn one(ring: &TowerRing) -> Self {
        Self::from_scalar(ring, Scalar::one(ring.p))
    }

    pub fn from_unr(ring: &TowerRing, x: &Unr) -> Self {
        let mut z = Self::zero(ring);
        z.c[..ring.d].copy_from_slice(&x.c);
        z
    }

    /// `T^n` for any integer `n`.
    pub fn t_pow(ring: &TowerRing, n: i64) -> Self {
        let e = ring.e as i64;
        let q = n.div_euclid(e);
        let r = n.rem_euclid(e) as usize;
        let mut z = Self::zero(ring);
        z.c[r * ring.d] = (-ring.pi).powi(q);
        z
    }

    /// The `T^t` coefficient as an element of the base.
    pub fn block(&self, t: usize) -> Unr {
        let d = self.ring.d;
        Unr::from_coords(&self.ring.base, self.c[t * d..(t + 1) * d].to_vec())
    }

    pub fn from_blocks(ring: &TowerRing, blocks: &[Unr]) -> Self {
        let mut z = Self::zero(ring);
        for (t, b) in blocks.iter().enumerate() {
            z.c[t * ring.d..(t + 1) * ring.d].copy_from_slice(&b.c);
        }
        z
    }

    /// Valuation normalized by `v_P(T) = 1`.
    pub fn v_p(&self) -> i32 {
        let (e, d) = (self.ring.e, self.ring.d);
        (0..e)
            .flat_map(|t| (0..d).map(move |s| (t, s)))
            .map(|(t, s)| (e as i32) * self.c[t * d + s].val() + t as i32)
            .min()
            .unwrap()
    }

    /// True when `v_P` is certified, i.e. attained by a nonzero coordinate.
    pub fn v_p_certified(&self) -> bool {
        let (e, d) = (self.ring.e, self.ring.d);
        let vp = self.v_p();
        (0..e * d).any(|i| !self.c[i].is_zero() && (e as i32) * self.c[i].val() + (i / d) as i32 == vp)
    }

    /// `Tr_{L1/Q_p}` from the coordinates.
    pub fn trace(&self) -> Scalar {
        self.c[0] * Scalar::from_i64(self.ring.p, (self.ring.e * self.ring.d) as i64)
    }

    /// `Tr_{L1/Q_p}` as a sum over all `d (p - 1)` conjugates.
    pub fn trace_by_conjugates(&self, omegas: &[Scalar]) -> Result<Scalar> {
        let mut acc = Tower::zero(&self.ring);
        for w in omegas {
            let mut x = self.sigma(w);
            for _ in 0..self.ring.d {
                acc = acc.add(&x);
                x = x.frob();
            }
        }
        if acc.c[1..].iter().any(|x| !x.is_zero()) {
            return Err(Error::Identity { name: "trace lies in Q_p", index: 0 });
        }
        Ok(acc.c[0])
    }

    /// Drops precision to what survives adding an unknown element of `P^n`.
    pub fn cap_tail(&self, n: i64) -> Self {
        let (e, d) = (self.ring.e as i64, self.ring.d);
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let t = (i / d) as i64;
                x.cap(((n - t).div_euclid(e) + ((n - t).rem_euclid(e) != 0) as i64) as i32)
            })
            .collect();
        Tower { ring: self.ring.clone(), c }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn map_blocks(&self, f: impl Fn(usize, &Unr) -> Unr) -> Self {
        let blocks: Vec<Unr> = (0..self.ring.e).map(|t| f(t, &self.block(t))).collect();
        Tower::from_blocks(&self.ring, &blocks)
    }

    /// Division by `T`.
    pub fn div_t(&self) -> Self {
        let d = self.ring.d;
        let mut z = Tower::zero(&self.ring);
        let inv = (-self.ring.pi).inv().unwrap();
        for t in 1..self.ring.e {
            for s in 0..d {
                z.c[(t - 1) * d + s] = self.c[t * d + s];
            }
        }
        let last = (self.ring.e - 1) * d;
        for s in 0..d {
            z.c[last + s] = self.c[s] * inv;
        }
        z
    }

    /// `sum_n c_n T^n`, folding `T^{e q + r} = (-pi)^q T^r`.
    pub fn eval_t(ring: &TowerRing, c: &[Unr]) -> Self {
        let e = ring.e;
        let mpi = -ring.pi;
        let mut blocks: Vec<Unr> = (0..e).map(|_| Unr::zero(&ring.base)).collect();
        let mut w = Scalar::one(ring.p);
        for (q, chunk) in c.chunks(e).enumerate() {
            if q > 0 {
                w = w * mpi;
            }
            for (r, x) in chunk.iter().enumerate() {
                blocks[r] = blocks[r].add(&x.scale(&w));
            }
        }
        Tower::from_blocks(ring, &blocks)
    }

    pub fn frob_pow(&self, i: i64) -> Self {
        let i = i.rem_euclid(self.ring.d as i64);
        let mut x = self.clone();
        for _ in 0..i {
            x = x.frob();
        }
        x
    }
}

impl Coeff for Tower {
    fn zero_like(&self) -> Self {
        Tower::zero(&self.ring)
    }
    fn one_like(&self) -> Self {
        Tower::one(&self.ring)
    }
    fn add(&self, o: &Self) -> Self {
        Tower { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| *a + *b).collect() }
    }
    fn sub(&self, o: &Self) -> Self {
        Tower { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| *a - *b).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let (e, d, p) = (self.ring.e, self.ring.d, self.ring.p);
        let w = 2 * d - 1;
        let mut raw = alloc::vec![Scalar::zero_exact(p); (2 * e - 1) * w];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            let (t1, s1) = (i / d, i % d);
            for (j, b) in o.c.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                let k = (t1 + j / d) * w + s1 + j % d;
                raw[k] = raw[k] + *a * *b;
            }
        }
        let u0 = self.ring.base.u0;
        for t in 0..2 * e - 1 {
            for s in d..w {
                let x = raw[t * w + s];
                if !x.is_exact_zero() {
                    raw[t * w + s - d] = raw[t * w + s - d] + x * u0;
                }
            }
        }
        let npi = -self.ring.pi;
        for t in e..2 * e - 1 {
            for s in 0..d {
                let x = raw[t * w + s];
                if !x.is_exact_zero() {
                    raw[(t - e) * w + s] = raw[(t - e) * w + s] + x * npi;
                }
            }
        }
        let mut c = Vec::with_capacity(e * d);
        for t in 0..e {
            c.extend_from_slice(&raw[t * w..t * w + d]);
        }
        Tower { ring: self.ring.clone(), c }
    }
    fn neg(&self) -> Self {
        Tower { ring: self.ring.clone(), c: self.c.iter().map(|x| -*x).collect() }
    }
    fn scale(&self, s: &Scalar) -> Self {
        Tower { ring: self.ring.clone(), c: self.c.iter().map(|x| *x * *s).collect() }
    }
    fn vmin(&self) -> i32 {
        self.c.iter().map(|x| x.val()).min().unwrap()
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn prime(&self) -> u32 {
        self.ring.p
    }
    /// Inverse through the norm to the base: the product of the other `sigma_a` conjugates.
    fn inv(&self) -> Option<Self> {
        let vp = self.v_p();
        if self.is_zero() {
            return None;
        }
        // make it a unit first
        let mut x = self.clone();
        for _ in 0..vp.rem_euclid(self.ring.e as i32) {
            x = x.div_t();
        }
        let q = vp.div_euclid(self.ring.e as i32);
        let x = x.scale(&(-self.ring.pi).powi(-q as i64));
        let p = self.ring.p;
        let g = Scalar::from_i64(p, crate::padic::primitive_root(p) as i64).teichmuller().ok()?;
        let mut y = Tower::one(&self.ring);
        let mut w = g;
        for _ in 1..self.ring.e {
            y = y.mul(&x.sigma(&w));
            w = w * g;
        }
        let n = x.mul(&y);
        let nb = n.block(0).inv()?;
        let xi = y.mul(&Tower::from_unr(&self.ring, &nb));
        // undo the normalization: self = x T^{r} (-pi)^q
        let mut out = xi.scale(&(-self.ring.pi).powi(-q as i64));
        for _ in 0..vp.rem_euclid(self.ring.e as i32) {
            out = out.div_t();
        }
        Some(out)
    }
    fn cap(&self, abs: i32) -> Self {
        Tower { ring: self.ring.clone(), c: self.c.iter().map(|x| x.with_prec(abs)).collect() }
    }
    fn is_exact_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_exact_zero())
    }
    /// `log(x^{q-1}) / (q-1)` with `q = p^d`.
    fn log_unit(&self) -> Option<Self> {
        if self.v_p() != 0 {
            return None;
        }
        let p = self.ring.p;
        let q1 = (p as u64).pow(self.ring.d as u32) - 1;
        let z = self.pow(q1).sub(&self.one_like());
        if z.v_p() < 1 {
            return None;
        }
        let prec = self.c.iter().map(|x| x.prec()).min().unwrap().max(1);
        let terms = crate::coeff::log_terms(p, self.ring.e as u32, prec);
        let l = crate::coeff::log1p_terms(&z, terms);
        let qi = Scalar::from_i64(p, q1 as i64).inv().ok()?;
        Some(l.scale(&qi).cap(prec))
    }
}

impl Twist for Tower {
    fn frob(&self) -> Self {
        let d = self.ring.d;
        let base = &self.ring.base;
        let c = self.c.iter().enumerate().map(|(i, x)| *x * base.eps(i % d)).collect();
        Tower { ring: self.ring.clone(), c }
    }
    fn frob_inv(&self) -> Self {
        let d = self.ring.d;
        let base = &self.ring.base;
        let c = self.c.iter().enumerate().map(|(i, x)| *x * base.eps_inv(i % d)).collect();
        Tower { ring: self.ring.clone(), c }
    }
    /// `T -> w T`
    fn sigma(&self, w: &Scalar) -> Self {
        let d = self.ring.d;
        let mut wt = Scalar::one(self.ring.p);
        let mut c = self.c.clone();
        for t in 0..self.ring.e {
            for s in 0..d {
                c[t * d + s] = c[t * d + s] * wt;
            }
            wt = wt * *w;
        }
        Tower { ring: self.ring.clone(), c }
    }
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.c.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unramified::build_l;

    fn ring(p: u32, d: usize, pi: i64) -> TowerRing {
        build_tower(&build_l(p, d).unwrap(), Scalar::from_i64(p, pi)).unwrap()
    }

    #[test]
    fn t_is_torsion() {
        let r = ring(5, 4, 35);
        let t = Tower::t_pow(&r, 1);
        let f = t.pow(5).add(&t.scale(&r.pi));
        assert!(f.is_zero());
        assert_eq!(t.v_p(), 1);
        assert_eq!(Tower::from_scalar(&r, r.pi).v_p(), 4);
    }

    #[test]
    fn inverse_of_non_unit() {
        let r = ring(7, 2, 21);
        let x = Tower::t_pow(&r, 3).add(&Tower::t_pow(&r, 8));
        let y = x.inv().unwrap();
        assert!(x.mul(&y).sub(&Tower::one(&r)).is_zero());
        assert_eq!(y.v_p(), -3);
    }

    #[test]
    fn log_is_additive() {
        let r = ring(5, 1, 30);
        let t = Tower::t_pow(&r, 1);
        let x = Tower::one(&r).add(&t);
        let y = Tower::from_scalar(&r, Scalar::from_i64(5, 3)).add(&t.pow(2));
        let lx = x.log_unit().unwrap();
        let ly = y.log_unit().unwrap();
        let lxy = x.mul(&y).log_unit().unwrap();
        assert!(lxy.sub(&lx.add(&ly)).vmin() >= 8);
    }

    #[test]
    fn trace_of_basis() {
        let r = ring(5, 4, 35);
        let om: Vec<Scalar> = (1..5).map(|a| Scalar::from_i64(5, a).teichmuller().unwrap()).collect();
        for t in 0..4 {
            for s in 0..4 {
                let mut x = Tower::zero(&r);
                x.c[t * 4 + s] = Scalar::one(5);
                let tr = x.trace_by_conjugates(&om).unwrap();
                assert!(tr.eq_to(&x.trace()), "{t} {s}");
            }
        }
    }
}
