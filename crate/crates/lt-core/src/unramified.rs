//! Unramified extensions in the Kummer model `L = Q_p(alpha)`, `alpha^d = u0`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::coeff::{Coeff, Twist};
use crate::error::{Error, Result};
use crate::padic::Scalar;

#[derive(Debug)]
pub struct UnrCtx {
    pub p: u32,
    pub d: usize,
    /// `alpha^d = u0`
    pub u0: Scalar,
    /// `F(alpha) = frob_mult * alpha`
    pub frob_mult: Scalar,
    eps: Vec<Scalar>,
    eps_inv: Vec<Scalar>,
}

pub type UnrRing = Arc<UnrCtx>;

impl UnrCtx {
    /// `frob_mult^s`
    pub fn eps(&self, s: usize) -> Scalar {
        self.eps[s]
    }

    pub fn eps_inv(&self, s: usize) -> Scalar {
        self.eps_inv[s]
    }
}

fn order_mod(p: u32, x: u64) -> u32 {
    let mut y = x % p as u64;
    let mut k = 1;
    while y != 1 {
        y = y * x % p as u64;
        k += 1;
    }
    k
}

/// Smallest positive integer whose class has order exactly `d` in `F_p^x / (F_p^x)^d`.
pub fn kummer_unit(p: u32, d: u32) -> u64 {
    let e = (p - 1) / d;
    (1..p as u64)
        .find(|&x| {
            let mut y = 1u64;
            for _ in 0..e {
                y = y * x % p as u64;
            }
            order_mod(p, y) == d
        })
        .expect("a generator exists")
}

/// Builds the degree `d` unramified extension of `Q_p`.
pub fn build_l(p: u32, d: usize) -> Result<UnrRing> {
    if d == 0 || (p as usize - 1) % d != 0 {
        return Err(Error::Hypothesis("d must divide p - 1"));
    }
    let u0v = kummer_unit(p, d as u32);
    let u0 = Scalar::from_i64(p, u0v as i64);
    let frob_mult = u0.pow((p as u64 - 1) / d as u64).teichmuller()?;
    let fi = frob_mult.inv()?;
    let mut eps = Vec::with_capacity(d);
    let mut eps_inv = Vec::with_capacity(d);
    let (mut a, mut b) = (Scalar::one(p), Scalar::one(p));
    for _ in 0..d {
        eps.push(a);
        eps_inv.push(b);
        a = a * frob_mult;
        b = b * fi;
    }
    let ring = Arc::new(UnrCtx { p, d, u0, frob_mult, eps, eps_inv });
    // alpha^p must reduce to F(alpha)
    let al = Unr::alpha_pow(&ring, 1);
    let lhs = al.pow(p as u64);
    let rhs = al.frob();
    if lhs.sub(&rhs).vmin() < 1 {
        return Err(Error::Identity { name: "frobenius residue", index: 1 });
    }
    Ok(ring)
}

#[derive(Clone)]
pub struct Unr {
    pub ring: UnrRing,
    pub c: Vec<Scalar>,
}

impl Unr {
    pub fn from_scalar(ring: &UnrRing, s: Scalar) -> Self {
        let mut c = alloc::vec![Scalar::zero_exact(ring.p); ring.d];
        c[0] = s;
        Unr { ring: ring.clone(), c }
    }

    pub fn from_coords(ring: &UnrRing, c: Vec<Scalar>) -> Self {
        assert_eq!(c.len(), ring.d);
        Unr { ring: ring.clone(), c }
    }

    pub fn zero(ring: &UnrRing) -> Self {
        Self::from_scalar(ring, Scalar::zero_exact(ring.p))
    }

    pub fn one(ring: &UnrRing) -> Self {
        Self::from_scalar(ring, Scalar::one(ring.p))
    }

    /// `alpha^s` for any integer `s`, reduced into the basis.
    pub fn alpha_pow(ring: &UnrRing, s: i64) -> Self {
        let d = ring.d as i64;
        let q = s.div_euclid(d);
        let r = s.rem_euclid(d) as usize;
        let mut c = alloc::vec![Scalar::zero_exact(ring.p); ring.d];
        c[r] = ring.u0.powi(q);
        Unr { ring: ring.clone(), c }
    }

    pub fn coord(&self, s: usize) -> Scalar {
        self.c[s]
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

    pub fn frob_pow(&self, i: i64) -> Self {
        let d = self.ring.d as i64;
        let i = i.rem_euclid(d);
        let mut x = self.clone();
        for _ in 0..i {
            x = x.frob();
        }
        x
    }

    /// `Tr_{L/Q_p}` as the sum of the `d` Frobenius conjugates.
    pub fn trace(&self) -> Result<Scalar> {
        let mut acc = Unr::zero(&self.ring);
        let mut x = self.clone();
        for _ in 0..self.ring.d {
            acc = acc.add(&x);
            x = x.frob();
        }
        acc.to_scalar()
    }

    pub fn norm(&self) -> Result<Scalar> {
        let mut acc = Unr::one(&self.ring);
        let mut x = self.clone();
        for _ in 0..self.ring.d {
            acc = acc.mul(&x);
            x = x.frob();
        }
        acc.to_scalar()
    }

    /// The value as a scalar, if it lies in `Q_p`.
    pub fn to_scalar(&self) -> Result<Scalar> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Ok(self.c[0])
        } else {
            Err(Error::Domain("element does not lie in Q_p"))
        }
    }
}

impl Coeff for Unr {
    fn zero_like(&self) -> Self {
        Unr::zero(&self.ring)
    }
    fn one_like(&self) -> Self {
        Unr::one(&self.ring)
    }
    fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| *a + *b).collect();
        Unr { ring: self.ring.clone(), c }
    }
    fn sub(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| *a - *b).collect();
        Unr { ring: self.ring.clone(), c }
    }
    fn mul(&self, o: &Self) -> Self {
        let d = self.ring.d;
        if d == 1 {
            return Unr { ring: self.ring.clone(), c: alloc::vec![self.c[0] * o.c[0]] };
        }
        let p = self.ring.p;
        let mut lo = alloc::vec![Scalar::zero_exact(p); d];
        let mut hi = alloc::vec![Scalar::zero_exact(p); d];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                let t = *a * *b;
                if i + j < d {
                    lo[i + j] = lo[i + j] + t;
                } else {
                    hi[i + j - d] = hi[i + j - d] + t;
                }
            }
        }
        let u0 = self.ring.u0;
        let c = lo.into_iter().zip(hi).map(|(l, h)| l + h * u0).collect();
        Unr { ring: self.ring.clone(), c }
    }
    fn neg(&self) -> Self {
        Unr { ring: self.ring.clone(), c: self.c.iter().map(|x| -*x).collect() }
    }
    fn scale(&self, s: &Scalar) -> Self {
        Unr { ring: self.ring.clone(), c: self.c.iter().map(|x| *x * *s).collect() }
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
    fn inv(&self) -> Option<Self> {
        let mut y = Unr::one(&self.ring);
        let mut x = self.frob();
        for _ in 1..self.ring.d {
            y = y.mul(&x);
            x = x.frob();
        }
        let n = self.mul(&y).c[0];
        let ni = n.inv().ok()?;
        Some(y.scale(&ni))
    }
    fn cap(&self, abs: i32) -> Self {
        Unr { ring: self.ring.clone(), c: self.c.iter().map(|x| x.with_prec(abs)).collect() }
    }
    fn is_exact_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_exact_zero())
    }
    /// `log(x^{q-1}) / (q-1)` with `q = p^d`.
    fn log_unit(&self) -> Option<Self> {
        if self.vmin() != 0 {
            return None;
        }
        let p = self.ring.p;
        let q1 = (p as u64).pow(self.ring.d as u32) - 1;
        let z = self.pow(q1).sub(&self.one_like());
        if z.vmin() < 1 {
            return None;
        }
        let prec = self.c.iter().map(|x| x.prec()).min().unwrap().max(1);
        let terms = crate::coeff::log_terms(p, 1, prec);
        let l = crate::coeff::log1p_terms(&z, terms);
        let qi = Scalar::from_i64(p, q1 as i64).inv().ok()?;
        Some(l.scale(&qi).cap(prec))
    }
}

impl Twist for Unr {
    fn frob(&self) -> Self {
        let c = self.c.iter().zip(&self.ring.eps).map(|(a, e)| *a * *e).collect();
        Unr { ring: self.ring.clone(), c }
    }
    fn frob_inv(&self) -> Self {
        let c = self.c.iter().zip(&self.ring.eps_inv).map(|(a, e)| *a * *e).collect();
        Unr { ring: self.ring.clone(), c }
    }
    fn sigma(&self, _w: &Scalar) -> Self {
        self.clone()
    }
}

impl fmt::Debug for Unr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.c.iter()).finish()
    }
}

/// Embedding `L -> L''` of Kummer models with `[L'':L] = d''/d`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub small: UnrRing,
    pub big: UnrRing,
    images: Vec<Unr>,
    /// `alpha^s` lands on `beta^{slot[s]}` times `scale[s]`
    slot: Vec<usize>,
    scale: Vec<Scalar>,
}

impl Embedding {
    pub fn new(small: &UnrRing, big: &UnrRing) -> Result<Self> {
        let (d, dd, p) = (small.d, big.d, small.p);
        if dd % d != 0 || small.p != big.p {
            return Err(Error::Hypothesis("degree of L must divide degree of L''"));
        }
        let step = dd / d;
        // gamma = beta^step satisfies gamma^d = u0'' ; find j with u0 / u0''^j a d-th power
        let j = (0..d as u64)
            .find(|&j| {
                let x = small.u0 / big.u0.pow(j);
                let mut y = 1u64;
                for _ in 0..(p as u64 - 1) / d as u64 {
                    y = y * x.residue(1) % p as u64;
                }
                y == 1
            })
            .ok_or(Error::Hypothesis("no Kummer embedding"))?;
        let c = if d == 1 {
            Scalar::one(p)
        } else {
            (small.u0 / big.u0.pow(j)).dth_root(d as u32)?
        };
        let alpha = Unr::alpha_pow(big, (step as u64 * j) as i64).scale(&c);
        let mut images = Vec::with_capacity(d);
        let mut slot = Vec::with_capacity(d);
        let mut scale = Vec::with_capacity(d);
        let mut x = Unr::one(big);
        for _ in 0..d {
            let k = (0..dd).find(|&k| !x.c[k].is_zero()).unwrap();
            slot.push(k);
            scale.push(x.c[k]);
            images.push(x.clone());
            x = x.mul(&alpha);
        }
        if !x.sub(&Unr::from_scalar(big, small.u0)).is_zero() {
            return Err(Error::Identity { name: "embedded alpha^d = u0", index: 0 });
        }
        Ok(Embedding { small: small.clone(), big: big.clone(), images, slot, scale })
    }

    pub fn identity(r: &UnrRing) -> Self {
        Self::new(r, r).expect("identity embedding")
    }

    pub fn is_identity(&self) -> bool {
        Arc::ptr_eq(&self.small, &self.big)
    }

    pub fn embed(&self, x: &Unr) -> Unr {
        if self.is_identity() {
            return x.clone();
        }
        let mut c = alloc::vec![Scalar::zero_exact(self.big.p); self.big.d];
        for s in 0..self.small.d {
            c[self.slot[s]] = c[self.slot[s]] + x.c[s] * self.scale[s];
        }
        Unr { ring: self.big.clone(), c }
    }

    /// Inverse of [`embed`](Self::embed) on its image.
    pub fn restrict(&self, y: &Unr) -> Result<Unr> {
        if self.is_identity() {
            return Ok(y.clone());
        }
        let mut c = alloc::vec![Scalar::zero_exact(self.small.p); self.small.d];
        let mut used = alloc::vec![false; self.big.d];
        for s in 0..self.small.d {
            c[s] = y.c[self.slot[s]] / self.scale[s];
            used[self.slot[s]] = true;
        }
        for (k, u) in used.iter().enumerate() {
            if !u && !y.c[k].is_zero() {
                return Err(Error::Domain("element does not lie in the subfield"));
            }
        }
        Ok(Unr { ring: self.small.clone(), c })
    }

    pub fn image_of_alpha_pow(&self, s: usize) -> &Unr {
        &self.images[s]
    }
}
