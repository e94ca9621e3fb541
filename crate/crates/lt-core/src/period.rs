//! Laurent polynomials in the formal period `Omega` with `F(Omega) = (pi/p) Omega`.

use alloc::vec::Vec;
use core::fmt;

use crate::coeff::{Coeff, Twist};
use crate::padic::Scalar;

#[derive(Clone)]
pub struct Period<R> {
    /// Omega-degree of `c[0]`
    pub lo: i32,
    pub c: Vec<R>,
    /// `pi / p`
    pub w: Scalar,
}

impl<R: Coeff> Period<R> {
    pub fn monomial(x: R, n: i32, w: Scalar) -> Self {
        Period { lo: n, c: alloc::vec![x], w }
    }

    pub fn constant(x: R, w: Scalar) -> Self {
        Self::monomial(x, 0, w)
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.c.len() as i32 - 1
    }

    /// Coefficient of `Omega^n`.
    pub fn get(&self, n: i32) -> R {
        if n < self.lo || n > self.hi() {
            self.c[0].zero_like()
        } else {
            self.c[(n - self.lo) as usize].clone()
        }
    }

    /// Degrees carrying a coefficient that is not an exact zero.
    pub fn support(&self) -> Vec<i32> {
        (self.lo..=self.hi()).filter(|&n| !self.get(n).is_zero()).collect()
    }

    /// The coefficient of `Omega^n`, asserting that every other coefficient vanishes.
    pub fn pure(&self, n: i32) -> Option<R> {
        for m in self.lo..=self.hi() {
            if m != n && !self.get(m).is_zero() {
                return None;
            }
        }
        Some(self.get(n))
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> Period<S> {
        Period { lo: self.lo, c: self.c.iter().map(f).collect(), w: self.w }
    }

    /// Multiplication by `Omega^n`.
    pub fn shift(&self, n: i32) -> Self {
        Period { lo: self.lo + n, c: self.c.clone(), w: self.w }
    }

    fn trimmed(mut self) -> Self {
        while self.c.len() > 1 && self.c.last().unwrap().is_exact_zero() {
            self.c.pop();
        }
        while self.c.len() > 1 && self.c[0].is_exact_zero() {
            self.c.remove(0);
            self.lo += 1;
        }
        self
    }

    fn zip(&self, o: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        let lo = self.lo.min(o.lo);
        let hi = self.hi().max(o.hi());
        let c = (lo..=hi).map(|n| f(&self.get(n), &o.get(n))).collect();
        Period { lo, c, w: self.w }.trimmed()
    }
}

impl<R: Coeff> Coeff for Period<R> {
    fn zero_like(&self) -> Self {
        Period { lo: 0, c: alloc::vec![self.c[0].zero_like()], w: self.w }
    }
    fn one_like(&self) -> Self {
        Period { lo: 0, c: alloc::vec![self.c[0].one_like()], w: self.w }
    }
    fn add(&self, o: &Self) -> Self {
        if o.is_exact_zero() {
            return self.clone();
        }
        if self.is_exact_zero() {
            return o.clone();
        }
        self.zip(o, |a, b| a.add(b))
    }
    fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.c.len() + o.c.len() - 1;
        let mut c = alloc::vec![self.c[0].zero_like(); n];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_exact_zero() {
                    c[i + j] = c[i + j].add(&a.mul(b));
                }
            }
        }
        Period { lo: self.lo + o.lo, c, w: self.w }.trimmed()
    }
    fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }
    fn scale(&self, s: &Scalar) -> Self {
        self.map(|x| x.scale(s))
    }
    fn vmin(&self) -> i32 {
        self.c.iter().map(|x| x.vmin()).min().unwrap()
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn is_exact_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_exact_zero())
    }
    fn prime(&self) -> u32 {
        self.w.prime()
    }
    /// Only monomials are invertible.
    fn inv(&self) -> Option<Self> {
        let s = self.support();
        if s.len() != 1 {
            return None;
        }
        let x = self.get(s[0]).inv()?;
        Some(Period::monomial(x, -s[0], self.w))
    }
    fn cap(&self, abs: i32) -> Self {
        self.map(|x| x.cap(abs))
    }
}

impl<R: Twist> Twist for Period<R> {
    fn frob(&self) -> Self {
        let c = self.c.iter().enumerate().map(|(i, x)| x.frob().scale(&self.w.powi(self.lo as i64 + i as i64))).collect();
        Period { lo: self.lo, c, w: self.w }
    }
    fn frob_inv(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| x.frob_inv().scale(&self.w.powi(-(self.lo as i64 + i as i64))))
            .collect();
        Period { lo: self.lo, c, w: self.w }
    }
    fn sigma(&self, w: &Scalar) -> Self {
        self.map(|x| x.sigma(w))
    }
}

impl<R: fmt::Debug> fmt::Debug for Period<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Omega^{}{:?}", self.lo, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unramified::{build_l, Unr};

    #[test]
    fn frobenius_on_omega() {
        let l = build_l(5, 4).unwrap();
        let w = Scalar::from_ratio(5, 7, 1);
        let om = Period::monomial(Unr::one(&l), 1, w);
        let f = om.frob();
        assert!(f.get(1).sub(&Unr::from_scalar(&l, w)).is_zero());
        let x = Period { lo: -2, c: (0..5).map(|i| Unr::alpha_pow(&l, i)).collect(), w };
        assert!(x.frob().frob_inv().sub(&x).is_zero());
    }

    #[test]
    fn monomials_invert() {
        let w = Scalar::from_i64(7, 3);
        let x = Period::monomial(Scalar::from_i64(7, 2), 3, w);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).sub(&x.one_like()).is_zero());
        let z = x.add(&x.one_like());
        assert!(z.inv().is_none());
    }
}
