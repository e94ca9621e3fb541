//! Truncated power series `c_0 + c_1 X + ... + c_n X^n` over a [`Coeff`] ring.

use alloc::vec::Vec;

use crate::coeff::{Coeff, Twist};
use crate::error::{Error, Result};
use crate::padic::Scalar;

#[derive(Clone, Debug)]
pub struct Series<R> {
    pub c: Vec<R>,
}

impl<R: Coeff> Series<R> {
    pub fn new(c: Vec<R>) -> Self {
        assert!(!c.is_empty());
        Series { c }
    }

    pub fn zero(proto: &R, len: usize) -> Self {
        Series { c: alloc::vec![proto.zero_like(); len] }
    }

    pub fn constant(x: R, len: usize) -> Self {
        let mut s = Self::zero(&x, len);
        s.c[0] = x;
        s
    }

    pub fn one(proto: &R, len: usize) -> Self {
        Self::constant(proto.one_like(), len)
    }

    /// The series `X`.
    pub fn x(proto: &R, len: usize) -> Self {
        let mut s = Self::zero(proto, len);
        if len > 1 {
            s.c[1] = proto.one_like();
        }
        s
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Truncation degree.
    pub fn deg(&self) -> usize {
        self.c.len() - 1
    }

    pub fn proto(&self) -> &R {
        &self.c[0]
    }

    pub fn truncate(&self, len: usize) -> Self {
        let mut c = self.c.clone();
        c.truncate(len);
        Series { c }
    }

    pub fn resize(&self, len: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(len, self.c[0].zero_like());
        Series { c }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Series { c: (0..n).map(|i| self.c[i].add(&o.c[i])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Series { c: (0..n).map(|i| self.c[i].sub(&o.c[i])).collect() }
    }

    pub fn neg(&self) -> Self {
        Series { c: self.c.iter().map(|x| x.neg()).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Series { c: self.c.iter().map(|x| x.scale(s)).collect() }
    }

    pub fn mul_coeff(&self, r: &R) -> Self {
        Series { c: self.c.iter().map(|x| x.mul(r)).collect() }
    }

    pub fn map<S>(&self, f: impl Fn(&R) -> S) -> Series<S> {
        Series { c: self.c.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_trunc(o, self.len().min(o.len()))
    }

    pub fn mul_trunc(&self, o: &Self, len: usize) -> Self {
        let mut c: Vec<Option<R>> = alloc::vec![None; len];
        for (i, a) in self.c.iter().enumerate().take(len) {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(len - i) {
                if b.is_exact_zero() {
                    continue;
                }
                let t = a.mul(b);
                c[i + j] = Some(match c[i + j].take() {
                    Some(acc) => acc.add(&t),
                    None => t,
                });
            }
        }
        let z = self.c[0].zero_like();
        Series { c: c.into_iter().map(|x| x.unwrap_or_else(|| z.clone())).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.c[0], self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `h^0, h^1, ..., h^{n}` truncated to `len`.
    pub fn powers(&self, n: usize, len: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(n + 1);
        let mut cur = Self::one(&self.c[0], len);
        for _ in 0..=n {
            let next = cur.mul_trunc(self, len);
            out.push(cur);
            cur = next;
        }
        out
    }

    /// `self(h)` for `h(0) = 0`, truncated to the shorter length.
    pub fn compose(&self, h: &Self) -> Self {
        let len = self.len().min(h.len());
        if !h.c[0].is_zero() {
            return self.compose_nonzero(h, len);
        }
        // Horner
        let mut acc = Self::constant(self.c[len - 1].clone(), len);
        for i in (0..len - 1).rev() {
            acc = acc.mul_trunc(h, len);
            acc.c[0] = acc.c[0].add(&self.c[i]);
        }
        acc
    }

    /// Composition with a topologically nilpotent constant term, by powers.
    fn compose_nonzero(&self, h: &Self, len: usize) -> Self {
        let pw = h.powers(self.deg(), len);
        Self::compose_with_powers(self, &pw)
    }

    /// `sum_n c_n h^n` from precomputed powers.
    pub fn compose_with_powers(&self, pw: &[Self]) -> Self {
        let len = pw[0].len();
        let mut acc = Self::zero(&self.c[0], len);
        for (n, a) in self.c.iter().enumerate().take(pw.len()) {
            if a.is_exact_zero() {
                continue;
            }
            for (i, x) in pw[n].c.iter().enumerate() {
                if !x.is_exact_zero() {
                    acc.c[i] = acc.c[i].add(&a.mul(x));
                }
            }
        }
        acc
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = self.c[self.deg()].clone();
        for i in (0..self.deg()).rev() {
            acc = acc.mul(x).add(&self.c[i]);
        }
        acc
    }

    pub fn deriv(&self) -> Self {
        let p = self.c[0].prime();
        let n = self.len();
        if n == 1 {
            return Self::zero(&self.c[0], 1);
        }
        Series { c: (1..n).map(|i| self.c[i].scale(&Scalar::from_i64(p, i as i64))).collect() }
    }

    /// Antiderivative with zero constant term; gains one degree.
    pub fn integ(&self) -> Self {
        let p = self.c[0].prime();
        let mut c = Vec::with_capacity(self.len() + 1);
        c.push(self.c[0].zero_like());
        for (i, x) in self.c.iter().enumerate() {
            c.push(x.scale(&Scalar::from_i64(p, i as i64 + 1).inv().unwrap()));
        }
        Series { c }
    }

    pub fn inv(&self) -> Result<Self> {
        let c0i = self.c[0].inv().ok_or(Error::Singular("constant term is not invertible"))?;
        let n = self.len();
        let mut b: Vec<R> = Vec::with_capacity(n);
        b.push(c0i.clone());
        for m in 1..n {
            let mut s = self.c[0].zero_like();
            for i in 1..=m {
                if !self.c[i].is_exact_zero() {
                    s = s.add(&self.c[i].mul(&b[m - i]));
                }
            }
            b.push(s.mul(&c0i).neg());
        }
        Ok(Series { c: b })
    }

    /// Compositional inverse; needs `c_0 = 0` and an invertible `c_1`.
    pub fn revert(&self) -> Result<Self> {
        if !self.c[0].is_zero() {
            return Err(Error::Singular("revert needs a zero constant term"));
        }
        let n = self.len();
        if n < 2 {
            return Ok(self.clone());
        }
        let c1i = self.c[1].inv().ok_or(Error::Singular("linear coefficient is not a unit"))?;
        // r_m from [g(r)]_m = 0 with powers of the partial inverse kept incrementally
        let proto = &self.c[0];
        let mut r = Self::zero(proto, n);
        r.c[1] = c1i.clone();
        for m in 2..n {
            let pw = r.truncate(m + 1).powers(m, m + 1);
            let mut s = proto.zero_like();
            for (j, g) in self.c.iter().enumerate().take(m + 1).skip(1) {
                if !g.is_exact_zero() {
                    s = s.add(&g.mul(&pw[j].c[m]));
                }
            }
            r.c[m] = s.mul(&c1i).neg();
        }
        Ok(r)
    }

    /// `log g` for `g(0)` a unit: `log g(0) + integral of g'/g`.
    pub fn log(&self) -> Result<Self> {
        let l0 = self.c[0].log_unit().ok_or(Error::Singular("log of a non-unit series"))?;
        let q = self.deriv().mul_trunc(&self.inv()?, self.len() - 1);
        let mut out = q.integ();
        out.c[0] = l0;
        Ok(out)
    }

    /// `((1/lambda') d/dX)^k`, where `lp_inv = 1/lambda'`.
    pub fn dop(&self, lp_inv: &Self, k: usize) -> Self {
        let mut g = self.clone();
        for _ in 0..k {
            let d = g.deriv();
            g = d.mul_trunc(lp_inv, d.len());
        }
        g
    }

    /// `(1 + X) d/dX`.
    pub fn partial_m(&self) -> Self {
        let d = self.deriv();
        let n = d.len();
        let mut c = d.c.clone();
        for i in 1..n {
            c[i] = c[i].add(&d.c[i - 1]);
        }
        Series { c }
    }

    /// Certified valuation: minimum over coefficients, zeros counting their precision.
    pub fn vmin(&self) -> i32 {
        self.c.iter().map(|x| x.vmin()).min().unwrap()
    }

    /// Index of the first coefficient with valuation below `t`.
    pub fn first_below(&self, t: i32) -> Option<usize> {
        self.c.iter().position(|x| x.vmin() < t)
    }

    pub fn cap(&self, abs: i32) -> Self {
        Series { c: self.c.iter().map(|x| x.cap(abs)).collect() }
    }

    /// `g(c X)`.
    pub fn scale_var(&self, w: &R) -> Self {
        let mut wp = w.one_like();
        let mut c = Vec::with_capacity(self.len());
        for x in &self.c {
            c.push(x.mul(&wp));
            wp = wp.mul(w);
        }
        Series { c }
    }
}

impl<R: Twist> Series<R> {
    pub fn frob(&self) -> Self {
        self.map(|x| x.frob())
    }

    pub fn frob_inv(&self) -> Self {
        self.map(|x| x.frob_inv())
    }

    pub fn sigma(&self, w: &Scalar) -> Self {
        self.map(|x| x.sigma(w))
    }
}

impl Series<Scalar> {
    pub fn from_i64(p: u32, c: &[i64], len: usize) -> Self {
        let mut s = Self::zero(&Scalar::zero_exact(p), len);
        for (i, x) in c.iter().enumerate().take(len) {
            s.c[i] = Scalar::from_i64(p, *x);
        }
        s
    }

    /// `log(1 + X)`.
    pub fn log1p_x(p: u32, len: usize) -> Self {
        let mut s = Self::zero(&Scalar::zero_exact(p), len);
        for i in 1..len as i64 {
            s.c[i as usize] = Scalar::from_ratio(p, if i % 2 == 1 { 1 } else { -1 }, i as i128);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 5;

    fn s(c: &[i64]) -> Series<Scalar> {
        Series::from_i64(P, c, 12)
    }

    fn is_zero(x: &Series<Scalar>) -> bool {
        x.c.iter().all(|c| c.is_zero())
    }

    #[test]
    fn revert_x_plus_x2() {
        let g = s(&[0, 1, 1]);
        let r = g.revert().unwrap();
        let catalan = [0, 1, -1, 2, -5, 14, -42, 132];
        for (i, c) in catalan.iter().enumerate() {
            assert!(r.c[i].eq_to(&Scalar::from_i64(P, *c)), "{i}");
        }
        assert!(is_zero(&g.compose(&r).sub(&s(&[0, 1]))));
        assert!(is_zero(&r.compose(&g).sub(&s(&[0, 1]))));
    }

    #[test]
    fn compose_with_zero() {
        let g = s(&[3, 1, 4, 1, 5]);
        let z = s(&[]);
        assert!(is_zero(&g.compose(&z).sub(&s(&[3]))));
    }

    #[test]
    fn log_of_one_plus_x() {
        let l = s(&[1, 1]).log().unwrap();
        assert!(is_zero(&l.sub(&Series::log1p_x(P, 12))));
        assert!(is_zero(&s(&[1]).log().unwrap()));
    }

    #[test]
    fn inverse_series() {
        let g = s(&[2, 3, 0, 7]);
        let h = g.inv().unwrap();
        assert!(is_zero(&g.mul(&h).sub(&s(&[1]))));
    }

    #[test]
    fn partial_m_of_power() {
        // (1+X) d/dX (1+X)^3 = 3 (1+X)^3
        let g = s(&[1, 3, 3, 1]);
        assert!(is_zero(&g.partial_m().sub(&g.scale(&Scalar::from_i64(P, 3)).truncate(11))));
    }
}
