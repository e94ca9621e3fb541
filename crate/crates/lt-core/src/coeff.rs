//! The coefficient-ring interface shared by scalars, unramified and tower
//! elements, period Laurent polynomials and truncated series.

use crate::padic::Scalar;

pub trait Coeff: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Scalar) -> Self;
    /// Lower bound for the valuation, minimum over coordinates.  Coordinates
    /// that vanish to their precision contribute that precision.
    fn vmin(&self) -> i32;
    fn is_zero(&self) -> bool;
    fn prime(&self) -> u32;
    fn inv(&self) -> Option<Self> {
        None
    }
    /// True only for zeros known to infinite precision; multiplication kernels skip these.
    fn is_exact_zero(&self) -> bool {
        false
    }
    /// Iwasawa-normalized logarithm of a unit.
    fn log_unit(&self) -> Option<Self> {
        None
    }
    /// Caps every coordinate at absolute precision `abs`.
    fn cap(&self, abs: i32) -> Self;
}

/// Frobenius and the action of `sigma_a`, given by the Teichmuller value `w = omega(a)`.
pub trait Twist: Coeff {
    fn frob(&self) -> Self;
    fn frob_inv(&self) -> Self;
    fn sigma(&self, w: &Scalar) -> Self;
}

impl Coeff for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero_exact(self.prime())
    }
    fn one_like(&self) -> Self {
        Scalar::one(self.prime())
    }
    #[inline]
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    #[inline]
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    #[inline]
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn scale(&self, c: &Scalar) -> Self {
        *self * *c
    }
    fn vmin(&self) -> i32 {
        self.val()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn prime(&self) -> u32 {
        Scalar::prime(self)
    }
    fn inv(&self) -> Option<Self> {
        Scalar::inv(self).ok()
    }
    fn is_exact_zero(&self) -> bool {
        Scalar::is_exact_zero(self)
    }
    fn log_unit(&self) -> Option<Self> {
        self.iw_log().ok()
    }
    fn cap(&self, abs: i32) -> Self {
        self.with_prec(abs)
    }
}

impl Twist for Scalar {
    fn frob(&self) -> Self {
        *self
    }
    fn frob_inv(&self) -> Self {
        *self
    }
    fn sigma(&self, _w: &Scalar) -> Self {
        *self
    }
}

/// `sum_{n=1}^{terms} (-1)^{n-1} z^n / n`.
pub fn log1p_terms<R: Coeff>(z: &R, terms: usize) -> R {
    let p = z.prime();
    let mut acc = z.zero_like();
    let mut pw = z.clone();
    for n in 1..=terms as i64 {
        let s = Scalar::from_i64(p, if n % 2 == 1 { n } else { -n }).inv().unwrap();
        acc = acc.add(&pw.scale(&s));
        pw = pw.mul(z);
    }
    acc
}

/// Number of terms of `log(1 + z)` needed when `v_p(z) >= v / e` to reach precision `prec`.
pub fn log_terms(p: u32, e: u32, prec: i32) -> usize {
    let mut n: u32 = 1;
    let mut last = 1;
    // v(z^n/n) >= n/e - log_p(n)
    while n < 100_000 {
        let vn = crate::padic::vp_int(p, n as i128) as i32;
        if (n as i32) < e as i32 * (prec + 1 + vn) {
            last = n;
        } else if n > last + 4 * e * p {
            break;
        }
        n += 1;
    }
    last as usize
}
