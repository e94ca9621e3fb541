//! Floating p-adic scalars with certified absolute precision.
//!
//! A nonzero [`Scalar`] is `p^v * u` with `u` a unit known modulo `p^r`; its
//! absolute precision is `v + r`.  Zero carries only a precision: it means
//! "divisible by `p^prec`".  Exact integers enter with `r = cap(p)`, the
//! largest exponent whose power still fits comfortably in a machine word.

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Precision recorded for exact zeros.
pub const EXACT: i32 = 1 << 28;

/// Largest `r` with `p^r <= 2^62`.
pub const fn cap(p: u32) -> u32 {
    let mut r = 0;
    let mut m: u64 = 1;
    while m <= (1u64 << 62) / (p as u64) {
        m *= p as u64;
        r += 1;
    }
    r
}

pub const fn ipow(p: u32, r: u32) -> u64 {
    let mut m: u64 = 1;
    let mut i = 0;
    while i < r {
        m *= p as u64;
        i += 1;
    }
    m
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(p: u32, mut n: i128) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p as i128 == 0 {
        n /= p as i128;
        v += 1;
    }
    v
}

/// Smallest generator of `(Z/p)^x`.
pub fn primitive_root(p: u32) -> u32 {
    let n = p - 1;
    let mut fs = alloc::vec::Vec::new();
    let mut m = n;
    let mut q = 2;
    while q * q <= m {
        if m % q == 0 {
            fs.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        fs.push(m);
    }
    (2..p.max(3))
        .find(|&g| fs.iter().all(|&q| powmod(g as u64, (n / q) as u64, p as u64) != 1))
        .unwrap_or(1)
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Per-prime constants for arithmetic modulo `p^cap(p)`.
struct Tab {
    m: u64,
    cap: u32,
    /// `2^(k-1) <= m < 2^k`
    k: u32,
    /// `floor(2^(2k) / m)`
    mu: u64,
    pw: [u64; 41],
    /// `p^-1 mod 2^64`
    pinv: u64,
    /// `floor((2^64 - 1) / p)`
    lim: u64,
}

const MAX_P: usize = 128;

const fn make_tab(p: u32) -> Tab {
    let c = cap(p);
    let m = ipow(p, c);
    let k = 64 - m.leading_zeros();
    let mu = ((1u128 << (2 * k)) / m as u128) as u64;
    let mut pw = [0u64; 41];
    let mut i = 0;
    while i <= c as usize {
        pw[i] = ipow(p, i as u32);
        i += 1;
    }
    let mut pinv: u64 = 1;
    let mut j = 0;
    while j < 6 {
        pinv = pinv.wrapping_mul(2u64.wrapping_sub((p as u64).wrapping_mul(pinv)));
        j += 1;
    }
    Tab { m, cap: c, k, mu, pw, pinv, lim: u64::MAX / p as u64 }
}

const fn const_is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

const fn make_tabs() -> [Tab; MAX_P] {
    let mut t = [const { Tab { m: 1, cap: 0, k: 1, mu: 0, pw: [0; 41], pinv: 1, lim: 0 } }; MAX_P];
    let mut p = 3;
    while p < MAX_P {
        if const_is_prime(p as u32) {
            t[p] = make_tab(p as u32);
        }
        p += 1;
    }
    t
}

static TABS: [Tab; MAX_P] = make_tabs();

/// Largest prime supported by [`Scalar`].
pub const MAX_PRIME: u32 = MAX_P as u32 - 1;

#[inline]
fn tab(p: u32) -> &'static Tab {
    &TABS[p as usize]
}

impl Tab {
    /// `x mod m` for `x < m^2` (Barrett).
    #[inline]
    fn reduce(&self, x: u128) -> u64 {
        let q = ((x >> (self.k - 1)) * self.mu as u128) >> (self.k + 1);
        let mut r = (x - q * self.m as u128) as u64;
        while r >= self.m {
            r -= self.m;
        }
        r
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(m as i128) as u64
}

#[derive(Clone, Copy)]
pub struct Scalar {
    p: u32,
    r: u32,
    v: i32,
    /// any representative modulo `p^cap` of the unit part
    u: u64,
}

impl Scalar {
    /// Zero known modulo `p^prec`.
    pub fn zero(p: u32, prec: i32) -> Self {
        Scalar { p, r: 0, v: prec, u: 0 }
    }

    /// Exact zero.
    pub fn zero_exact(p: u32) -> Self {
        Self::zero(p, EXACT)
    }

    /// Zero known to (effectively) infinite precision.
    #[inline]
    pub fn is_exact_zero(&self) -> bool {
        self.r == 0 && self.v >= EXACT
    }

    pub fn one(p: u32) -> Self {
        Self::from_i64(p, 1)
    }

    pub fn from_i64(p: u32, x: i64) -> Self {
        Self::from_i128(p, x as i128)
    }

    pub fn from_i128(p: u32, x: i128) -> Self {
        let c = cap(p);
        if x == 0 {
            return Self::zero_exact(p);
        }
        let v = vp_int(p, x);
        let mut y = x;
        for _ in 0..v {
            y /= p as i128;
        }
        let u = y.rem_euclid(tab(p).m as i128) as u64;
        Scalar { p, r: c, v: v as i32, u }
    }

    pub fn from_ratio(p: u32, num: i128, den: i128) -> Self {
        Self::from_i128(p, num) / Self::from_i128(p, den)
    }

    /// Integer residue known modulo `p^prec` (the value is taken to have valuation >= 0).
    pub fn from_residue(p: u32, x: u64, prec: u32) -> Self {
        let t = tab(p);
        Self::normalize(p, 0, x % t.m, prec.min(t.cap) as i32)
    }

    /// `p^v0 * x` known modulo `p^abs`, with `x` reduced modulo `p^cap`.
    #[inline]
    fn normalize(p: u32, v0: i32, mut x: u64, abs: i32) -> Self {
        let rr = abs - v0;
        if rr <= 0 {
            return Self::zero(p, abs);
        }
        let tb = tab(p);
        let mut t = 0;
        loop {
            let q = x.wrapping_mul(tb.pinv);
            if q > tb.lim {
                break;
            }
            t += 1;
            if t >= rr {
                return Self::zero(p, abs);
            }
            x = q;
        }
        Scalar { p, r: (rr - t) as u32, v: v0 + t, u: x }
    }

    #[inline]
    pub fn prime(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.r == 0
    }

    /// Valuation; for zero this is the certified lower bound `prec`.
    #[inline]
    pub fn val(&self) -> i32 {
        self.v
    }

    #[inline]
    pub fn prec(&self) -> i32 {
        self.v + self.r as i32
    }

    /// Relative precision of a nonzero value.
    pub fn rel(&self) -> u32 {
        self.r
    }

    /// Unit part reduced modulo `p^rel`.
    pub fn unit_part(&self) -> u64 {
        self.u % tab(self.p).pw[self.r as usize]
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.v == 0
    }

    /// Drops precision to `abs` if that is lower than the current one.
    pub fn with_prec(&self, abs: i32) -> Self {
        if abs >= self.prec() {
            return *self;
        }
        if self.is_zero() || abs <= self.v {
            return Self::zero(self.p, abs.min(self.prec()));
        }
        Scalar { r: (abs - self.v) as u32, ..*self }
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i32) -> Self {
        if self.is_exact_zero() {
            return *self;
        }
        let mut s = *self;
        s.v += k;
        s
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Singular("inverse of zero"));
        }
        Ok(Scalar { p: self.p, r: self.r, v: -self.v, u: inv_mod(self.u, tab(self.p).m) })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn powi(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().expect("negative power of zero").pow((-e) as u64)
        }
    }

    /// Residue modulo `p^k` of a value with nonnegative valuation.
    pub fn residue(&self, k: u32) -> u64 {
        if self.is_zero() || self.v >= k as i32 {
            return 0;
        }
        assert!(self.v >= 0, "residue of a non-integral value");
        let mk = ipow(self.p, k);
        mulmod(self.unit_part() % mk, ipow(self.p, self.v as u32) % mk, mk)
    }

    /// Signed representative of the residue modulo `p^k`, in `(-p^k/2, p^k/2]`.
    pub fn centered(&self, k: u32) -> i128 {
        let mk = ipow(self.p, k) as i128;
        let r = self.residue(k) as i128;
        if r > mk / 2 {
            r - mk
        } else {
            r
        }
    }

    /// True when `self - other` vanishes to the joint precision.
    pub fn eq_to(&self, other: &Self) -> bool {
        (*self - *other).is_zero()
    }

    /// Teichmuller lift of the residue of a unit.
    pub fn teichmuller(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::Valuation("teichmuller of a non-unit"));
        }
        let p = self.p;
        let mut x = Self::from_i64(p, self.residue(1) as i64);
        for _ in 0..=cap(p) {
            let y = x.pow(p as u64);
            if y.eq_to(&x) {
                return Ok(y);
            }
            x = y;
        }
        Err(Error::Convergence("teichmuller iteration"))
    }

    /// Projection onto `1 + pZ_p`: `u = omega(u) <u>`.
    pub fn angle(&self) -> Result<Self> {
        Ok(*self * self.teichmuller()?.inv()?)
    }

    /// Iwasawa logarithm of a unit (kills the Teichmuller part).
    pub fn iw_log(&self) -> Result<Self> {
        let y = self.angle()? - Self::one(self.p);
        Ok(log1p(&y))
    }

    /// Exponential on `pZ_p`.
    pub fn iw_exp(&self) -> Result<Self> {
        if !self.is_zero() && self.v < 1 {
            return Err(Error::Convergence("exp needs positive valuation"));
        }
        let p = self.p as i32;
        let target = self.prec();
        let v = self.v.max(1);
        let mut term = Self::one(self.p);
        let mut sum = Self::one(self.p);
        let mut n: i32 = 1;
        // v(x^n/n!) >= n v - (n-1)/(p-1)
        while n * v - (n - 1) / (p - 1) < target + 1 {
            term = term * *self / Self::from_i64(self.p, n as i64);
            sum = sum + term;
            n += 1;
        }
        Ok(sum.with_prec(target))
    }

    /// `v^{1/k}` for a one-unit `v` and `p` not dividing `k`.
    pub fn kth_root_one_unit(&self, k: i64) -> Result<Self> {
        if k == 0 || k % self.p as i64 == 0 {
            return Err(Error::Hypothesis("p must not divide k"));
        }
        if !(*self - Self::one(self.p)).is_zero() && (*self - Self::one(self.p)).val() < 1 {
            return Err(Error::Valuation("not a one-unit"));
        }
        (self.iw_log()? / Self::from_i64(self.p, k)).iw_exp()
    }

    /// Some `y` with `y^d = self`, by residue search and Newton lifting.
    pub fn dth_root(&self, d: u32) -> Result<Self> {
        let p = self.p;
        if !self.is_unit() || d % p == 0 {
            return Err(Error::Hypothesis("dth_root needs a unit and p not dividing d"));
        }
        let a = self.residue(1);
        let y0 = (1..p as u64)
            .find(|y| {
                let mut t = 1u64;
                for _ in 0..d {
                    t = t * y % p as u64;
                }
                t == a
            })
            .ok_or(Error::Hypothesis("not a d-th power residue"))?;
        let mut y = Self::from_i64(p, y0 as i64);
        let dd = Self::from_i64(p, d as i64);
        for _ in 0..=2 * cap(p) {
            let f = y.pow(d as u64) - *self;
            if f.is_zero() {
                break;
            }
            y = y - f / (dd * y.pow(d as u64 - 1));
        }
        Ok(y.with_prec(self.prec()))
    }
}

/// `log(1 + y)` for `v(y) >= 1`.
pub fn log1p(y: &Scalar) -> Scalar {
    let p = y.p;
    if y.is_zero() {
        return Scalar::zero(p, y.prec());
    }
    assert!(y.v >= 1, "log1p needs v(y) >= 1");
    let target = y.prec();
    let mut sum = Scalar::zero_exact(p);
    let mut pw = *y;
    let mut n: i64 = 1;
    loop {
        let vn = vp_int(p, n as i128) as i32;
        if (n as i32) * y.v - vn >= target + 1 && n > 1 {
            // remaining terms: n v - log_p n grows
            break;
        }
        let t = pw / Scalar::from_i64(p, if n % 2 == 1 { n } else { -n });
        sum = sum + t;
        pw = pw * *y;
        n += 1;
    }
    sum.with_prec(target)
}

impl Add for Scalar {
    type Output = Scalar;
    #[inline]
    fn add(self, o: Scalar) -> Scalar {
        let p = self.p;
        debug_assert_eq!(p, o.p);
        let abs = self.prec().min(o.prec());
        if self.is_zero() {
            return o.with_prec(abs);
        }
        if o.is_zero() {
            return self.with_prec(abs);
        }
        let m0 = self.v.min(o.v);
        if abs <= m0 {
            return Scalar::zero(p, abs);
        }
        let t = tab(p);
        let lift = |s: &Scalar| {
            let e = (s.v - m0) as u32;
            if e == 0 {
                s.u
            } else if e >= t.cap {
                0
            } else {
                t.mul(s.u, t.pw[e as usize])
            }
        };
        let mut x = lift(&self) + lift(&o);
        if x >= t.m {
            x -= t.m;
        }
        Scalar::normalize(p, m0, x, abs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        if self.is_zero() {
            return self;
        }
        let mut s = self;
        s.u = tab(self.p).m - self.u;
        s
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self + (-o)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    #[inline]
    fn mul(self, o: Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            let abs = (self.v + o.prec()).min(o.v + self.prec()).min(EXACT);
            return Scalar::zero(self.p, abs);
        }
        let u = tab(self.p).mul(self.u, o.u);
        Scalar { p: self.p, r: self.r.min(o.r), v: self.v + o.v, u }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, o: Scalar) -> Scalar {
        self * o.inv().expect("division by zero")
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "O({}^{})", self.p, self.v)
        } else {
            write!(f, "{}^{}*{} + O({}^{})", self.p, self.v, self.unit_part(), self.p, self.prec())
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Run-wide precision parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeConfig {
    pub p: u32,
    /// certification target: assertions are made modulo `p^(M - B)`
    pub m: u32,
    /// series truncation degree
    pub deg: usize,
}

impl PrimeConfig {
    pub fn new(p: u32, m: u32, deg: usize) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::Hypothesis("p must be an odd prime"));
        }
        if p > MAX_PRIME {
            return Err(Error::Hypothesis("p is too large for word-sized residues"));
        }
        if m < 4 {
            return Err(Error::Hypothesis("M must be at least 4"));
        }
        if m + 4 > cap(p) {
            return Err(Error::Hypothesis("M exceeds the machine precision for this prime"));
        }
        if deg < 4 * (p as usize - 1) {
            return Err(Error::Hypothesis("D must be at least 4(p-1)"));
        }
        Ok(PrimeConfig { p, m, deg })
    }

    pub fn int(&self, x: i64) -> Scalar {
        Scalar::from_i64(self.p, x)
    }

    /// Budget for `iw_exp(iw_log(w)) = w`.
    pub fn log_exp_budget(&self) -> u32 {
        let mut b = 0;
        let mut q = 1u64;
        while q < self.m as u64 {
            q *= self.p as u64;
            b += 1;
        }
        b + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrett_matches_division() {
        for p in [3u32, 5, 7, 11, 13, 127] {
            let t = tab(p);
            let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
            for _ in 0..2000 {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let (a, b) = (x % t.m, x.rotate_left(29) % t.m);
                assert_eq!(t.mul(a, b), mulmod(a, b, t.m));
            }
            assert_eq!(t.mul(t.m - 1, t.m - 1), 1);
            assert_eq!((p as u64).wrapping_mul(t.pinv), 1);
        }
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let w = Scalar::from_i64(5, 2).teichmuller().unwrap();
        assert_eq!(w.residue(2), 7);
        assert_eq!(w.pow(4).residue(20), 1);
    }

    #[test]
    fn teichmuller_minus_one() {
        let w = Scalar::from_i64(7, 6).teichmuller().unwrap();
        assert!((w + Scalar::one(7)).is_zero());
    }

    #[test]
    fn angle_of_seven() {
        let a = Scalar::from_i64(5, 7).angle().unwrap();
        assert_eq!(a.residue(2), 1);
        assert_ne!(a.residue(3), 1);
        assert_eq!(Scalar::from_i64(5, 7).teichmuller().unwrap().residue(3), 57);
    }

    #[test]
    fn floating_precision_tracks_division() {
        let x = Scalar::from_i64(5, 25);
        let y = Scalar::from_i64(5, 3) / x;
        assert_eq!(y.val(), -2);
        let z = (Scalar::from_i64(5, 1) + Scalar::from_i64(5, 4)).shift(-1);
        assert!(z.eq_to(&Scalar::one(5)));
    }

    #[test]
    fn cancellation_keeps_absolute_precision() {
        let a = Scalar::from_i64(5, 1).with_prec(6);
        let b = Scalar::from_i64(5, 1 + 15625);
        let d = a - b;
        assert!(d.is_zero());
        assert_eq!(d.prec(), 6);
    }

    #[test]
    fn log_exp_roundtrip() {
        let w = Scalar::from_i64(5, 6);
        let l = w.iw_log().unwrap();
        assert_eq!(l.val(), 1);
        assert!(l.iw_exp().unwrap().eq_to(&w));
        assert!(Scalar::from_i64(5, 2).teichmuller().unwrap().iw_log().unwrap().is_zero());
    }

    #[test]
    fn exp_rejects_units() {
        assert!(Scalar::from_i64(5, 2).iw_exp().is_err());
    }

    #[test]
    fn kth_root_exact_power() {
        let v = Scalar::from_i64(7, 8).pow(3);
        let r = v.kth_root_one_unit(3).unwrap();
        assert!(r.eq_to(&Scalar::from_i64(7, 8)));
        assert!(Scalar::from_i64(7, 8).kth_root_one_unit(7).is_err());
    }

    #[test]
    fn dth_root_lifts() {
        let x = Scalar::from_i64(5, 11);
        let y = x.dth_root(4).unwrap();
        assert!(y.pow(4).eq_to(&x));
    }
}
