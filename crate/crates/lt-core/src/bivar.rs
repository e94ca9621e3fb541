//! Bivariate series over `Z_p` truncated by total degree.

use alloc::vec::Vec;

use crate::coeff::Coeff;
use crate::padic::Scalar;
use crate::series::Series;

/// `sum c[i][j] X^i Y^j` with `i + j <= deg`.
#[derive(Clone, Debug)]
pub struct Bivar {
    pub p: u32,
    pub deg: usize,
    pub c: Vec<Vec<Scalar>>,
}

impl Bivar {
    pub fn zero(p: u32, deg: usize) -> Self {
        let c = (0..=deg).map(|i| alloc::vec![Scalar::zero_exact(p); deg + 1 - i]).collect();
        Bivar { p, deg, c }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        if i + j > self.deg {
            Scalar::zero_exact(self.p)
        } else {
            self.c[i][j]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.c[i][j] = x;
    }

    /// `X + Y`
    pub fn sum_xy(p: u32, deg: usize) -> Self {
        let mut b = Self::zero(p, deg);
        b.c[1][0] = Scalar::one(p);
        b.c[0][1] = Scalar::one(p);
        b
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                r.c[i][j] = self.c[i][j] + o.c[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                r.c[i][j] = self.c[i][j] - o.c[i][j];
            }
        }
        r
    }

    /// Product truncated to total degree `upto`.
    pub fn mul_upto(&self, o: &Self, upto: usize) -> Self {
        let upto = upto.min(self.deg);
        let mut r = Self::zero(self.p, self.deg);
        for i1 in 0..=upto {
            for j1 in 0..=upto - i1 {
                let a = self.c[i1][j1];
                if a.is_exact_zero() {
                    continue;
                }
                for i2 in 0..=upto - i1 - j1 {
                    for j2 in 0..=upto - i1 - j1 - i2 {
                        let b = o.c[i2][j2];
                        if !b.is_exact_zero() {
                            let (i, j) = (i1 + i2, j1 + j2);
                            r.c[i][j] = r.c[i][j] + a * b;
                        }
                    }
                }
            }
        }
        r
    }

    pub fn pow_upto(&self, e: u32, upto: usize) -> Self {
        let mut acc = Self::zero(self.p, self.deg);
        acc.c[0][0] = Scalar::one(self.p);
        for _ in 0..e {
            acc = acc.mul_upto(self, upto);
        }
        acc
    }

    /// `F(X, Y) -> F(Y, X)`
    pub fn swap(&self) -> Self {
        let mut r = Self::zero(self.p, self.deg);
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                r.c[j][i] = self.c[i][j];
            }
        }
        r
    }

    /// `F(u(T), v(T))` for univariate series without constant term.
    pub fn subst<R: Coeff>(&self, u: &Series<R>, v: &Series<R>) -> Series<R> {
        let len = u.len().min(v.len()).min(self.deg + 1);
        let up = u.powers(self.deg, len);
        let vp = v.powers(self.deg, len);
        let mut acc = Series::zero(u.proto(), len);
        for i in 0..=self.deg {
            let mut inner = Series::zero(u.proto(), len);
            for j in 0..=self.deg - i {
                let f = self.c[i][j];
                if f.is_exact_zero() {
                    continue;
                }
                inner = inner.add(&vp[j].scale(&f));
            }
            acc = acc.add(&up[i].mul_trunc(&inner, len));
        }
        acc
    }

    /// `g(X + Y + XY)` for univariate `g`, using the multinomial expansion.
    pub fn from_mult_substitution<R: Coeff>(g: &Series<R>, box_deg: usize) -> Vec<Vec<R>> {
        let p = g.proto().prime();
        let mut out = alloc::vec![alloc::vec![g.proto().zero_like(); box_deg + 1]; box_deg + 1];
        let binom = binomials(2 * box_deg + 1);
        for (a, row) in out.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                // X^i Y^j (XY)^k with i + k = a, j + k = b, n = i + j + k
                let mut acc = g.proto().zero_like();
                for k in 0..=a.min(b) {
                    let n = a + b - k;
                    if n >= g.len() {
                        continue;
                    }
                    let c = binom[n][k] * binom[n - k][a - k];
                    if c == 0 {
                        continue;
                    }
                    acc = acc.add(&g.c[n].scale(&Scalar::from_i128(p, c)));
                }
                *slot = acc;
            }
        }
        out
    }
}

/// Pascal's triangle as exact integers.
pub fn binomials(n: usize) -> Vec<Vec<i128>> {
    let mut t = alloc::vec![alloc::vec![0i128; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + if j < i { t[i - 1][j] } else { 0 };
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal() {
        let b = binomials(10);
        assert_eq!(b[10][5], 252);
        assert_eq!(b[4][4], 1);
    }

    #[test]
    fn multiplicative_substitution_of_x() {
        // g = X gives X + Y + XY
        let g = Series::from_i64(5, &[0, 1], 6);
        let m = Bivar::from_mult_substitution(&g, 3);
        assert!(m[1][0].eq_to(&Scalar::one(5)));
        assert!(m[1][1].eq_to(&Scalar::one(5)));
        assert!(m[2][1].is_zero());
    }
}
