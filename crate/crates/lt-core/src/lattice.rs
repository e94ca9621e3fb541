//! Full-rank `Z_p`-lattices in `Q_p^n`: Smith exponents, duals, comparison.
//!
//! A lattice is the row span of a square matrix.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::padic::Scalar;

#[derive(Clone, Debug)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(p: u32, n: usize) -> Self {
        Mat { n, a: alloc::vec![Scalar::zero_exact(p); n * n] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        Self::diagonal(p, &alloc::vec![0; n])
    }

    /// `diag(p^{e_i})`
    pub fn diagonal(p: u32, e: &[i32]) -> Self {
        let mut m = Self::zeros(p, e.len());
        for (i, &x) in e.iter().enumerate() {
            m.set(i, i, Scalar::one(p).shift(x));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let n = rows.len();
        Mat { n, a: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn prime(&self) -> u32 {
        self.a[0].prime()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.a[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.a[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut r = Mat::zeros(self.prime(), n);
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = o.get(k, j);
                    if !y.is_exact_zero() {
                        r.a[i * n + j] = r.a[i * n + j] + x * y;
                    }
                }
            }
        }
        r
    }

    pub fn transpose(&self) -> Mat {
        let mut r = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                r.set(j, i, self.get(i, j));
            }
        }
        r
    }

    pub fn scale(&self, s: Scalar) -> Mat {
        Mat { n: self.n, a: self.a.iter().map(|x| *x * s).collect() }
    }

    /// Smallest certified valuation of an entry.
    pub fn vmin(&self) -> i32 {
        self.a.iter().map(|x| x.val()).min().unwrap_or(i32::MAX)
    }

    /// Gauss-Jordan with pivots of least valuation.
    pub fn inverse(&self) -> Result<Mat> {
        let n = self.n;
        let p = self.prime();
        let mut a = self.clone();
        let mut b = Mat::identity(p, n);
        for c in 0..n {
            let piv = (c..n)
                .filter(|&r| !a.get(r, c).is_zero())
                .min_by_key(|&r| a.get(r, c).val())
                .ok_or(Error::Rank)?;
            if piv != c {
                for j in 0..n {
                    a.a.swap(piv * n + j, c * n + j);
                    b.a.swap(piv * n + j, c * n + j);
                }
            }
            let inv = a.get(c, c).inv()?;
            for j in 0..n {
                a.set(c, j, a.get(c, j) * inv);
                b.set(c, j, b.get(c, j) * inv);
            }
            for r in 0..n {
                let f = a.get(r, c);
                if r == c || f.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - f * a.get(c, j));
                    b.set(r, j, b.get(r, j) - f * b.get(c, j));
                }
            }
        }
        Ok(b)
    }
}

/// Valuations of the elementary divisors, in increasing order.
pub fn smith_exponents(m: &Mat) -> Result<Vec<i32>> {
    let n = m.n;
    let mut a = m.clone();
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let mut best: Option<(usize, usize, i32)> = None;
        for i in c..n {
            for j in c..n {
                let x = a.get(i, j);
                if !x.is_zero() && best.map_or(true, |b| x.val() < b.2) {
                    best = Some((i, j, x.val()));
                }
            }
        }
        let (bi, bj, v) = best.ok_or(Error::Rank)?;
        for j in 0..n {
            a.a.swap(bi * n + j, c * n + j);
        }
        for i in 0..n {
            a.a.swap(i * n + bj, i * n + c);
        }
        let inv = a.get(c, c).inv()?;
        for i in c + 1..n {
            let f = a.get(i, c) * inv;
            if f.is_exact_zero() {
                continue;
            }
            for j in c..n {
                a.set(i, j, a.get(i, j) - f * a.get(c, j));
            }
        }
        for j in c + 1..n {
            let f = a.get(c, j) * inv;
            if f.is_exact_zero() {
                continue;
            }
            for i in c..n {
                a.set(i, j, a.get(i, j) - f * a.get(i, c));
            }
        }
        out.push(v);
    }
    out.sort_unstable();
    Ok(out)
}

/// Basis of `{y : Tr(x y) in Z_p for x in L}` where `gram` is the pairing on the standard basis.
pub fn dual_basis(b: &Mat, gram: &Mat) -> Result<Mat> {
    Ok(b.mul(gram).inverse()?.transpose())
}

/// `L1 = L2` exactly: the transition matrix is in `GL_n(Z_p)`.
pub fn same_lattice(b1: &Mat, b2: &Mat) -> Result<bool> {
    let t = b1.mul(&b2.inverse()?);
    Ok(smith_exponents(&t)?.iter().all(|&e| e == 0))
}

/// Whether `v` lies in the row span of `b`.
pub fn contains(b: &Mat, v: &[Scalar]) -> Result<bool> {
    let bi = b.inverse()?;
    let n = b.n;
    for j in 0..n {
        let mut s = Scalar::zero_exact(b.prime());
        for (k, x) in v.iter().enumerate() {
            s = s + *x * bi.get(k, j);
        }
        if s.val() < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(x: i64) -> Scalar {
        Scalar::from_i64(5, x)
    }

    #[test]
    fn smith_of_small_matrix() {
        // [[5, 10], [1, 7]] has determinant 25, gcd of entries 1
        let m = Mat::from_rows(&[alloc::vec![sc(5), sc(10)], alloc::vec![sc(1), sc(7)]]);
        assert_eq!(smith_exponents(&m).unwrap(), alloc::vec![0, 2]);
        let z = Mat::from_rows(&[alloc::vec![sc(5), sc(10)], alloc::vec![sc(1), sc(2)]]);
        assert!(smith_exponents(&z).is_err());
    }

    #[test]
    fn dual_of_diagonal() {
        let b = Mat::diagonal(5, &[1, -2, 0]);
        let g = Mat::identity(5, 3);
        let d = dual_basis(&b, &g).unwrap();
        assert!(same_lattice(&d, &Mat::diagonal(5, &[-1, 2, 0])).unwrap());
        assert!(same_lattice(&dual_basis(&d, &g).unwrap(), &b).unwrap());
    }

    #[test]
    fn membership() {
        let b = Mat::from_rows(&[alloc::vec![sc(5), sc(0)], alloc::vec![sc(1), sc(1)]]);
        assert!(contains(&b, &[sc(6), sc(1)]).unwrap());
        assert!(!contains(&b, &[sc(1), sc(0)]).unwrap());
    }
}
