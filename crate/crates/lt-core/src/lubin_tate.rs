//! The height-one Lubin-Tate group of `f(X) = pi X + X^p`.

use alloc::vec::Vec;

use crate::bivar::Bivar;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::padic::{PrimeConfig, Scalar};
use crate::period::Period;
use crate::series::Series;

pub type PSeries = Series<Period<Scalar>>;

#[derive(Clone, Debug)]
pub struct LtGroup {
    pub cfg: PrimeConfig,
    pub pi: Scalar,
    pub f: Series<Scalar>,
    pub law: Bivar,
    pub lambda: Series<Scalar>,
    pub lambda_inv: Series<Scalar>,
    /// `1 / lambda'`
    pub lp_inv: Series<Scalar>,
    /// iterations used by the limit defining `lambda`
    pub lambda_iters: usize,
}

fn coeff_powers(f: &Series<Scalar>, n: usize) -> Vec<Series<Scalar>> {
    f.powers(n, f.len())
}

impl LtGroup {
    pub fn build(cfg: PrimeConfig, pi: Scalar) -> Result<Self> {
        let p = cfg.p;
        if pi.is_zero() || pi.val() != 1 {
            return Err(Error::Hypothesis("pi must have valuation one"));
        }
        let len = cfg.deg + 1;
        let mut f = Series::zero(&Scalar::zero_exact(p), len);
        f.c[1] = pi;
        f.c[p as usize] = Scalar::one(p);
        let law = build_law(&f, pi, cfg.deg);
        let (lambda, lambda_iters) = lambda_limit(&f, pi, crate::padic::cap(p) as i32 - 4)?;
        let lambda_inv = lambda.revert()?;
        let lp_inv = lambda.deriv().inv()?;
        Ok(LtGroup { cfg, pi, f, law, lambda, lambda_inv, lp_inv, lambda_iters })
    }

    pub fn p(&self) -> u32 {
        self.cfg.p
    }

    pub fn len(&self) -> usize {
        self.cfg.deg + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `pi / p`
    pub fn w(&self) -> Scalar {
        self.pi / Scalar::from_i64(self.p(), self.p() as i64)
    }

    /// `[a]_f`: the unique series `a X + ...` commuting with `f`.
    pub fn mult(&self, a: Scalar) -> Series<Scalar> {
        let len = self.len();
        let p = self.p();
        let fp = coeff_powers(&self.f, self.cfg.deg);
        let mut g = Series::zero(&Scalar::zero_exact(p), len);
        g.c[1] = a;
        for n in 2..len {
            // pi g_n + [g^p]_n = g_n pi^n + [sum_{m<n} g_m f^m]_n
            let gp = g.pow(p as u64);
            let mut rhs = Scalar::zero_exact(p);
            for (m, fm) in fp.iter().enumerate().take(n).skip(1) {
                if !g.c[m].is_exact_zero() {
                    rhs = rhs + g.c[m] * fm.c[n];
                }
            }
            rhs = rhs - gp.c[n];
            g.c[n] = rhs / (self.pi - self.pi.pow(n as u64));
        }
        g
    }

    /// `lambda` by solving `lambda(f) = pi lambda` degree by degree.
    pub fn lambda_exact(&self) -> Series<Scalar> {
        let len = self.len();
        let p = self.p();
        let fp = coeff_powers(&self.f, self.cfg.deg);
        let mut l = Series::zero(&Scalar::zero_exact(p), len);
        l.c[1] = Scalar::one(p);
        for m in 2..len {
            let mut s = Scalar::zero_exact(p);
            for (mm, fm) in fp.iter().enumerate().take(m).skip(1) {
                if !l.c[mm].is_exact_zero() && !fm.c[m].is_exact_zero() {
                    s = s + l.c[mm] * fm.c[m];
                }
            }
            l.c[m] = s / (self.pi - self.pi.pow(m as u64));
        }
        l
    }

    /// `theta = lambda^{-1}(Omega log(1 + T))`, truncated to `len`.
    pub fn theta(&self, len: usize) -> PSeries {
        let p = self.p();
        let w = self.w();
        let ell = Series::log1p_x(p, len);
        let pw = ell.powers(len - 1, len);
        let zero = Period::constant(Scalar::zero_exact(p), w);
        let mut th = Series::zero(&zero, len);
        for m in 1..len {
            let mut c = alloc::vec![Scalar::zero_exact(p); m];
            for n in 1..=m {
                c[n - 1] = self.lambda_inv.c[n] * pw[n].c[m];
            }
            th.c[m] = Period { lo: 1, c, w };
        }
        th
    }

    /// `lambda` with Period coefficients.
    pub fn lambda_period(&self, len: usize) -> PSeries {
        let w = self.w();
        self.lambda.truncate(len).map(|x| Period::constant(*x, w))
    }

    /// `F(theta(X), theta(Y)) - theta((1+X)(1+Y) - 1)` on the box `[0, b]^2`;
    /// returns the minimal certified valuation and the first failing index.
    pub fn theta_hom_defect(&self, b: usize) -> (i32, Option<(usize, usize)>) {
        let len = b + 1;
        let full = self.theta(2 * b + 1);
        let lhs = Bivar::from_mult_substitution(&full, b);
        let th = full.truncate(len);
        let pw = th.powers(b, len);
        // S[i][bb] = sum_j F_ij [theta^j]_bb
        let zero = th.c[0].zero_like();
        let mut s = alloc::vec![alloc::vec![zero.clone(); len]; len];
        for (i, row) in s.iter_mut().enumerate() {
            for (bb, slot) in row.iter_mut().enumerate() {
                let mut acc = zero.clone();
                for (j, pj) in pw.iter().enumerate() {
                    let fij = self.law.get(i, j);
                    if !fij.is_exact_zero() && !pj.c[bb].is_exact_zero() {
                        acc = acc.add(&pj.c[bb].scale(&fij));
                    }
                }
                *slot = acc;
            }
        }
        let mut worst = i32::MAX;
        let mut first = None;
        for a in 0..len {
            for bb in 0..len {
                let mut acc = zero.clone();
                for i in 0..len {
                    if !pw[i].c[a].is_exact_zero() {
                        acc = acc.add(&pw[i].c[a].mul(&s[i][bb]));
                    }
                }
                let v = acc.sub(&lhs[a][bb]).vmin();
                if v < worst {
                    worst = v;
                }
                if first.is_none() && v < self.cfg.m as i32 {
                    first = Some((a, bb));
                }
            }
        }
        (worst, first)
    }

    /// `[pi] o theta^{F^{-1}} - theta o ((1+Z)^p - 1)`.
    pub fn theta_frobenius_defect(&self, len: usize) -> PSeries {
        let p = self.p();
        let th = self.theta(len);
        let thf = th.frob_inv();
        let lhs = self.f.truncate(len).map(|x| Period::constant(*x, self.w())).compose(&thf);
        let mut gm = Series::zero(&Scalar::zero_exact(p), len);
        let bin = crate::bivar::binomials(p as usize);
        for j in 1..=(p as usize).min(len - 1) {
            gm.c[j] = Scalar::from_i128(p, bin[p as usize][j]);
        }
        let gmp = gm.map(|x| Period::constant(*x, self.w()));
        let rhs = th.compose(&gmp);
        lhs.sub(&rhs)
    }

    /// `F(u, v)` for univariate series.
    pub fn add_series<R: Coeff>(&self, u: &Series<R>, v: &Series<R>) -> Series<R> {
        self.law.subst(u, v)
    }
}

/// The group law by the successive approximation lemma:
/// `(pi - pi^n) F_n = [sum_{i+j<n} F_ij f(X)^i f(Y)^j]_n - [F^p]_n`.
fn build_law(f: &Series<Scalar>, pi: Scalar, deg: usize) -> Bivar {
    let p = pi.prime();
    let fp = coeff_powers(f, deg);
    let mut law = Bivar::sum_xy(p, deg);
    let mut fpow = law.pow_upto(p, deg.min(p as usize));
    let mut valid = p as usize; // F^p is correct through this degree
    for n in 2..=deg {
        if n > valid {
            fpow = law.pow_upto(p, (n + p as usize - 2).min(deg));
            valid = n + p as usize - 2;
        }
        let den = (pi - pi.pow(n as u64)).inv().unwrap();
        for a in 0..=n {
            let b = n - a;
            let mut acc = Scalar::zero_exact(p);
            for i in 0..=a {
                let fa = fp[i].c[a];
                if fa.is_exact_zero() {
                    continue;
                }
                for j in 0..=b.min(n - 1 - i.min(n - 1)) {
                    if i + j >= n {
                        break;
                    }
                    let fij = law.get(i, j);
                    if fij.is_exact_zero() {
                        continue;
                    }
                    let fb = fp[j].c[b];
                    if !fb.is_exact_zero() {
                        acc = acc + fij * fa * fb;
                    }
                }
            }
            acc = acc - fpow.get(a, b);
            law.set(a, b, acc * den);
        }
    }
    law
}

/// `lambda = lim f^{(n)} / pi^n` via `l_n = l_{n-1} + pi^{(n-1)p - n} l_{n-1}^p`.
fn lambda_limit(f: &Series<Scalar>, pi: Scalar, target: i32) -> Result<(Series<Scalar>, usize)> {
    let p = pi.prime();
    let mut l = f.scale(&pi.inv()?);
    for n in 2..(8 * target as usize + 16) {
        let e = (n as i64 - 1) * p as i64 - n as i64;
        let inc = l.pow(p as u64).scale(&pi.powi(e));
        l = l.add(&inc);
        if inc.vmin() >= target {
            return Ok((l.cap(target), n));
        }
    }
    Err(Error::Convergence("lambda limit did not stabilise"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(p: u32, pi: i64, deg: usize) -> LtGroup {
        LtGroup::build(PrimeConfig::new(p, 10, deg).unwrap(), Scalar::from_i64(p, pi)).unwrap()
    }

    fn vanishes<R: Coeff>(s: &Series<R>, t: i32) -> bool {
        s.vmin() >= t
    }

    #[test]
    fn lambda_basics() {
        let g = group(5, 30, 24);
        // exactly 1/(pi - pi^p), which is 1/pi only modulo p^{p-2}
        let c5 = Scalar::one(5) / (g.pi - g.pi.pow(5));
        assert!(g.lambda.c[5].eq_to(&c5));
        assert!((g.lambda.c[5] - g.pi.inv().unwrap()).val() >= 3);
        let lhs = g.lambda.compose(&g.f);
        let rhs = g.lambda.scale(&g.pi);
        assert!(vanishes(&lhs.sub(&rhs), 10));
        assert!(vanishes(&g.lambda.sub(&g.lambda_exact()), 10));
    }

    #[test]
    fn group_law_axioms() {
        let g = group(5, 35, 20);
        for i in 0..=20 {
            for j in 0..=20 - i {
                assert!(g.law.get(i, j).eq_to(&g.law.get(j, i)));
            }
            if i != 1 {
                assert!(g.law.get(i, 0).is_zero());
            }
        }
        // lambda(F(u, v)) = lambda(u) + lambda(v)
        let u = Series::from_i64(5, &[0, 1, 3, 0, 2], 21);
        let v = Series::from_i64(5, &[0, 2, 0, 7], 21);
        let lhs = g.lambda.compose(&g.add_series(&u, &v));
        let rhs = g.lambda.compose(&u).add(&g.lambda.compose(&v));
        assert!(vanishes(&lhs.sub(&rhs), 9));
    }

    #[test]
    fn multiplication_series() {
        let g = group(5, 30, 20);
        let one = g.mult(Scalar::one(5));
        assert!(vanishes(&one.sub(&Series::x(&Scalar::zero_exact(5), 21)), 10));
        let w = Scalar::from_i64(5, 2).teichmuller().unwrap();
        let m = g.mult(w);
        assert!(vanishes(&m.sub(&Series::x(&Scalar::zero_exact(5), 21).scale(&w)), 10));
        let a = Scalar::from_i64(5, 3);
        let b = Scalar::from_i64(5, 7);
        let lhs = g.mult(a).compose(&g.mult(b));
        assert!(vanishes(&lhs.sub(&g.mult(a * b)), 9));
        let pim = g.mult(g.pi);
        assert!(vanishes(&pim.sub(&g.f), 9));
    }

    #[test]
    fn theta_is_a_homomorphism() {
        let g = group(5, 30, 16);
        let th = g.theta(9);
        assert!(th.c[0].is_zero());
        assert_eq!(th.c[1].support(), alloc::vec![1]);
        let (v, first) = g.theta_hom_defect(8);
        assert!(first.is_none(), "{v}");
    }

    #[test]
    fn theta_frobenius() {
        let g = group(5, 35, 16);
        assert!(g.theta_frobenius_defect(13).vmin() >= 9);
    }
}
