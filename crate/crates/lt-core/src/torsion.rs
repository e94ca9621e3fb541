//! Level-one torsion: `pi_1`, the translation `X [+] pi_1`, and a primitive
//! `p`-th root of unity `zeta_1` in the tower over the enlarged field `L''`.

use alloc::vec::Vec;

use crate::coeff::{Coeff, Twist};
use crate::error::{Error, Result};
use crate::lubin_tate::LtGroup;
use crate::padic::{powmod, Scalar};
use crate::series::Series;
use crate::tower::{build_tower, Tower, TowerRing};
use crate::unramified::{build_l, Embedding, Unr, UnrRing};

#[derive(Clone, Debug)]
pub struct Torsion {
    pub l: UnrRing,
    pub l2: UnrRing,
    pub emb: Embedding,
    /// `R1` over `L`
    pub r1: TowerRing,
    /// `R1''` over `L''`
    pub r2: TowerRing,
    /// `omega(a)` for `a = 1, ..., p-1`
    pub omegas: Vec<Scalar>,
    pub zeta: Tower,
    /// `sigma_a(zeta_1) = zeta_1^{m(a)}`
    pub m: Vec<u32>,
    /// `X [+] pi_1` over `R1`
    pub tau: Series<Tower>,
}

/// Multiplicative order of `x` modulo `p`.
fn ord_mod(p: u32, x: u64) -> u32 {
    (1..p).find(|&k| powmod(x, k as u64, p as u64) == 1).unwrap()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Degree of the unramified field carrying `zeta_1`: `lcm(d, ord(pi/p mod p))`.
pub fn d_double(p: u32, d: usize, pi: Scalar) -> usize {
    let u = (pi / Scalar::from_i64(p, p as i64)).residue(1);
    let o = ord_mod(p, u);
    let d = d as u32;
    (d / gcd(d, o) * o) as usize
}

impl Torsion {
    pub fn build(g: &LtGroup, d: usize) -> Result<Self> {
        let p = g.p();
        let l = build_l(p, d)?;
        let dd = d_double(p, d, g.pi);
        let l2 = if dd == d { l.clone() } else { build_l(p, dd)? };
        let emb = Embedding::new(&l, &l2)?;
        let r1 = build_tower(&l, g.pi)?;
        let r2 = if dd == d { r1.clone() } else { build_tower(&l2, g.pi)? };
        let omegas: Vec<Scalar> =
            (1..p as i64).map(|a| Scalar::from_i64(p, a).teichmuller()).collect::<Result<_>>()?;
        let zeta = zeta_one(g, &r2)?;
        let mut m = Vec::with_capacity(p as usize - 1);
        for w in &omegas {
            let s = zeta.sigma(w);
            let e = (1..p)
                .find(|&e| s.sub(&zeta.pow(e as u64)).is_zero())
                .ok_or(Error::Identity { name: "sigma_a(zeta_1) is a power of zeta_1", index: m.len() + 1 })?;
            m.push(e);
        }
        let r0 = build_tower(&build_l(p, 1)?, g.pi)?;
        let tau = translation(g, &r0).map(|x| {
            let mut y = Tower::zero(&r1);
            for t in 0..r1.e {
                y.c[t * r1.d] = x.c[t];
            }
            y
        });
        Ok(Torsion { l, l2, emb, r1, r2, omegas, zeta, m, tau })
    }

    pub fn p(&self) -> u32 {
        self.r1.p
    }

    pub fn pi1(&self) -> Tower {
        Tower::t_pow(&self.r1, 1)
    }

    /// `R1 -> R1''`
    pub fn lift(&self, x: &Tower) -> Tower {
        if self.emb.is_identity() {
            return x.clone();
        }
        let blocks: Vec<Unr> = (0..self.r1.e).map(|t| self.emb.embed(&x.block(t))).collect();
        Tower::from_blocks(&self.r2, &blocks)
    }

    /// `R1'' -> R1` on the image of [`lift`](Self::lift).
    pub fn restrict(&self, y: &Tower) -> Result<Tower> {
        if self.emb.is_identity() {
            return Ok(y.clone());
        }
        let blocks: Vec<Unr> = (0..self.r2.e).map(|t| self.emb.restrict(&y.block(t))).collect::<Result<_>>()?;
        Ok(Tower::from_blocks(&self.r1, &blocks))
    }

    pub fn zeta_pow(&self, i: i64) -> Tower {
        self.zeta.pow(i.rem_euclid(self.p() as i64) as u64)
    }

    /// `G(t) = (1/(p-1)) sum_a omega(a)^{-t} sigma_a(zeta_1)` for `t != 0`, and `G(0) = 1`.
    pub fn gauss_sum(&self, t: i64) -> Tower {
        let p = self.p();
        let t = t.rem_euclid(p as i64 - 1);
        if t == 0 {
            return Tower::one(&self.r2);
        }
        let mut acc = Tower::zero(&self.r2);
        for w in &self.omegas {
            acc = acc.add(&self.zeta.sigma(w).scale(&w.powi(-t)));
        }
        acc.scale(&Scalar::from_i64(p, p as i64 - 1).inv().unwrap())
    }

    /// Whether `m` is a character of order `p - 1` and `m(a) = a mod p`.
    pub fn m_is_teichmuller(&self) -> bool {
        self.m.iter().enumerate().all(|(i, &m)| m as usize == i + 1)
    }
}

/// `gamma in L''` with `gamma^{p-1} = p/pi`.
fn gamma(pi: Scalar, l2: &UnrRing) -> Result<Unr> {
    let p = l2.p;
    let c = Scalar::from_i64(p, p as i64) / pi;
    let dd = l2.d as u64;
    let e = (p as u64 - 1) / dd;
    for j in 0..dd {
        // gamma = beta^j s, s^{p-1} = c u0''^{-j e}
        let t = c * l2.u0.powi(-((j * e) as i64));
        if t.residue(1) == 1 {
            let s = t.kth_root_one_unit(p as i64 - 1)?;
            return Ok(Unr::alpha_pow(l2, j as i64).scale(&s));
        }
    }
    Err(Error::Hypothesis("p/pi has no (p-1)-th root in L''"))
}

/// `zeta_1 = 1 + x` with `x = x0 (1 + y)`, `x0 = pi_1 gamma`, `x0^{p-1} = -p`.
fn zeta_one(g: &LtGroup, r2: &TowerRing) -> Result<Tower> {
    let p = g.p();
    let gm = gamma(g.pi, &r2.base)?;
    let x0 = Tower::t_pow(r2, 1).mul(&Tower::from_unr(r2, &gm));
    let bin = crate::bivar::binomials(p as usize);
    let pinv = Scalar::from_i64(p, p as i64).inv().unwrap();
    // z(x) = sum_{j=2}^{p-1} (C(p,j)/p) x^{j-1};  (1+y)^{p-1} = 1 + z(x0 (1+y))
    let zc: Vec<Scalar> = (0..p as usize).map(|j| Scalar::from_i128(p, bin[p as usize][j]) * pinv).collect();
    let one = Tower::one(r2);
    let eval_z = |x: &Tower| -> (Tower, Tower) {
        let mut z = Tower::zero(r2);
        let mut dz = Tower::zero(r2);
        let mut xp = one.clone();
        for j in 2..p as usize {
            // xp = x^{j-2}
            dz = dz.add(&xp.scale(&(zc[j] * Scalar::from_i64(p, j as i64 - 1))));
            xp = xp.mul(x);
            z = z.add(&xp.scale(&zc[j]));
        }
        (z, dz)
    };
    let mut y = Tower::zero(r2);
    let pm1 = Scalar::from_i64(p, p as i64 - 1);
    for _ in 0..64 {
        let u = one.add(&y);
        let x = x0.mul(&u);
        let (z, dz) = eval_z(&x);
        let gval = u.pow(p as u64 - 1).sub(&one).sub(&z);
        if gval.is_zero() {
            let zeta = one.add(&x);
            let zp = zeta.pow(p as u64).sub(&one);
            if !zp.is_zero() || x.is_zero() {
                return Err(Error::Identity { name: "zeta_1 is a primitive p-th root of unity", index: 0 });
            }
            return Ok(zeta);
        }
        let gd = u.pow(p as u64 - 2).scale(&pm1).sub(&x0.mul(&dz));
        let step = gval.mul(&gd.inv().ok_or(Error::Singular("newton derivative"))?);
        y = y.sub(&step);
    }
    Err(Error::Convergence("zeta_1 newton iteration"))
}

/// `tau(X) = X [+] pi_1`: the root of `Z^p + pi Z = f(X)` with `Z(0) = pi_1`.
fn translation(g: &LtGroup, r: &TowerRing) -> Series<Tower> {
    let p = g.p();
    let len = g.len();
    let pi1 = Tower::t_pow(r, 1);
    let zero = Tower::zero(r);
    let bin = crate::bivar::binomials(p as usize);
    // pi_1^{p-j} C(p, j) for 1 <= j <= p
    let cj: Vec<Tower> = (0..=p as usize)
        .map(|j| pi1.pow((p as usize - j.min(p as usize)) as u64).scale(&Scalar::from_i128(p, bin[p as usize][j])))
        .collect();
    let den = (g.pi * Scalar::from_i64(p, 1 - p as i64)).inv().unwrap();
    let mut w = Series::zero(&zero, len);
    for n in 1..len {
        // rest_n = [sum_{j>=2} C(p,j) pi_1^{p-j} W^j]_n with w_n = 0
        let wn = w.truncate(n + 1);
        let mut rest = zero.clone();
        let mut wp = wn.clone();
        for cjj in cj.iter().take(p as usize + 1).skip(2) {
            wp = wp.mul(&wn);
            rest = rest.add(&wp.c[n].mul(cjj));
        }
        let fnn = Tower::from_scalar(r, g.f.c[n]);
        w.c[n] = fnn.sub(&rest).scale(&den);
    }
    w.c[0] = pi1;
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeConfig;

    fn setup(p: u32, d: usize, pi: i64, deg: usize) -> (LtGroup, Torsion) {
        let g = LtGroup::build(PrimeConfig::new(p, 10, deg).unwrap(), Scalar::from_i64(p, pi)).unwrap();
        let t = Torsion::build(&g, d).unwrap();
        (g, t)
    }

    #[test]
    fn enlarged_degrees() {
        let s = |p: u32, x: i64| Scalar::from_i64(p, x);
        assert_eq!(d_double(5, 1, s(5, 30)), 1);
        assert_eq!(d_double(5, 4, s(5, 35)), 4);
        assert_eq!(d_double(7, 1, s(7, 21)), 6);
        assert_eq!(d_double(7, 6, s(7, 21)), 6);
    }

    #[test]
    fn zeta_is_primitive() {
        for (p, d, pi) in [(5, 1, 30), (5, 4, 35), (7, 1, 21), (7, 2, 28)] {
            let (_, t) = setup(p, d, pi, 4 * (p as usize - 1));
            let one = Tower::one(&t.r2);
            assert!(t.zeta.pow(p as u64).sub(&one).is_zero());
            assert!(!t.zeta.sub(&one).is_zero());
            let mut s = Tower::zero(&t.r2);
            for i in 0..p {
                s = s.add(&t.zeta.pow(i as u64));
            }
            assert!(s.is_zero());
            assert!(t.m_is_teichmuller());
        }
    }

    #[test]
    fn gauss_sum_valuations() {
        for (p, d, pi) in [(5, 4, 35), (7, 1, 21)] {
            let (_, t) = setup(p, d, pi, 4 * (p as usize - 1));
            for k in 1..p as i64 - 1 {
                let gk = t.gauss_sum(k);
                assert_eq!(gk.v_p(), k as i32);
                assert!(gk.v_p_certified());
            }
        }
    }

    #[test]
    fn translation_is_torsion_translate() {
        let (g, t) = setup(5, 1, 30, 16);
        let tau = &t.tau;
        // Z^p + pi Z = f(X)
        let lhs = tau.pow(5).add(&tau.scale(&g.pi));
        let f = g.f.map(|x| Tower::from_scalar(&t.r1, *x));
        assert!(lhs.sub(&f).vmin() >= 10);
        // compare with F(X, pi_1) through the truncated law at low degree
        let z = t.tau.c[1].clone();
        let expect = Tower::from_scalar(&t.r1, Scalar::from_i64(5, -4).inv().unwrap());
        assert!(z.sub(&expect).is_zero());
    }
}
