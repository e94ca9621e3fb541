//! Eigenspaces at level one, Gauss sums, the eigen-moments `psi_t`, and the
//! image of `phi_k` with its annihilator under the trace pairing.
//!
//! Coordinates on `L_1` are those of [`Tower`]: `alpha^s e_t` with
//! `e_t = pi_1^t` sits at index `t d + s`.

use alloc::vec::Vec;

use crate::coates_wiles::{eval_at_pi1, phi_cw};
use crate::coeff::{Coeff, Twist};
use crate::coleman::{coherence_defect_below, moment, norm_window, ColemanCtx};
use crate::error::{Error, Result};
use crate::hecke::{n_k, AnomalyData};
use crate::lattice::{dual_basis, same_lattice, Mat};
use crate::padic::{vp_int, Scalar};
use crate::period::Period;
use crate::series::Series;
use crate::torsion::Torsion;
use crate::tower::{Tower, TowerRing};
use crate::unramified::Unr;

#[derive(Clone, Debug)]
pub struct EigenFrame {
    pub ring: TowerRing,
    pub p: u32,
    pub d: usize,
    pub e: usize,
}

impl EigenFrame {
    pub fn new(ring: &TowerRing) -> Self {
        EigenFrame { ring: ring.clone(), p: ring.p, d: ring.d, e: ring.e }
    }

    pub fn dim(&self) -> usize {
        self.d * self.e
    }

    pub fn index(&self, s: i64, t: i64) -> usize {
        t.rem_euclid(self.e as i64) as usize * self.d + s.rem_euclid(self.d as i64) as usize
    }

    /// `(s, t)` of a coordinate index.
    pub fn slot(&self, i: usize) -> (usize, usize) {
        (i % self.d, i / self.d)
    }

    pub fn basis(&self, s: i64, t: i64) -> Tower {
        let mut z = Tower::zero(&self.ring);
        z.c[self.index(s, t)] = Scalar::one(self.p);
        z
    }

    /// `Tr(b_i b_j)` on the basis `alpha^s e_t`.
    pub fn gram(&self) -> Mat {
        let n = self.dim();
        let b: Vec<Tower> = (0..n).map(|i| {
            let (s, t) = self.slot(i);
            self.basis(s as i64, t as i64)
        }).collect();
        let mut g = Mat::zeros(self.p, n);
        for i in 0..n {
            for j in i..n {
                let x = b[i].mul(&b[j]).trace();
                g.set(i, j, x);
                g.set(j, i, x);
            }
        }
        g
    }
}

/// `(1/(d(p-1))) eps^{-s i} omega(a)^{-t}`, indexed by `i * (p-1) + (a-1)`.
fn idem_coeffs(tor: &Torsion, s: usize, t: usize) -> Vec<Scalar> {
    let (d, p) = (tor.l.d, tor.p());
    let norm = Scalar::from_i64(p, (d * (p as usize - 1)) as i64).inv().unwrap();
    let mut out = Vec::with_capacity(d * (p as usize - 1));
    for i in 0..d {
        let ei = tor.l.eps_inv(s * i % d);
        for w in &tor.omegas {
            out.push(ei * w.powi(-(t as i64)) * norm);
        }
    }
    out
}

/// The `(eps^s omega^t)`-component of a ring element.
pub fn project_ring(tor: &Torsion, x: &Tower, s: usize, t: usize) -> Tower {
    let cf = idem_coeffs(tor, s, t);
    let mut acc = Tower::zero(&x.ring);
    let mut k = 0;
    let mut xi = x.clone();
    for _ in 0..tor.l.d {
        for w in &tor.omegas {
            acc = acc.add(&xi.sigma(w).scale(&cf[k]));
            k += 1;
        }
        xi = xi.frob();
    }
    acc
}

/// `(g^{F^i})(omega(a) X)` for all `i < d` and `a`, in the order of the idempotent coefficients.
pub fn conjugates(tor: &Torsion, g: &Series<Unr>) -> Vec<Series<Unr>> {
    let mut out = Vec::with_capacity(tor.l.d * tor.omegas.len());
    let mut gi = g.clone();
    for _ in 0..tor.l.d {
        for w in &tor.omegas {
            let wu = Unr::from_scalar(&tor.l, *w);
            out.push(gi.scale_var(&wu));
        }
        gi = gi.frob();
    }
    out
}

/// `log g` of the projected unit `u^{E_{s,t}}`, from the conjugates of `log g`.
pub fn project_log(tor: &Torsion, conj: &[Series<Unr>], s: usize, t: usize) -> Series<Unr> {
    let cf = idem_coeffs(tor, s, t);
    let mut acc = conj[0].scale(&cf[0]);
    for (x, c) in conj.iter().zip(&cf).skip(1) {
        acc = acc.add(&x.scale(c));
    }
    acc
}

/// `g^c` for `g` with constant term in `1 + p O_L` and `c` in `Z_p`.
pub fn zp_power(g: &Series<Unr>, c: &Scalar) -> Result<Series<Unr>> {
    let p = c.prime();
    let g0 = g.c[0].clone();
    let one = g0.one_like();
    let z = g0.sub(&one);
    if z.vmin() < 1 {
        return Err(Error::Valuation("constant term is not a principal unit"));
    }
    let inv = g0.inv().ok_or(Error::Valuation("constant term is not a unit"))?;
    let len = g.len();
    let h1 = g.mul_coeff(&inv).sub(&Series::one(&g0, len));
    let mut acc = Series::one(&g0, len);
    let mut pw = acc.clone();
    let mut b = Scalar::one(p);
    for n in 1..len {
        b = b * (*c - Scalar::from_i64(p, n as i64 - 1)) / Scalar::from_i64(p, n as i64);
        pw = pw.mul(&h1);
        acc = acc.add(&pw.scale(&b));
    }
    let mut c0 = one.clone();
    let mut zp = one;
    let mut b = Scalar::one(p);
    for n in 1..256 {
        b = b * (*c - Scalar::from_i64(p, n as i64 - 1)) / Scalar::from_i64(p, n as i64);
        zp = zp.mul(&z);
        if zp.is_zero() {
            break;
        }
        c0 = c0.add(&zp.scale(&b));
    }
    Ok(acc.mul_coeff(&c0))
}

/// The Coleman series of `u^{E_{s,t}}` as a product of `Z_p`-powers of conjugates.
pub fn project_unit(tor: &Torsion, g: &Series<Unr>, s: usize, t: usize) -> Result<Series<Unr>> {
    let cf = idem_coeffs(tor, s, t);
    let mut acc = Series::one(&g.c[0], g.len());
    for (x, c) in conjugates(tor, g).iter().zip(&cf) {
        acc = acc.mul(&zp_power(x, c)?);
    }
    Ok(acc)
}

/// The projection of a coherent `g` to slot `(s, t)` over the window for `(p^m, Y^n)`,
/// with the certified valuation of `N - F` on it modulo `Y^n`.
pub fn certify_projected_unit(c: &ColemanCtx, g: &Series<Unr>, s: usize, t: usize, n: usize, m: i32) -> Result<(Series<Unr>, i32)> {
    let w = norm_window(c.p(), n, m);
    let gp = project_unit(&c.tor, &g.resize(w), s, t)?;
    let cert = coherence_defect_below(&gp, &c.grp.pi, n)?;
    Ok((gp, cert))
}

#[derive(Clone, Debug)]
pub struct GaussData {
    pub t: i64,
    pub g: Tower,
    /// `v_P(G(t))`
    pub v: i32,
    /// `v_P(G(t) / e_t)`
    pub ratio_v: i32,
}

/// `G(t)` with `v_P(G(t)) = t` and `G(t) / pi_1^t` a unit both certified.
pub fn gauss_data(tor: &Torsion, t: i64) -> Result<GaussData> {
    let g = tor.gauss_sum(t);
    let ratio = g.mul(&Tower::t_pow(&tor.r2, -t));
    let (v, ratio_v) = (g.v_p(), ratio.v_p());
    if v as i64 != t || ratio_v != 0 || !g.v_p_certified() || !ratio.v_p_certified() {
        return Err(Error::Identity { name: "v_P(G(t)) = t", index: t as usize });
    }
    Ok(GaussData { t, g, v, ratio_v })
}

/// `sum_{t != 0} omega(a)^t G(t) = zeta_1^{sigma_a} + 1/(p-1)`, worst over `a`.
pub fn gauss_orthogonality_defect(tor: &Torsion) -> i32 {
    let p = tor.p();
    let e = p as i64 - 1;
    let g: Vec<Tower> = (1..e).map(|t| tor.gauss_sum(t)).collect();
    let c = Scalar::from_i64(p, e).inv().unwrap();
    tor.omegas
        .iter()
        .map(|w| {
            let mut acc = tor.zeta.sigma(w).neg();
            acc.c[0] = acc.c[0] - c;
            for (t, gt) in g.iter().enumerate() {
                acc = acc.add(&gt.scale(&w.pow(t as u64 + 1)));
            }
            acc.vmin()
        })
        .min()
        .unwrap()
}

/// `[psi_t(u)]^{F^{-1}}` for `t = 0, ..., p-2`, at Omega-degree `k`, over `R_1''`.
pub fn eigen_moments(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Result<Vec<Period<Tower>>> {
    if !c.tor.m_is_teichmuller() {
        return Err(Error::Hypothesis("Delta acts on zeta_1 through omega"));
    }
    let r = c.restricted_moments(&c.torsion_values(&c.log_tilde(lg), k));
    let e = c.tor.r2.e as i64;
    let mut out = Vec::with_capacity(e as usize);
    for t in 0..e {
        let mut acc = r[1].scale(&c.tor.omegas[0].powi(t - k as i64));
        for (a, w) in c.tor.omegas.iter().enumerate().skip(1) {
            acc = acc.add(&r[a + 1].scale(&w.powi(t - k as i64)));
        }
        for n in acc.lo..=acc.hi() {
            let x = acc.get(n);
            if (x.ring.d..x.c.len()).any(|i| !x.c[i].is_zero()) {
                return Err(Error::Identity { name: "psi_t lies in the unramified base", index: t as usize });
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// `[int_G kappa^k d mu]^{F^{-1}}` against `psi_{k mod (p-1)}`.
pub fn full_moment_defect(c: &ColemanCtx, lg: &Series<Unr>, k: usize) -> Result<i32> {
    let psi = eigen_moments(c, lg, k)?;
    let a = c.measure(&c.log_tilde(lg));
    let m = moment(&a, k).frob_inv().map(|x| c.tor.lift(&Tower::from_unr(&c.tor.r1, x)));
    Ok(m.sub(&psi[k % c.tor.r2.e]).vmin())
}

/// The coefficient standing for `G(0)` in the eigen-decomposition of `phi_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussZero {
    /// `-1/(p-1)`, the Gauss sum formula evaluated at `t = 0`
    Derived,
    /// `G(0) = 1`
    Printed,
}

impl GaussZero {
    fn value(self, p: u32) -> Scalar {
        match self {
            GaussZero::Derived => -Scalar::from_i64(p, p as i64 - 1).inv().unwrap(),
            GaussZero::Printed => Scalar::one(p),
        }
    }
}

/// Both sides of `phi_k(u) = (p Omega)^{-k} sum_t G(t-k) [psi_t(u)]^{F^{-1}} + p^{-1} phi_CW^k(u)`, over `R_1''`.
pub fn eigen_decomposition_identity(c: &ColemanCtx, lg: &Series<Unr>, k: usize, g0: GaussZero) -> Result<(Tower, Tower)> {
    let p = c.p();
    let tor = &c.tor;
    let psi = eigen_moments(c, lg, k)?;
    let e = tor.r2.e as i64;
    let mut acc = Tower::zero(&tor.r2);
    for (t, ps) in psi.iter().enumerate() {
        let x = ps
            .shift(-(k as i32))
            .pure(0)
            .ok_or(Error::Identity { name: "Omega-degrees cancel in the eigen-decomposition", index: t })?;
        let j = (t as i64 - k as i64).rem_euclid(e);
        let g = if j == 0 { Tower::one(&tor.r2).scale(&g0.value(p)) } else { tor.gauss_sum(j) };
        acc = acc.add(&g.mul(&x));
    }
    let pk = Scalar::from_i64(p, p as i64).powi(-(k as i64));
    let cw = Tower::from_unr(&tor.r1, &phi_cw(c, lg, k)).scale(&Scalar::from_i64(p, p as i64).inv()?);
    let rhs = acc.scale(&pk).add(&tor.lift(&cw));
    let lhs = tor.lift(&crate::coates_wiles::phi_k(c, lg, k));
    Ok((lhs, rhs))
}

/// Defects of the readings of `(1 - (pi^k/p) rho^s) phi_CW = Omega^{-k} psi_t` on a unit in slot `(s, t)`, `t = k`.
#[derive(Clone, Copy, Debug)]
pub struct RhoReport {
    /// `phi_CW^F - eps^s phi_CW`
    pub frob_eigen: i32,
    /// with `rho^s = eps(F)^s`
    pub with_rho: i32,
    /// with `rho^s` dropped
    pub without_rho: i32,
}

pub fn rho_readings(c: &ColemanCtx, lg: &Series<Unr>, s: usize, k: usize) -> Result<RhoReport> {
    let p = c.p();
    let l = c.l();
    let cw = phi_cw(c, lg, k);
    let eps = l.eps(s % l.d);
    let frob_eigen = cw.frob().sub(&cw.scale(&eps)).vmin();
    let mom = moment(&c.measure(&c.log_tilde(lg)), k)
        .shift(-(k as i32))
        .pure(0)
        .ok_or(Error::Identity { name: "Omega-degrees cancel in the moment", index: k })?;
    let x = c.grp.pi.pow(k as u64) / Scalar::from_i64(p, p as i64);
    let one = Scalar::one(p);
    let with_rho = cw.scale(&(one - x * eps)).sub(&mom).vmin();
    let without_rho = cw.scale(&(one - x)).sub(&mom).vmin();
    Ok(RhoReport { frob_eigen, with_rho, without_rho })
}

/// Predicted exponent of each coordinate of `phi_k(U)`: `-k`, and `N_k - k` at `(-S, 1-k)`.
pub fn image_exponents(frame: &EigenFrame, anom: &AnomalyData, k: usize) -> Vec<i32> {
    let mut v = alloc::vec![-(k as i32); frame.dim()];
    if anom.n > 0 {
        v[frame.index(-(anom.s as i64), 1 - k as i64)] += n_k(frame.p, k as u32, anom.n) as i32;
    }
    v
}

/// Coordinate of `phi_k(u)` for `u` in the unit slot `(s, t)`.
pub fn target_coord(frame: &EigenFrame, s: usize, t: usize, k: usize) -> usize {
    frame.index(s as i64, t as i64 - k as i64)
}

#[derive(Clone, Debug)]
pub struct SlotStat {
    /// unit slot
    pub s: usize,
    pub t: usize,
    pub coord: usize,
    pub bound: i32,
    /// least valuation of a certified nonzero value
    pub min_val: Option<i32>,
    /// least certified valuation off the target coordinate
    pub leak: i32,
    pub contained: bool,
}

impl SlotStat {
    pub fn attained(&self) -> bool {
        self.min_val == Some(self.bound)
    }
}

#[derive(Clone, Debug)]
pub struct ImageReport {
    pub k: usize,
    pub samples: usize,
    pub slots: Vec<SlotStat>,
    /// `phi_k(u^{E_{s,t}})` against the `(s, t-k)` coordinate of `phi_k(u)`
    pub oracle_defect: i32,
    /// `phi_k(u)` itself lies in the predicted lattice
    pub unprojected_contained: bool,
}

impl ImageReport {
    pub fn contained(&self) -> bool {
        self.unprojected_contained && self.slots.iter().all(|s| s.contained)
    }

    pub fn attained(&self) -> bool {
        self.slots.iter().all(|s| s.attained())
    }
}

fn within(v: &Tower, bounds: &[i32], skip: Option<usize>) -> bool {
    v.c.iter().enumerate().all(|(i, x)| Some(i) == skip || x.val() >= bounds[i])
}

/// Projects each sample to every slot and records `phi_k` for each `k` in `ks` (all `>= 2`).
pub fn image_lattice(c: &ColemanCtx, anom: &AnomalyData, lgs: &[Series<Unr>], ks: &[usize]) -> Result<Vec<ImageReport>> {
    if ks.iter().any(|&k| k < 2) {
        return Err(Error::Hypothesis("the image is described for k >= 2"));
    }
    let frame = EigenFrame::new(&c.tor.r1);
    let kmax = ks.iter().copied().max().unwrap_or(0);
    let pi = c.grp.pi;
    let bounds: Vec<Vec<i32>> = ks.iter().map(|&k| image_exponents(&frame, anom, k)).collect();
    let mut reps: Vec<ImageReport> = ks
        .iter()
        .zip(&bounds)
        .map(|(&k, b)| ImageReport {
            k,
            samples: lgs.len(),
            slots: (0..frame.dim())
                .map(|i| {
                    let (s, t) = frame.slot(i);
                    let coord = target_coord(&frame, s, t, k);
                    SlotStat { s, t, coord, bound: b[coord], min_val: None, leak: i32::MAX, contained: true }
                })
                .collect(),
            oracle_defect: i32::MAX,
            unprojected_contained: true,
        })
        .collect();
    let phis = |lg: &Series<Unr>| -> Vec<Option<Tower>> {
        let mut out = alloc::vec![None; kmax + 1];
        let mut h = lg.clone();
        for (k, o) in out.iter_mut().enumerate().skip(1) {
            h = c.dop(&h, 1);
            if ks.contains(&k) {
                *o = Some(eval_at_pi1(c, &h).scale(&pi.powi(-(k as i64))));
            }
        }
        out
    };
    for lg in lgs {
        let full = phis(lg);
        let conj = conjugates(&c.tor, lg);
        for (j, rep) in reps.iter_mut().enumerate() {
            let v = full[rep.k].as_ref().unwrap();
            rep.unprojected_contained &= within(v, &bounds[j], None);
        }
        for i in 0..frame.dim() {
            let (s, t) = frame.slot(i);
            let pl = project_log(&c.tor, &conj, s, t);
            let ph = phis(&pl);
            for (j, rep) in reps.iter_mut().enumerate() {
                let k = rep.k;
                let v = ph[k].as_ref().unwrap();
                let st = &mut rep.slots[i];
                let x = v.c[st.coord];
                if !x.is_zero() {
                    st.min_val = Some(st.min_val.map_or(x.val(), |m| m.min(x.val())));
                }
                st.contained &= x.val() >= st.bound && within(v, &bounds[j], Some(st.coord));
                let leak = v.c.iter().enumerate().filter(|&(i2, _)| i2 != st.coord).map(|(_, y)| y.val()).min();
                st.leak = st.leak.min(leak.unwrap_or(i32::MAX));
                let w = full[k].as_ref().unwrap().c[st.coord];
                rep.oracle_defect = rep.oracle_defect.min((x - w).val());
            }
        }
    }
    Ok(reps)
}

#[derive(Clone, Debug)]
pub struct AnnihilatorReport {
    pub k: usize,
    /// exponents of the computed dual, relative to `p^k (k-1)!`
    pub dual_exps: Vec<i32>,
    pub closed_exps: Vec<i32>,
    pub equal: bool,
    /// `(s, t)` coordinates where the two disagree
    pub mismatches: Vec<(usize, usize)>,
    pub double_dual: bool,
    /// the exceptional slot `(S, k-1)` coincides with `t = 0`
    pub collision: bool,
}

/// The closed form of `L_k`: exponents relative to `p^k (k-1)!`, and whether `k - 1 = 0 mod (p-1)`
/// with `N > 0`.  At such a collision the exponent is `-N_k`, the value forced by
/// duality with [`image_exponents`].
pub fn closed_form_exponents(frame: &EigenFrame, anom: &AnomalyData, k: usize) -> (Vec<i32>, bool) {
    let mut v: Vec<i32> = (0..frame.dim()).map(|i| if frame.slot(i).1 == 0 { 0 } else { -1 }).collect();
    let mut collision = false;
    if anom.n > 0 {
        let nk = n_k(frame.p, k as u32, anom.n) as i32;
        let i = frame.index(anom.s as i64, k as i64 - 1);
        collision = frame.slot(i).1 == 0;
        v[i] = if collision { -nk } else { -nk - 1 };
    }
    (v, collision)
}

fn factorial(p: u32, n: usize) -> Scalar {
    (1..=n as i64).fold(Scalar::one(p), |a, i| a * Scalar::from_i64(p, i))
}

/// Per-coordinate exponent of a lattice whose basis is monomial in the frame.
fn column_exponents(b: &Mat) -> Vec<i32> {
    (0..b.n).map(|j| (0..b.n).map(|i| b.get(i, j)).filter(|x| !x.is_zero()).map(|x| x.val()).min().unwrap_or(i32::MAX)).collect()
}

fn annihilator_of(frame: &EigenFrame, img_exps: &[i32], anom: &AnomalyData, k: usize) -> Result<AnnihilatorReport> {
    let p = frame.p;
    let gram = frame.gram();
    let fact = factorial(p, k - 1);
    let img = Mat::diagonal(p, img_exps).scale(fact.inv()?);
    let dual = dual_basis(&img, &gram)?;
    let (closed_exps, collision) = closed_form_exponents(frame, anom, k);
    let scale = Scalar::from_i64(p, p as i64).pow(k as u64) * fact;
    let closed = Mat::diagonal(p, &closed_exps).scale(scale);
    let equal = same_lattice(&dual, &closed)?;
    let shift = k as i32 + vp_int(p, fact_int(k - 1)) as i32;
    let dual_exps: Vec<i32> = column_exponents(&dual).iter().map(|x| x - shift).collect();
    let mismatches = (0..frame.dim()).filter(|&i| dual_exps[i] != closed_exps[i]).map(|i| frame.slot(i)).collect();
    let double_dual = same_lattice(&dual_basis(&dual, &gram)?, &img)?;
    Ok(AnnihilatorReport { k, dual_exps, closed_exps, equal, mismatches, double_dual, collision })
}

fn fact_int(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// `L_k` as the dual of `(1/(k-1)!)` times the predicted image, against the closed form.
pub fn annihilator(frame: &EigenFrame, anom: &AnomalyData, k: usize) -> Result<AnnihilatorReport> {
    annihilator_of(frame, &image_exponents(frame, anom, k), anom, k)
}

/// The same comparison for the lattice spanned by the sampled slot minima; `None` unless every slot attained a value.
pub fn sampled_annihilator(frame: &EigenFrame, anom: &AnomalyData, rep: &ImageReport) -> Result<Option<AnnihilatorReport>> {
    let mut exps = alloc::vec![0; frame.dim()];
    for st in &rep.slots {
        match st.min_val {
            Some(v) => exps[st.coord] = v,
            None => return Ok(None),
        }
    }
    annihilator_of(frame, &exps, anom, rep.k).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coates_wiles::{galois_twist, phi_k};
    use crate::hecke::anomaly_index;
    use crate::lubin_tate::LtGroup;
    use crate::padic::PrimeConfig;

    fn ctx(p: u32, d: usize, pi: i64, deg: usize) -> ColemanCtx {
        let g = LtGroup::build(PrimeConfig::new(p, 10, deg).unwrap(), Scalar::from_i64(p, pi)).unwrap();
        ColemanCtx::build(g, d).unwrap()
    }

    #[test]
    fn frame_is_an_eigenbasis() {
        let c = ctx(5, 4, 35, 16);
        let f = EigenFrame::new(&c.tor.r1);
        for s in 0..4 {
            for t in 0..4 {
                let b = f.basis(s, t);
                for w in &c.tor.omegas {
                    assert!(b.sigma(w).sub(&b.scale(&w.pow(t as u64))).is_zero());
                }
                assert!(b.frob().sub(&b.scale(&c.l().eps(s as usize))).is_zero());
                assert_eq!(b.v_p(), t as i32);
                for s1 in 0..4 {
                    let q = project_ring(&c.tor, &b, s1, t as usize);
                    let want = if s1 == s as usize { b.clone() } else { Tower::zero(&b.ring) };
                    assert!(q.sub(&want).is_zero());
                }
            }
        }
    }

    #[test]
    fn projections_partition_unity() {
        let c = ctx(5, 4, 35, 16);
        let mut x = Tower::zero(&c.tor.r1);
        for (i, y) in x.c.iter_mut().enumerate() {
            *y = Scalar::from_i64(5, 3 * i as i64 + 1);
        }
        let mut acc = Tower::zero(&c.tor.r1);
        for s in 0..4 {
            for t in 0..4 {
                acc = acc.add(&project_ring(&c.tor, &x, s, t));
            }
        }
        assert!(acc.sub(&x).is_zero());
    }

    #[test]
    fn gram_pairs_opposite_slots() {
        let c = ctx(7, 6, 21, 24);
        let f = EigenFrame::new(&c.tor.r1);
        let g = f.gram();
        for i in 0..f.dim() {
            for j in 0..f.dim() {
                let (s, t) = f.slot(i);
                let (s1, t1) = f.slot(j);
                let paired = (s + s1) % 6 == 0 && (t + t1) % 6 == 0;
                assert_eq!(!g.get(i, j).is_zero(), paired, "{i} {j}");
                if paired {
                    assert_eq!(g.get(i, j).val(), (t != 0) as i32);
                }
            }
        }
    }

    #[test]
    fn gauss_sums_have_the_right_valuation() {
        for (p, pi) in [(5u32, 30i64), (7, 21)] {
            let c = ctx(p, 1, pi, 24);
            for t in 0..p as i64 - 1 {
                gauss_data(&c.tor, t).unwrap();
            }
            assert!(gauss_orthogonality_defect(&c.tor) >= 8);
        }
    }

    #[test]
    fn zp_power_agrees_with_integer_power() {
        let c = ctx(5, 4, 35, 16);
        let u = c.sample(3, 0).unwrap();
        let a = zp_power(&u.g, &Scalar::from_i64(5, 3)).unwrap();
        let b = u.g.pow(3);
        assert!(a.sub(&b).vmin() >= 8);
        let m = zp_power(&u.g, &Scalar::from_i64(5, -1)).unwrap().mul(&u.g);
        assert!(m.sub(&Series::one(&u.g.c[0], 16)).vmin() >= 8);
    }

    #[test]
    fn projected_unit_is_coherent_and_matches_log() {
        let c = ctx(5, 4, 35, 16);
        let u = c.sample(5, 1).unwrap();
        let lg = c.log(&u).unwrap();
        let conj = conjugates(&c.tor, &lg);
        let (g, cd) = certify_projected_unit(&c, &u.g, 2, 1, 4, 8).unwrap();
        assert!(cd >= 8, "{cd}");
        let pl = project_log(&c.tor, &conj, 2, 1);
        assert!(g.log().unwrap().truncate(4).sub(&pl.truncate(4)).vmin() >= 8);
        // the projection lands in its eigenspace
        let other = project_log(&c.tor, &conjugates(&c.tor, &pl), 3, 1);
        assert!(other.vmin() >= 8);
    }

    #[test]
    fn eigen_moments_trivial_and_equivariant() {
        let c = ctx(5, 1, 30, 40);
        let one = c.log(&crate::coleman::CoherentUnit::one(c.l(), c.len())).unwrap();
        for psi in eigen_moments(&c, &one, 2).unwrap() {
            assert!(psi.is_zero());
        }
        let lg = c.log(&c.sample(1, 1).unwrap()).unwrap();
        let w = c.tor.omegas[1];
        for k in 1..4 {
            assert!(full_moment_defect(&c, &lg, k).unwrap() >= 6);
            let a = eigen_moments(&c, &lg, k).unwrap();
            let b = eigen_moments(&c, &galois_twist(&lg, &w), k).unwrap();
            for (t, (x, y)) in a.iter().zip(&b).enumerate() {
                assert!(y.sub(&x.scale(&w.pow(t as u64))).vmin() >= 6);
            }
        }
    }

    #[test]
    fn eigen_decomposition_readings() {
        let c = ctx(5, 4, 35, 48);
        let lg = c.log(&c.sample(2, 0).unwrap()).unwrap();
        for k in 1..=4 {
            let (a, b) = eigen_decomposition_identity(&c, &lg, k, GaussZero::Derived).unwrap();
            assert!(a.sub(&b).vmin() >= 6, "k = {k}");
            let (a, b) = eigen_decomposition_identity(&c, &lg, k, GaussZero::Printed).unwrap();
            assert!(a.sub(&b).vmin() < 6);
        }
    }

    #[test]
    fn single_summand_off_the_k_slot() {
        let c = ctx(5, 4, 35, 40);
        let lg = c.log(&c.sample(2, 1).unwrap()).unwrap();
        let conj = conjugates(&c.tor, &lg);
        let k = 2;
        let pl = project_log(&c.tor, &conj, 1, 3);
        assert!(phi_cw(&c, &pl, k).vmin() >= 6);
        let psi = eigen_moments(&c, &pl, k).unwrap();
        for (t, x) in psi.iter().enumerate() {
            if t != 3 {
                assert!(x.vmin() >= 6, "t = {t}");
            }
        }
        // the k-slot with s != 0 separates the rho readings
        let pl = project_log(&c.tor, &conj, 1, 2);
        let r = rho_readings(&c, &pl, 1, k).unwrap();
        assert!(r.frob_eigen >= 8 && r.with_rho >= 6 && r.without_rho < 6, "{r:?}");
    }

    #[test]
    fn image_for_a_few_samples() {
        let c = ctx(5, 4, 35, 40);
        let an = anomaly_index(&c.grp.pi, c.l(), 10).unwrap();
        let lgs: Vec<_> = (0..3).map(|i| c.log(&c.sample(9, i).unwrap()).unwrap()).collect();
        let reps = image_lattice(&c, &an, &lgs, &[2, 3]).unwrap();
        for r in &reps {
            assert!(r.contained(), "k = {}", r.k);
            assert!(r.oracle_defect >= 4, "k = {}: {}", r.k, r.oracle_defect);
            let v = phi_k(&c, &lgs[0], r.k);
            assert!(v.vmin() >= -(r.k as i32));
        }
    }

    #[test]
    fn annihilator_closed_form() {
        for (p, d, pi) in [(5u32, 1usize, 30i64), (5, 4, 35), (7, 1, 21), (7, 6, 21)] {
            let c = ctx(p, d, pi, 24);
            let an = anomaly_index(&c.grp.pi, c.l(), 10).unwrap();
            let f = EigenFrame::new(&c.tor.r1);
            for k in 2..=6 {
                let r = annihilator(&f, &an, k).unwrap();
                assert!(r.equal && r.double_dual && r.mismatches.is_empty(), "{p} {d} k = {k}: {r:?}");
            }
        }
    }
}
