use lt_core::coleman::norm;
use lt_core::lattice::{dual_basis, same_lattice, smith_exponents, Mat};
use lt_core::lattice_image::project_ring;
use lt_core::lubin_tate::LtGroup;
use lt_core::series::Series;
use lt_core::torsion::Torsion;
use lt_core::tower::Tower;
use lt_core::unramified::{build_l, Unr};
use lt_core::{Coeff, PrimeConfig, Scalar, Twist};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(5u32), Just(7u32)]
}

fn sc(p: u32, x: i64, v: i32) -> Scalar {
    Scalar::from_i64(p, x).shift(v)
}

fn zero(x: Scalar) -> bool {
    x.is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scalar_ring_axioms(p in prime(), a in -10_000i64..10_000, b in -10_000i64..10_000, c in -10_000i64..10_000, va in -3i32..3, vb in -3i32..3) {
        let (x, y, z) = (sc(p, a, va), sc(p, b, vb), sc(p, c, 0));
        prop_assert!(zero((x + y) + z - (x + (y + z))));
        prop_assert!(zero(x * (y + z) - (x * y + x * z)));
        prop_assert!(zero(x * y - y * x));
        if a != 0 && b != 0 {
            prop_assert_eq!((x * y).val(), x.val() + y.val());
            prop_assert!(zero(x * x.inv().unwrap() - Scalar::one(p)));
            prop_assert!(zero(x / y * y - x));
        }
    }

    #[test]
    fn teichmuller_is_a_root_of_unity(p in prime(), a in 1i64..1_000_000) {
        prop_assume!(a % p as i64 != 0);
        let w = Scalar::from_i64(p, a).teichmuller().unwrap();
        prop_assert!(zero(w.pow(p as u64 - 1) - Scalar::one(p)));
        prop_assert_eq!(w.residue(1), (a % p as i64) as u64);
    }

    #[test]
    fn series_inverse_and_reversion(p in prime(), cs in prop::collection::vec(-50i64..50, 2..10)) {
        let len = 12;
        let mut u = cs.clone();
        u[0] = 1 + p as i64 * u[0];
        let s = Series::from_i64(p, &u, len);
        let one = Series::one(&Scalar::one(p), len);
        prop_assert!(s.mul(&s.inv().unwrap()).sub(&one).vmin() >= 10);
        let mut v = cs;
        v[0] = 0;
        v[1] = 1;
        let t = Series::from_i64(p, &v, len);
        let x = Series::x(&Scalar::one(p), len);
        prop_assert!(t.compose(&t.revert().unwrap()).sub(&x).vmin() >= 10);
    }

    #[test]
    fn norm_is_multiplicative(a in prop::collection::vec(-100i64..100, 6), b in prop::collection::vec(-100i64..100, 6)) {
        let p = 5;
        let pi = Scalar::from_i64(p, 30);
        let mut a = a;
        let mut b = b;
        a[0] = 1 + 5 * a[0];
        b[0] = 1 + 5 * b[0];
        let n = 11;
        let g = Series::from_i64(p, &a, 6).resize(n);
        let h = Series::from_i64(p, &b, 6).resize(n);
        let lhs = norm(&g.mul(&h), &pi).unwrap();
        let rhs = norm(&g, &pi).unwrap().mul(&norm(&h, &pi).unwrap());
        prop_assert!(lhs.sub(&rhs).vmin() >= 12);
    }

    #[test]
    fn unramified_frobenius_and_norm(c1 in prop::collection::vec(-1000i64..1000, 4), c2 in prop::collection::vec(-1000i64..1000, 4)) {
        let p = 5;
        let l = build_l(p, 4).unwrap();
        let x = Unr::from_coords(&l, c1.iter().map(|&c| Scalar::from_i64(p, c)).collect());
        let y = Unr::from_coords(&l, c2.iter().map(|&c| Scalar::from_i64(p, c)).collect());
        prop_assert!(x.frob_pow(4).sub(&x).is_zero());
        prop_assert!(x.mul(&y).frob().sub(&x.frob().mul(&y.frob())).is_zero());
        let nxy = x.mul(&y).norm().unwrap();
        prop_assert!(zero(nxy - x.norm().unwrap() * y.norm().unwrap()));
    }

    #[test]
    fn lattice_duality(entries in prop::collection::vec(-30i64..30, 16), shifts in prop::collection::vec(-2i32..3, 4)) {
        let p = 5;
        let rows: Vec<Vec<Scalar>> = (0..4).map(|i| (0..4).map(|j| sc(p, entries[4 * i + j] + if i == j { 61 } else { 0 }, shifts[i])).collect()).collect();
        let b = Mat::from_rows(&rows);
        prop_assume!(smith_exponents(&b).is_ok());
        let g = Mat::identity(p, 4);
        let dd = dual_basis(&dual_basis(&b, &g).unwrap(), &g).unwrap();
        prop_assert!(same_lattice(&dd, &b).unwrap());
        // a unimodular change of basis gives the same lattice
        let mut u = Mat::identity(p, 4);
        u.set(0, 3, sc(p, entries[0], 0));
        u.set(1, 2, sc(p, entries[5], 0));
        prop_assert!(same_lattice(&u.mul(&b), &b).unwrap());
        let e: Vec<i32> = smith_exponents(&b).unwrap();
        let d: Vec<i32> = smith_exponents(&dual_basis(&b, &g).unwrap()).unwrap();
        prop_assert_eq!(e.iter().sum::<i32>(), -d.iter().sum::<i32>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn multiplication_maps_compose(a in 1i64..500, b in 1i64..500) {
        let p = 5;
        prop_assume!(a % 5 != 0 && b % 5 != 0);
        let g = LtGroup::build(PrimeConfig::new(p, 10, 20).unwrap(), Scalar::from_i64(p, 30)).unwrap();
        let ma = g.mult(Scalar::from_i64(p, a));
        let mb = g.mult(Scalar::from_i64(p, b));
        let mab = g.mult(Scalar::from_i64(p, a * b));
        prop_assert!(ma.compose(&mb).sub(&mab).vmin() >= 10);
        prop_assert!(g.f.compose(&ma).sub(&ma.compose(&g.f)).vmin() >= 10);
    }

    #[test]
    fn eigen_projections_partition(cs in prop::collection::vec(-1000i64..1000, 16)) {
        let p = 5;
        let g = LtGroup::build(PrimeConfig::new(p, 10, 16).unwrap(), Scalar::from_i64(p, 35)).unwrap();
        let tor = Torsion::build(&g, 4).unwrap();
        let mut x = Tower::zero(&tor.r1);
        for (y, &c) in x.c.iter_mut().zip(&cs) {
            *y = Scalar::from_i64(p, c);
        }
        let mut acc = Tower::zero(&tor.r1);
        for s in 0..4 {
            for t in 0..4 {
                let q = project_ring(&tor, &x, s, t);
                // each component is an eigenvector
                let w = tor.omegas[1];
                prop_assert!(q.sigma(&w).sub(&q.scale(&w.pow(t as u64))).is_zero());
                acc = acc.add(&q);
            }
        }
        prop_assert!(acc.sub(&x).is_zero());
    }
}
