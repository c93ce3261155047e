use iwk_core::padic::{padic_log, teichmuller, PadicCtx, PadicScalar};
use iwk_core::unramified::{embed_field, solve_frobenius_additive, solve_frobenius_multiplicative, UnramField, UnramifiedElt};
use iwk_core::CycloElt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn ctx(p: u32, n: u32) -> &'static PadicCtx {
    PadicCtx::get(p, n).unwrap()
}

#[test]
fn teichmuller_examples() {
    for p in [3, 5, 7, 11] {
        let c = ctx(p, 20);
        assert_eq!(teichmuller(c, 1, 20), PadicScalar::one(c));
        assert!(teichmuller(c, p as i64 - 1, 20).agree(&PadicScalar::from_i64(c, -1)) >= 20);
    }
    let c = ctx(5, 2);
    let w = teichmuller(c, 2, 2);
    assert!(w.agree(&PadicScalar::from_i64(c, 7)) >= 2);
    assert_eq!(w.to_biguint_mod(2), 7u32.into());
}

#[test]
fn teichmuller_is_multiplicative() {
    let p = 7;
    let c = ctx(p, 25);
    for a in 1..p as i64 {
        for b in 1..p as i64 {
            let lhs = teichmuller(c, a, 25).mul(&teichmuller(c, b, 25));
            let rhs = teichmuller(c, a * b, 25);
            assert!(lhs.agree(&rhs) >= 25);
            assert!(teichmuller(c, a, 25).pow(p as i64 - 1).unwrap().agree(&PadicScalar::one(c)) >= 25);
        }
    }
}

#[test]
fn log_examples() {
    let c = ctx(5, 30);
    assert!(padic_log(&PadicScalar::one(c)).unwrap().is_zero());
    let u = PadicScalar::from_i64(c, 6);
    let lhs = padic_log(&u.pow(5).unwrap()).unwrap();
    let rhs = padic_log(&u).unwrap().mul_i64(5);
    assert!(lhs.agree(&rhs) >= 29, "{lhs} vs {rhs}");
    assert!(padic_log(&PadicScalar::from_i64(c, 2)).is_err());
}

#[test]
fn log_matches_rational_series_sum() {
    // Σ_{k≤60} (-1)^{k+1} 5^k / k as an exact rational, reduced mod 5^4.
    let mut sum = BigRational::zero();
    let five = BigInt::from(5);
    let mut pw = BigInt::one();
    for k in 1..=60i64 {
        pw *= &five;
        let term = BigRational::new(pw.clone(), BigInt::from(k));
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let m = BigInt::from(625);
    let den_inv = sum.denom().extended_gcd(&m).x.mod_floor(&m);
    let expected = (sum.numer() * den_inv).mod_floor(&m);
    let c = ctx(5, 4);
    let v = padic_log(&PadicScalar::from_i64(c, 6)).unwrap();
    assert_eq!(BigInt::from(v.to_biguint_mod(4)), expected);
}

#[test]
fn cyclotomic_norm_of_zeta_minus_one() {
    for p in [3u32, 5] {
        let c = ctx(p, 30);
        for n in 1..=3u32 {
            if p == 5 && n == 3 {
                continue;
            }
            let z = CycloElt::zeta_pow(c, n, 1).sub(&CycloElt::one(c, n));
            let nm = z.norm().unwrap();
            assert!(nm.agree(&PadicScalar::from_i64(c, p as i64)) >= 30, "p={p} n={n}: {nm}");
        }
    }
}

#[test]
fn cyclotomic_norm_level_three_p5() {
    let c = ctx(5, 12);
    let z = CycloElt::zeta_pow(c, 3, 1).sub(&CycloElt::one(c, 3));
    assert!(z.norm().unwrap().agree(&PadicScalar::from_i64(c, 5)) >= 12);
}

#[test]
fn cyclotomic_compatibility() {
    for p in [3u32, 5, 7] {
        let c = ctx(p, 10);
        for n in 1..=2u32 {
            let up = CycloElt::zeta_pow(c, n + 1, p as i64);
            let down = CycloElt::zeta_pow(c, n, 1).lift(n + 1);
            assert_eq!(up.agree(&down), up.agree(&up));
            assert!(up.sub(&down).is_zero());
        }
        let z = CycloElt::zeta_pow(c, 2, 2);
        let order = (p * p) as u64;
        assert!(z.pow(order).sub(&CycloElt::one(c, 2)).is_zero());
        assert!(!z.pow(order / p as u64).sub(&CycloElt::one(c, 2)).is_zero());
    }
}

#[test]
fn cyclotomic_inverse() {
    let c = ctx(5, 20);
    let x = CycloElt::zeta_pow(c, 2, 3).add(&CycloElt::from_scalar(2, &PadicScalar::from_i64(c, 2)));
    let y = x.inv().unwrap();
    assert!(x.mul(&y).sub(&CycloElt::one(c, 2)).is_zero());
}

fn cyclo_from(c: &'static PadicCtx, level: u32, v: &[i64]) -> CycloElt {
    let d = iwk_core::cyclo::cyclo_dim(c.p(), level);
    let coords = (0..d).map(|i| PadicScalar::from_i64(c, v[i % v.len()])).collect();
    CycloElt::from_coords(c, level, coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn scalar_ring_axioms(a in -10_000i64..10_000, b in -10_000i64..10_000, d in -10_000i64..10_000) {
        let c = ctx(5, 30);
        let (x, y, z) = (PadicScalar::from_i64(c, a), PadicScalar::from_i64(c, b), PadicScalar::from_i64(c, d));
        prop_assert!(x.mul(&y).mul(&z).sub(&x.mul(&y.mul(&z))).is_zero());
        prop_assert!(x.mul(&y.add(&z)).sub(&x.mul(&y).add(&x.mul(&z))).is_zero());
        prop_assert!(x.add(&y).sub(&y.add(&x)).is_zero());
    }

    #[test]
    fn cyclo_ring_axioms(a in prop::collection::vec(-50i64..50, 4..20), b in prop::collection::vec(-50i64..50, 4..20), d in prop::collection::vec(-50i64..50, 4..20)) {
        let c = ctx(5, 20);
        let (x, y, z) = (cyclo_from(c, 2, &a), cyclo_from(c, 2, &b), cyclo_from(c, 1, &d));
        prop_assert!(x.mul(&y).mul(&z).sub(&x.mul(&y.mul(&z))).is_zero());
        prop_assert!(x.mul(&y.add(&z)).sub(&x.mul(&y).add(&x.mul(&z))).is_zero());
        prop_assert!(x.galois(2).mul(&y.galois(2)).sub(&x.mul(&y).galois(2)).is_zero());
    }

    #[test]
    fn log_is_homomorphic(a in 0i64..1000, b in 0i64..1000) {
        let c = ctx(7, 25);
        let u = PadicScalar::from_i64(c, 1 + 7 * a);
        let v = PadicScalar::from_i64(c, 1 + 7 * b);
        let lhs = padic_log(&u.mul(&v)).unwrap();
        let rhs = padic_log(&u).unwrap().add(&padic_log(&v).unwrap());
        prop_assert!(lhs.agree(&rhs) >= 25);
    }

    #[test]
    fn unramified_ring_axioms(a in prop::collection::vec(-30i64..30, 3), b in prop::collection::vec(-30i64..30, 3), d in prop::collection::vec(-30i64..30, 3)) {
        let c = ctx(5, 20);
        let field = UnramField::generate(c, 3, 7).unwrap();
        let mk = |v: &[i64]| UnramifiedElt::from_coords(field.clone(), v.iter().map(|&k| PadicScalar::from_i64(c, k)).collect()).unwrap();
        let (x, y, z) = (mk(&a), mk(&b), mk(&d));
        prop_assert!(x.mul(&y).mul(&z).sub(&x.mul(&y.mul(&z))).is_zero());
        prop_assert!(x.mul(&y.add(&z)).sub(&x.mul(&y).add(&x.mul(&z))).is_zero());
        prop_assert!(x.mul(&y).frobenius().sub(&x.frobenius().mul(&y.frobenius())).is_zero());
    }
}

#[test]
fn frobenius_basics() {
    for p in [3u32, 5] {
        let c = ctx(p, 20);
        for f in [2usize, 3] {
            let field = UnramField::generate(c, f, 11).unwrap();
            let s = UnramifiedElt::from_scalar_in(field.clone(), &PadicScalar::from_i64(c, 1234));
            assert!(s.frobenius().sub(&s).is_zero());
            let x = UnramifiedElt::generator_in(field.clone()).add(&s);
            let mut y = x.clone();
            for _ in 0..f {
                y = y.frobenius();
            }
            assert!(y.sub(&x).is_zero());
            assert!(!x.frobenius().sub(&x).is_zero());
            let g = UnramifiedElt::generator_in(field.clone()).teichmuller();
            let lhs = g.frobenius();
            let rhs = g.pow(p as u64).teichmuller();
            assert!(lhs.sub(&rhs).is_zero());
            let residue_frob = x.frobenius().sub(&x.pow(p as u64));
            assert!(residue_frob.val_bound() >= 1);
        }
    }
}

#[test]
fn frobenius_equation_additive() {
    let c = ctx(5, 20);
    let field = UnramField::generate(c, 2, 3).unwrap();
    assert!(solve_frobenius_additive(&UnramifiedElt::zero_in(field.clone())).unwrap().is_zero());
    let g = UnramifiedElt::generator_in(field.clone()).teichmuller();
    let x = g.sub(&g.frobenius());
    let y = solve_frobenius_additive(&x).unwrap();
    assert!(y.sub(&y.frobenius()).sub(&x).is_zero());
    assert_eq!(y.residue(), g.residue());
    let bad = UnramifiedElt::one_in(field.clone());
    assert!(solve_frobenius_additive(&bad).is_err());
}

#[test]
fn frobenius_equation_multiplicative() {
    let c = ctx(5, 20);
    let field = UnramField::generate(c, 2, 5).unwrap();
    let one = UnramifiedElt::one_in(field.clone());
    assert!(solve_frobenius_multiplicative(&one).unwrap().sub(&one).is_zero());
    for a in 1..5 {
        let alpha = UnramifiedElt::from_scalar_in(field.clone(), &teichmuller(c, a, 20));
        let norm_ok = teichmuller(c, a, 20).pow(2).unwrap().agree(&PadicScalar::one(c)) >= 20;
        match solve_frobenius_multiplicative(&alpha) {
            Ok(u) => {
                assert!(norm_ok);
                assert!(u.frobenius().sub(&alpha.mul(&u)).is_zero());
            }
            Err(_) => assert!(!norm_ok),
        }
    }
}

#[test]
fn frobenius_commutes_with_tower_inclusion() {
    let c = ctx(3, 15);
    let small = UnramField::generate(c, 2, 1).unwrap();
    let big = UnramField::generate(c, 4, 2).unwrap();
    let iota = embed_field(&small, &big).unwrap();
    let x = UnramifiedElt::generator_in(small.clone()).add(&UnramifiedElt::from_scalar_in(small.clone(), &PadicScalar::from_i64(c, 7)));
    let lhs = iota(&x).frobenius();
    let rhs = iota(&x.frobenius());
    assert!(lhs.sub(&rhs).is_zero());
    let y = x.mul(&x.frobenius());
    assert!(iota(&y).sub(&iota(&x).mul(&iota(&x.frobenius()))).is_zero());
}
