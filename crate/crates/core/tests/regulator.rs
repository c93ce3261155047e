use std::sync::{Arc, OnceLock};

use iwk_core::crystalline::CrysModule;
use iwk_core::iwasawa::{ell_element, measure_value, DeRhamChar, FractionElt, IwasawaCtx, IwasawaElt};
use iwk_core::oracle::{bernoulli_plus, kubota_leopoldt_value};
use iwk_core::padic::PadicScalar;
use iwk_core::regulator::{
    big_exponential, check_norm_compatible, cyclo_regulator, deriv_inverse, dlog, ell_product_apply, eps_sign_element, interpolation_prefactor,
    ladder_via_ell_product, ladder_via_t_power, theta_and_eps_scalar, twist_ladder, ColemanSeries,
};
use iwk_core::{Error, Series, UnramField, UnramifiedElt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

const D: usize = 64;

fn ctx(p: u32) -> Arc<IwasawaCtx> {
    static C: OnceLock<Vec<Arc<IwasawaCtx>>> = OnceLock::new();
    let all = C.get_or_init(|| [3u32, 5, 7].iter().map(|&p| IwasawaCtx::new(p, 30, 32, D).unwrap()).collect());
    all.iter().find(|c| c.p() == p).unwrap().clone()
}

fn int(c: &IwasawaCtx, k: i64) -> PadicScalar {
    PadicScalar::from_i64(c.padic(), k)
}

fn close_upto(a: &Series, b: &Series, deg: usize, digits: i64) -> bool {
    (0..=deg).all(|i| {
        let d = a.coeff(i).sub(b.coeff(i));
        d.is_zero() && d.abs_prec() >= digits
    })
}

/// `Π g_c^{a_c} · (1+π)^b` with `c` running over `2, 3, 4`.
fn coleman_product(c: &IwasawaCtx, exps: &[i64], b: i64) -> ColemanSeries {
    let pc = c.padic();
    let mut acc = ColemanSeries::one_plus_pi(pc, D).pow(b).unwrap();
    for (k, &a) in exps.iter().enumerate() {
        let cc = [2i64, 3, 4][k];
        if cc % c.p() as i64 == 0 || a == 0 {
            continue;
        }
        acc = acc.mul(&ColemanSeries::g_c(pc, D, cc).unwrap().pow(a).unwrap());
    }
    acc
}

#[test]
fn dlog_examples() {
    let c = ctx(5);
    let pc = c.padic();
    let u = ColemanSeries::new(Series::constant(&int(&c, 7), D)).unwrap();
    assert!(dlog(&u).unwrap().is_zero());
    let y = dlog(&ColemanSeries::one_plus_pi(pc, D)).unwrap();
    assert!(close_upto(&y, &Series::one(pc, D), D - 1, 30));
    assert!(ColemanSeries::new(Series::pi(pc, D)).is_err());
}

#[test]
fn dlog_of_g_c_matches_bernoulli_generating_function() {
    let c = ctx(5);
    let pc = c.padic();
    let y = dlog(&ColemanSeries::g_c(pc, D, 2).unwrap()).unwrap();
    let t = Series::log1p(pc, D);
    let mut expect = Series::zero(pc, D);
    let mut fact = BigInt::one();
    let mut tpow = Series::one(pc, D);
    for k in 1..=10usize {
        fact *= k;
        let coeff = bernoulli_plus(k) * BigRational::from_integer(BigInt::from(2).pow(k as u32) - 1) / BigRational::from_integer(fact.clone());
        expect = expect.add(&tpow.scale(&PadicScalar::from_rational(pc, &coeff)));
        tpow = tpow.mul(&t);
    }
    assert!(close_upto(&y, &expect, 8, 15));
}

#[test]
fn norm_compatibility_examples() {
    for p in [3u32, 5] {
        let c = ctx(p);
        let pc = c.padic();
        assert!(check_norm_compatible(ColemanSeries::one_plus_pi(pc, D).series()).unwrap());
        assert!(check_norm_compatible(ColemanSeries::g_c(pc, D, 2).unwrap().series()).unwrap());
        let generic = Series::from_i64s(pc, D, &[1, 2]);
        assert!(!check_norm_compatible(&generic).unwrap());
        let mixed = coleman_product(&c, &[-1, 2, 0], 3);
        assert!(mixed.clone().checked().unwrap().is_norm_compatible());
    }
}

#[test]
fn regulator_of_phi_fixed_input_is_zero() {
    let c = ctx(5);
    let y = Series::constant(&int(&c, 3), D);
    let reg = cyclo_regulator(&c, &y, 2).unwrap();
    assert!(reg.psi_zero.is_zero());
    assert!(reg.measure.is_zero());
}

#[test]
fn regulator_rejects_non_psi_fixed_input() {
    let c = ctx(5);
    assert!(matches!(cyclo_regulator(&c, &Series::pi(c.padic(), D), 1), Err(Error::NotPsiFixed(_))));
}

#[test]
fn bernoulli_values() {
    for p in [3u32, 5, 7] {
        let c = ctx(p);
        let pc = c.padic();
        let y = dlog(&ColemanSeries::g_c(pc, D, 2).unwrap()).unwrap();
        let reg = cyclo_regulator(&c, &y, 1).unwrap();
        for j in 1..=6usize {
            let got = reg.evaluate(&c, &DeRhamChar::chi_power(pc, j as i64)).unwrap().to_scalar().unwrap();
            let want = PadicScalar::from_rational(pc, &kubota_leopoldt_value(p, 2, j));
            assert!(got.agree(&want) >= 25, "p={p} j={j}: {got} vs {want}");
        }
    }
    let c = ctx(5);
    let v = iwk_core::regulator::bernoulli_pipeline(&c, 2, 1, 1).unwrap();
    assert!(v.agree(&int(&c, -1)) >= 25);
}

#[test]
fn twisted_regulator_shifts_evaluations() {
    let c = ctx(5);
    let pc = c.padic();
    let y = dlog(&coleman_product(&c, &[1, -2, 1], 2)).unwrap();
    let reg = cyclo_regulator(&c, &y, 1).unwrap();
    let up = reg.twist_up();
    assert_eq!(up.t_shift, 1);
    for j in 1..6i64 {
        let lhs = up.evaluate(&c, &DeRhamChar::chi_power(pc, j)).unwrap();
        let rhs = reg.evaluate(&c, &DeRhamChar::chi_power(pc, j - 1)).unwrap().scale(&int(&c, j));
        assert!(lhs.agree(&rhs) >= 25, "j={j}");
    }
    let expect = ell_element(&c, 0).mul(&reg.measure.twist(-1));
    assert!(up.measure.equals(&expect));
}

#[test]
fn big_exponential_examples() {
    let c = ctx(5);
    let pc = c.padic();
    let one = int(&c, 1);
    assert!(big_exponential(&Series::zero(pc, D), &one, 2).unwrap().is_zero());
    let y = dlog(&ColemanSeries::g_c(pc, D, 2).unwrap()).unwrap();
    let reg = cyclo_regulator(&c, &y, 1).unwrap();
    let omega = big_exponential(&reg.psi_zero, &one, 2).unwrap();
    assert!(close_upto(&omega, &ell_product_apply(&y, 2), D - 2, 25));
    let obstructed = Series::one_plus_pi_pow_int(pc, D, 1);
    assert_eq!(big_exponential(&obstructed, &one, 1).unwrap_err(), Error::DeltaObstruction(vec![0]));
}

#[test]
fn deriv_inverse_examples() {
    let c = ctx(5);
    let pc = c.padic();
    for a in [1i64, 2, 3, 4, 6, 7] {
        let f = Series::one_plus_pi_pow_int(pc, D, a);
        let g = deriv_inverse(&f).unwrap();
        let expect = f.scale(&int(&c, a).inv().unwrap());
        assert!(close_upto(&g, &expect, D - 1, 25), "a={a}");
    }
    // Non-polynomial input: ψ of the truncation costs about D/p digits.
    let f = Series::one_plus_pi_pow_int(pc, D, -1);
    let g = deriv_inverse(&f).unwrap();
    assert!(close_upto(&g, &f.neg(), D / 5, 10));
    assert!(matches!(deriv_inverse(&Series::one(pc, D)), Err(Error::NotPsiKernel(_))));
}

#[test]
fn interpolation_prefactor_examples() {
    let c = ctx(5);
    let pc = c.padic();
    let f = UnramField::generate(pc, 1, 0).unwrap();
    let qp = CrysModule::tate(&f, 0);
    for j in 1..4i64 {
        let pre = interpolation_prefactor(&c, &qp, &DeRhamChar::chi_power(pc, j)).unwrap();
        assert!(!pre.use_derivative);
        let pj = BigRational::from_integer(BigInt::from(5).pow(j as u32));
        let expect = (BigRational::one() - &pj) / (BigRational::one() - BigRational::one() / (pj * BigInt::from(5)));
        let expect = UnramifiedElt::from_scalar_in(f.clone(), &PadicScalar::from_rational(pc, &expect));
        assert!(pre.euler_ratio.unwrap().agree(&expect) >= 25);
    }
    let pre = interpolation_prefactor(&c, &qp, &DeRhamChar::chi_power(pc, 0)).unwrap();
    assert!(pre.bad_one && pre.use_derivative);
    let pre = interpolation_prefactor(&c, &CrysModule::tate(&f, 1), &DeRhamChar::chi_power(pc, 0)).unwrap();
    assert!(pre.bad_pinv && pre.use_derivative);
    let eta = DeRhamChar::new(pc, 0, 1, 0, 0).unwrap();
    let pre = interpolation_prefactor(&c, &CrysModule::tate(&f, 1), &eta).unwrap();
    let tau = iwk_core::epsilon::gauss_sum(&c, &eta.inverse(), iwk_core::epsilon::XiSign::Minus).unwrap();
    assert_eq!(pre.scalar.p_power, -1);
    assert!(pre.scalar.cyclo_part.sub(&tau).is_zero());
}

#[test]
fn theta_examples() {
    let c = ctx(5);
    let pc = c.padic();
    let f = UnramField::generate(pc, 1, 0).unwrap();
    let y = dlog(&ColemanSeries::g_c(pc, D, 2).unwrap()).unwrap();
    let reg = cyclo_regulator(&c, &y, 1).unwrap();
    let th = theta_and_eps_scalar(&c, &CrysModule::tate(&f, 0), &reg).unwrap();
    assert!(th.theta.equals(&FractionElt::from_elt(reg.measure.clone())));
    let th1 = theta_and_eps_scalar(&c, &CrysModule::tate(&f, 1), &reg).unwrap();
    let back = th1.theta.mul(&FractionElt::from_elt(ell_element(&c, 0)));
    assert!(back.equals(&FractionElt::from_elt(reg.measure.clone())));
    assert_eq!(th1.eps_dr.t_exponent, 1);
    let gm1 = IwasawaElt::group_element(&c, &int(&c, -1)).unwrap();
    assert!(th1.sign.equals(&gm1));
}

#[test]
fn sign_element_twists_by_parity() {
    let c = ctx(5);
    for d in 1..4usize {
        for m in -3..4i64 {
            let s = eps_sign_element(&c, d, m).unwrap();
            for j in -3..4i64 {
                let lhs = s.twist(-j);
                let rhs = eps_sign_element(&c, d, m + j * d as i64).unwrap();
                assert!(lhs.equals(&rhs), "d={d} m={m} j={j}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn omega_inverts_regulator(a in prop::collection::vec(-2i64..3, 3), b in -3i64..4, h in 1u32..4) {
        let c = ctx(5);
        let y = dlog(&coleman_product(&c, &a, b)).unwrap();
        let reg = cyclo_regulator(&c, &y, 1).unwrap();
        let omega = big_exponential(&reg.psi_zero, &int(&c, 1), h).unwrap();
        prop_assert!(close_upto(&omega, &ell_product_apply(&y, h), D - h as usize, 20));
    }

    #[test]
    fn deriv_inverse_is_a_section(v in prop::collection::vec(-20i64..20, 1..12)) {
        let c = ctx(5);
        let f0 = Series::from_i64s(c.padic(), D, &v);
        let f = f0.sub(&f0.psi().phi());
        let g = deriv_inverse(&f).unwrap();
        prop_assert!(close_upto(&g.deriv(), &f, D - 1, 20));
        prop_assert!(g.psi().is_zero());
    }

    #[test]
    fn ladder_routes_agree(v in prop::collection::vec(-20i64..20, 1..12), r in 1u32..4) {
        let c = ctx(5);
        let f0 = Series::from_i64s(c.padic(), D, &v);
        let f = f0.sub(&f0.psi().phi());
        let a = twist_ladder(&f, r).unwrap();
        let b = ladder_via_ell_product(&f, r).unwrap();
        let t = ladder_via_t_power(&f, r).unwrap();
        let direct = Series::log1p(c.padic(), D).pow(r).mul(&f);
        let deg = D - r as usize;
        prop_assert!(close_upto(&a, &b, deg, 20));
        prop_assert!(close_upto(&b, &t, deg, 20));
        prop_assert!(close_upto(&a, &direct, deg, 20));
    }

    #[test]
    fn twisted_measure_values(a in prop::collection::vec(-2i64..3, 3), b in -3i64..4, j in 1i64..6) {
        let c = ctx(3);
        let y = dlog(&coleman_product(&c, &a, b)).unwrap();
        let f = y.sub(&y.phi());
        let t = Series::log1p(c.padic(), D);
        let lhs = measure_value(&c, &t.mul(&f), &DeRhamChar::chi_power(c.padic(), j)).unwrap();
        let rhs = measure_value(&c, &f, &DeRhamChar::chi_power(c.padic(), j - 1)).unwrap().scale(&int(&c, j));
        prop_assert!(lhs.agree(&rhs) >= 25);
    }
}
