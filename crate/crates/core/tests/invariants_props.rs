use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use seven_inv::arith::Rational;
use seven_inv::family::{
    bezout_pair, census_stride, diffeo_decide_reports, family_coefficients, family_member, witness_holds, Verdict,
};
use seven_inv::invariants::{
    eells_kuiper, h4_order, invariant_report, linking_numerator, linking_value, m_value, s_invariant, validate_pair,
    ParamPair, Triple,
};

fn entry(r: i64) -> impl Strategy<Value = i64> + Clone {
    (-r..=r).prop_map(|j| 4 * j + 1)
}

fn pair_with(t1: impl Strategy<Value = i64> + Clone, r: i64) -> impl Strategy<Value = ParamPair> {
    (t1.clone(), entry(r), entry(r), t1, entry(r), entry(r)).prop_filter_map("valid, n != 0", |(a1, a2, a3, b1, b2, b3)| {
        let p = validate_pair(Triple::new(a1, a2, a3), Triple::new(b1, b2, b3)).ok()?;
        (h4_order(&p).ok()? != 0).then_some(p)
    })
}

fn pair(r: i64) -> impl Strategy<Value = ParamPair> {
    pair_with(entry(3), r)
}

/// Odd |n| and coprime a1, b1: the hypotheses of the census.
fn census_base() -> impl Strategy<Value = ParamPair> {
    pair_with(entry(2), 4).prop_filter("odd n, gcd(a1,b1)=1", |p| {
        h4_order(p).unwrap().is_odd() && p.a().t1.gcd(&p.b().t1) == 1
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_is_consistent(p in pair(10)) {
        let rep = invariant_report(&p).unwrap();
        prop_assert!(rep.check().is_ok());
        prop_assert_eq!(&rep.mu, &rep.s.mod_one());
        prop_assert_eq!(rep.s, s_invariant(&p).unwrap());
    }

    #[test]
    fn family_keeps_n_and_lk(p in pair(8), i in -3i64..=3) {
        let m = family_member(&p, i).unwrap();
        prop_assert_eq!(h4_order(&m).unwrap(), h4_order(&p).unwrap());
        prop_assert_eq!(linking_value(&m).unwrap(), linking_value(&p).unwrap());
    }

    #[test]
    fn family_is_nonconstant(p in pair(8)) {
        let c = family_coefficients(&p).unwrap();
        prop_assert!(c.b != BigInt::from(0) || c.c != BigInt::from(0));
    }

    #[test]
    fn lk_independent_of_bezout_choice(p in pair(10), k in -5i64..=5) {
        let a = p.a();
        let Ok((e1, e0)) = bezout_pair(a) else { return Ok(()) };
        let x = BigInt::from(a.t1).pow(2);
        let y = (BigInt::from(a.t2).pow(2) - BigInt::from(a.t3).pow(2)) / 8;
        prop_assert_eq!(&e1 * &x + &e0 * &y, BigInt::from(1));
        let (f1, f0) = (&e1 + &y * k, &e0 - &x * k);
        prop_assert_eq!(&f1 * &x + &f0 * &y, BigInt::from(1));
        let n = BigInt::from(h4_order(&p).unwrap());
        let diff = linking_numerator(&p, &e1, &e0) - linking_numerator(&p, &f1, &f0);
        prop_assert!(diff.is_multiple_of(&n));
    }

    #[test]
    fn milnor_case_has_no_defect(a2 in entry(20), a3 in entry(20), b2 in entry(20), b3 in entry(20)) {
        let Ok(p) = validate_pair(Triple::new(1, a2, a3), Triple::new(1, b2, b3)) else { return Ok(()) };
        let n = h4_order(&p).unwrap();
        if n == 0 { return Ok(()) }
        let m = m_value(&p);
        let expected = -(Rational::from(n.abs() as i64) - &m * &m) / Rational::from(224 * n as i64);
        prop_assert_eq!(s_invariant(&p).unwrap(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mu_constant_at_stride(p in census_base(), t in 1i64..=2) {
        let stride = census_stride(&p).unwrap();
        let m = family_member(&p, t * stride).unwrap();
        prop_assert_eq!(eells_kuiper(&m).unwrap(), eells_kuiper(&p).unwrap());
    }

    #[test]
    fn unit_search_witness_rechecks(p in census_base(), t in 1i64..=2) {
        let m = family_member(&p, t * census_stride(&p).unwrap()).unwrap();
        let (rp, rm) = (invariant_report(&p).unwrap(), invariant_report(&m).unwrap());
        let v = diffeo_decide_reports(&rp, &rm).unwrap();
        prop_assert!(v.is_diffeomorphic(), "{}", v);
        prop_assert!(witness_holds(&rp, &rm, &v));
        let back = diffeo_decide_reports(&rm, &rp).unwrap();
        prop_assert!(witness_holds(&rm, &rp, &back));
    }
}

#[test]
fn homotopy_spheres_have_mu_in_28ths() {
    let vals: Vec<i64> = (-2..=2).map(|j| 4 * j + 1).collect();
    let mut seen = 0;
    for &a1 in &vals {
        for &a2 in &vals {
            for &a3 in &vals {
                for &b1 in &vals {
                    for &b2 in &vals {
                        for &b3 in &vals {
                            let Ok(p) = validate_pair(Triple::new(a1, a2, a3), Triple::new(b1, b2, b3)) else {
                                continue;
                            };
                            if h4_order(&p).unwrap().abs() != 1 {
                                continue;
                            }
                            seen += 1;
                            let s28 = s_invariant(&p).unwrap() * Rational::from(28i64);
                            assert!(s28.is_integer(), "{p}: 28s = {s28}");
                        }
                    }
                }
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn different_orders_are_not_diffeomorphic() {
    let p = validate_pair(Triple::new(-3, -3, 1), Triple::new(1, 5, 5)).unwrap();
    let q = validate_pair(Triple::new(1, 1, 1), Triple::new(1, 5, 1)).unwrap();
    let v = diffeo_decide_reports(&invariant_report(&p).unwrap(), &invariant_report(&q).unwrap()).unwrap();
    assert!(matches!(v, Verdict::NotDiffeomorphic { .. }));
}
