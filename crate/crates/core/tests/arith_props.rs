use proptest::prelude::*;
use seven_inv::arith::{cos_pi, sin_pi, totient, CyclotomicElement, Rational};
use seven_inv::Error;

fn element(n: u32) -> impl Strategy<Value = CyclotomicElement> {
    let d = totient(n) as usize;
    prop::collection::vec((-6i64..=6, 1i64..=4), d)
        .prop_map(move |cs| {
            let coeffs = cs.into_iter().map(|(a, b)| Rational::new(a, b).unwrap()).collect();
            CyclotomicElement::from_coeffs(n, coeffs).unwrap()
        })
}

fn triple() -> impl Strategy<Value = (CyclotomicElement, CyclotomicElement, CyclotomicElement)> {
    (1u32..=60).prop_flat_map(|n| (element(n), element(n), element(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms((x, y, z) in triple()) {
        let n = x.conductor();
        prop_assert_eq!(&(&x + &y), &(&y + &x));
        prop_assert_eq!(&(&x * &y), &(&y * &x));
        prop_assert_eq!(&(&(&x * &y) * &z), &(&x * &(&y * &z)));
        prop_assert_eq!(&(&x * &(&y + &z)), &(&(&x * &y) + &(&x * &z)));
        prop_assert_eq!(&(&x - &x), &CyclotomicElement::zero(n).unwrap());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y.inverse().unwrap()), &x.checked_div(&y).unwrap());
            prop_assert_eq!(&(&y * &y.inverse().unwrap()), &CyclotomicElement::one(n).unwrap());
        }
    }

    #[test]
    fn conjugation_is_a_ring_map((x, y, _z) in triple()) {
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert!((&x + &x.conj()).is_real());
    }

    #[test]
    fn pythagoras(a in -300i64..=300, b in 1i64..=40) {
        let (c, s) = (cos_pi(a, b).unwrap(), sin_pi(a, b).unwrap());
        let n = num_integer::lcm(c.conductor(), s.conductor());
        let (c, s) = (c.embed(n).unwrap(), s.embed(n).unwrap());
        prop_assert_eq!(&(&c * &c) + &(&s * &s), CyclotomicElement::one(n).unwrap());
        let theta = std::f64::consts::PI * a as f64 / b as f64;
        prop_assert!((c.real_part_f64() - theta.cos()).abs() < 1e-12);
        prop_assert!((s.real_part_f64() - theta.sin()).abs() < 1e-12);
    }

    #[test]
    fn double_angle(a in -100i64..=100, b in 1i64..=30) {
        let c2 = cos_pi(2 * a, b).unwrap();
        let c = cos_pi(a, b).unwrap();
        let s = sin_pi(a, b).unwrap();
        let n = num_integer::lcm(num_integer::lcm(c.conductor(), s.conductor()), c2.conductor());
        let (c, s, c2) = (c.embed(n).unwrap(), s.embed(n).unwrap(), c2.embed(n).unwrap());
        prop_assert_eq!(&(&c * &c) - &(&s * &s), c2);
    }
}

#[test]
fn rational_values_are_recognised() {
    let c = cos_pi(1, 3).unwrap();
    assert_eq!(c.to_rational().unwrap(), Rational::new(1, 2).unwrap());
    assert!(matches!(cos_pi(1, 5).unwrap().to_rational(), Err(Error::NotRational { .. })));
    assert_eq!(CyclotomicElement::zero(7).unwrap().inverse(), Err(Error::DivisionByZero));
}
