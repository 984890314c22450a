//! cos(πa/b) and sin(πa/b) as exact cyclotomic numbers.

use num_integer::Integer;

use super::cyclotomic::CyclotomicElement;
use super::rational::Rational;
use crate::error::{Error, Result};

fn reduced(a: i64, b: i64) -> Result<(i64, i64)> {
    if b < 1 {
        return Err(Error::ZeroConductor);
    }
    let g = a.gcd(&b);
    Ok((a / g, b / g))
}

fn conductor_of(b: i64) -> Result<u32> {
    u32::try_from(b).map_err(|_| Error::Overflow("conductor"))
}

/// cos(πa/b) = (ζ_{2b}^a + ζ_{2b}^{-a})/2, with a/b reduced first so the
/// conductor is 2b' for the reduced denominator b'.
pub fn cos_pi(a: i64, b: i64) -> Result<CyclotomicElement> {
    let (a, b) = reduced(a, b)?;
    cos_pi_in(a, b, conductor_of(2 * b)?)
}

/// sin(πa/b) = cos(π(b - 2a)/(2b)), living in Q(ζ_{4b'}).
pub fn sin_pi(a: i64, b: i64) -> Result<CyclotomicElement> {
    let (a, b) = reduced(a, b)?;
    cos_pi(b - 2 * a, 2 * b)
}

/// cos(πa/b) inside Q(ζ_N); needs 2b' | N for the reduced denominator b'.
pub fn cos_pi_in(a: i64, b: i64, conductor: u32) -> Result<CyclotomicElement> {
    let (a, b) = reduced(a, b)?;
    let n = conductor as i64;
    if n % (2 * b) != 0 {
        return Err(Error::ConductorMismatch { left: conductor_of(2 * b)?, right: conductor });
    }
    let e = a * (n / (2 * b));
    let half = Rational::new(1, 2)?;
    CyclotomicElement::from_exponents(conductor, [(e, &half), (-e, &half)])
}

/// sin(πa/b) inside Q(ζ_N); needs 4b' | N.
pub fn sin_pi_in(a: i64, b: i64, conductor: u32) -> Result<CyclotomicElement> {
    let (a, b) = reduced(a, b)?;
    cos_pi_in(b - 2 * a, 2 * b, conductor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn cos_values() {
        assert_eq!(cos_pi(1, 3).unwrap().to_rational().unwrap(), q(1, 2));
        assert_eq!(cos_pi(4, 3).unwrap().to_rational().unwrap(), q(-1, 2));
        assert_eq!(cos_pi(0, 5).unwrap().to_rational().unwrap(), q(1, 1));
        assert!(matches!(cos_pi(1, 5).unwrap().to_rational(), Err(Error::NotRational { .. })));
    }

    #[test]
    fn sin_values() {
        assert_eq!(sin_pi(1, 2).unwrap().to_rational().unwrap(), q(1, 1));
        assert_eq!(sin_pi(0, 7).unwrap().to_rational().unwrap(), q(0, 1));
        let s = sin_pi(4, 3).unwrap();
        assert_eq!((&s * &s).to_rational().unwrap(), q(3, 4));
        assert!(s.real_part_f64() < 0.0);
        assert!((s.real_part_f64() + 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert_eq!(s.conductor(), 12);
    }

    #[test]
    fn into_larger_field() {
        let c = cos_pi_in(4, 3, 12).unwrap();
        assert_eq!(c.to_rational().unwrap(), q(-1, 2));
        assert!(cos_pi_in(1, 3, 9).is_err());
        assert!(sin_pi_in(1, 3, 6).is_err());
        assert_eq!(sin_pi_in(-2, 3, 12).unwrap(), sin_pi(4, 3).unwrap());
    }

    #[test]
    fn rejects_bad_denominator() {
        assert!(cos_pi(1, 0).is_err());
        assert!(sin_pi(1, -3).is_err());
    }
}
