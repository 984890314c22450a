//! Integer group ring Z[Z/N] with overflow-checked i128 coefficients.
//!
//! Products here are cyclic convolutions, so the ℓ¹ norm is submultiplicative
//! and coefficient growth stays predictable. Values are pushed into Q(ζ_N)
//! only once, at the end, through the power table of Φ_N.

use num_bigint::BigInt;
use num_integer::Integer;

use super::cyclotomic::CyclotomicElement;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct GroupRing {
    n: usize,
    c: Vec<i128>,
}

fn ovf() -> Error {
    Error::Overflow("group ring")
}

impl GroupRing {
    pub fn zero(n: usize) -> Self {
        GroupRing { n, c: vec![0; n] }
    }

    fn idx(&self, e: i64) -> usize {
        e.mod_floor(&(self.n as i64)) as usize
    }

    pub fn add_term(&mut self, e: i64, coeff: i128) -> Result<()> {
        let i = self.idx(e);
        self.c[i] = self.c[i].checked_add(coeff).ok_or_else(ovf)?;
        Ok(())
    }

    pub fn from_terms(n: usize, terms: &[(i64, i128)]) -> Result<Self> {
        let mut g = Self::zero(n);
        for &(e, c) in terms {
            g.add_term(e, c)?;
        }
        Ok(g)
    }

    pub fn add_scaled(&mut self, other: &GroupRing, k: i128) -> Result<()> {
        for (a, &b) in self.c.iter_mut().zip(&other.c) {
            if b != 0 {
                *a = a.checked_add(b.checked_mul(k).ok_or_else(ovf)?).ok_or_else(ovf)?;
            }
        }
        Ok(())
    }

    pub fn mul(&self, other: &GroupRing) -> Result<GroupRing> {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let lhs: Vec<(usize, i128)> = self.c.iter().copied().enumerate().filter(|&(_, v)| v != 0).collect();
        let rhs: Vec<(usize, i128)> = other.c.iter().copied().enumerate().filter(|&(_, v)| v != 0).collect();
        let mut out = vec![0i128; n];
        for &(i, a) in &lhs {
            for &(j, b) in &rhs {
                let k = if i + j >= n { i + j - n } else { i + j };
                out[k] = out[k].checked_add(a.checked_mul(b).ok_or_else(ovf)?).ok_or_else(ovf)?;
            }
        }
        Ok(GroupRing { n, c: out })
    }

    /// Image in Q(ζ_N), divided by `denominator`.
    pub fn to_field(&self, denominator: &BigInt) -> Result<CyclotomicElement> {
        let conductor = u32::try_from(self.n).map_err(|_| Error::Overflow("conductor"))?;
        let ints: Vec<BigInt> = self.c.iter().map(|&v| BigInt::from(v)).collect();
        CyclotomicElement::from_integer_vector(conductor, &ints, denominator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;

    #[test]
    fn cyclic_product_matches_field_product() {
        let a = GroupRing::from_terms(12, &[(1, 2), (5, -1), (11, 3)]).unwrap();
        let b = GroupRing::from_terms(12, &[(0, 1), (7, 4)]).unwrap();
        let one = BigInt::from(1);
        let lhs = a.mul(&b).unwrap().to_field(&one).unwrap();
        let rhs = &a.to_field(&one).unwrap() * &b.to_field(&one).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn geometric_inverse() {
        // (ω - 1) · Σ j ω^j = N for ω = ζ_N^e, ω ≠ 1
        let n = 15usize;
        for e in [1i64, 2, 4, 7] {
            let mut s = GroupRing::zero(n);
            for j in 0..n as i64 {
                s.add_term(e * j, j as i128).unwrap();
            }
            let w = GroupRing::from_terms(n, &[(e, 1), (0, -1)]).unwrap();
            let prod = w.mul(&s).unwrap().to_field(&BigInt::from(1)).unwrap();
            assert_eq!(prod.to_rational().unwrap(), Rational::from(n as i64));
        }
    }

    #[test]
    fn overflow_is_reported() {
        let a = GroupRing::from_terms(3, &[(0, i128::MAX / 2)]).unwrap();
        assert_eq!(a.mul(&a), Err(Error::Overflow("group ring")));
    }
}
