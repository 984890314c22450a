//! The defect sums D(q; p₁, p₂, p₃).
//!
//! ```text
//! D = 1/(2⁵·7·q²) Σ_{l=1}^{(|q|-1)/2} Σ_cyc p_i (14 cos x_i + cos x_j cos x_k) / (sin² x_i sin x_j sin x_k),
//! x_t = p_t π l / q
//! ```
//!
//! Three evaluators share this module:
//!
//! * [`defect_d_exact`] works in Z[Z/4|q|]. With w = e^{iπpl/q} and
//!   ω = w², the reciprocal sine is `1/sin = 2iw/(ω - 1)` and
//!   `1/(ω - 1) = (1/|q|) Σ_j j ω^j`, so every summand is an integer
//!   group-ring element over a fixed denominator. The total is pushed into
//!   Q(ζ_{4|q|}) once and must come out rational.
//! * [`defect_d_reference`] evaluates the formula literally with
//!   [`cos_pi_in`]/[`sin_pi_in`] and field division.
//!   It is slow and used as a cross-check and as the overflow fallback.
//! * [`defect_d_float`] is the plain double-precision sum for sweeps.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::group_ring::GroupRing;
use crate::arith::{cos_pi_in, sin_pi_in, CyclotomicElement, Rational};
use crate::error::{Error, Result};

/// Below this |q| the l-sum runs sequentially.
const PARALLEL_MIN_Q: i64 = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DefectArgs {
    q: i64,
    p: [i64; 3],
}

impl DefectArgs {
    /// `q` odd and nonzero, each `p_t` coprime to `q` (no sine in the sum vanishes),
    /// and p1 + p2 + p3 even.
    pub fn new(q: i64, p: [i64; 3]) -> Result<Self> {
        if q == 0 || q % 2 == 0 {
            return Err(Error::InvalidDefectModulus(q));
        }
        if let Some(&bad) = p.iter().find(|&&pt| pt.gcd(&q) != 1) {
            return Err(Error::DegenerateDefect { q, p: bad });
        }
        let weight = p.iter().sum::<i64>();
        if weight % 2 != 0 {
            return Err(Error::OddDefectWeight(weight));
        }
        Ok(DefectArgs { q, p })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn p(&self) -> [i64; 3] {
        self.p
    }

    fn upper(&self) -> i64 {
        (self.q.abs() - 1) / 2
    }
}

const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// Exact value of D as a rational.
pub fn defect_d_exact(args: &DefectArgs) -> Result<Rational> {
    if args.upper() == 0 {
        return Ok(Rational::zero());
    }
    match defect_d_group_ring(args) {
        Err(Error::Overflow(_)) => defect_d_reference(args),
        other => other,
    }
}

/// Convenience wrapper validating the arguments first.
pub fn defect_d(q: i64, p: [i64; 3]) -> Result<Rational> {
    defect_d_exact(&DefectArgs::new(q, p)?)
}

fn defect_d_group_ring(args: &DefectArgs) -> Result<Rational> {
    let big_q = args.q.abs();
    let n = 4 * big_q as usize;
    let sign = args.q.signum();
    let pe: Vec<i128> = args.p.iter().map(|&p| p as i128 * sign as i128).collect();
    let prefactor: Vec<i128> = args.p.iter().map(|&p| p as i128).collect();
    let bq = big_q as i128;

    let term = |l: i64| -> Result<GroupRing> {
        let l = l as i128;
        let mut cos2 = Vec::with_capacity(3);
        let mut inv_sin = Vec::with_capacity(3);
        for &p in &pe {
            // w = ζ_{4Q}^{e}, e = 2pl; reduce early so exponent arithmetic stays in i64
            let e = ((2 * p * l).rem_euclid(n as i128)) as i64;
            cos2.push(GroupRing::from_terms(n, &[(e, 1), (-e, 1)])?);
            let mut v = GroupRing::zero(n);
            for j in 1..bq {
                v.add_term(big_q + e + 2 * e * j as i64 % n as i64, j)?;
            }
            inv_sin.push(v);
        }
        let prod = inv_sin[0].mul(&inv_sin[1])?.mul(&inv_sin[2])?;
        let mut w = GroupRing::zero(n);
        for &(i, j, k) in &CYCLIC {
            let mut num = cos2[j].mul(&cos2[k])?;
            num.add_scaled(&cos2[i], 28)?;
            w.add_scaled(&num.mul(&inv_sin[i])?, prefactor[i])?;
        }
        prod.mul(&w)
    };

    let add = |a: GroupRing, b: GroupRing| -> Result<GroupRing> {
        let mut a = a;
        a.add_scaled(&b, 1)?;
        Ok(a)
    };

    let total = if big_q >= PARALLEL_MIN_Q {
        (1..=args.upper())
            .into_par_iter()
            .map(term)
            .try_reduce(|| GroupRing::zero(n), add)?
    } else {
        (1..=args.upper()).map(term).try_fold(GroupRing::zero(n), |acc, t| add(acc, t?))?
    };

    let denominator = BigInt::from(56) * BigInt::from(big_q).pow(6);
    let value = total.to_field(&denominator)?;
    value
        .to_rational()
        .map_err(|e| Error::Internal(format!("defect sum D(q={}, p={:?}) not rational: {e}", args.q, args.p)))
}

/// Literal evaluation of the double sum with field division.
pub fn defect_d_reference(args: &DefectArgs) -> Result<Rational> {
    let big_q = args.q.abs();
    if args.upper() == 0 {
        return Ok(Rational::zero());
    }
    let conductor = u32::try_from(4 * big_q).map_err(|_| Error::Overflow("conductor"))?;
    let sign = args.q.signum();
    let mut total = CyclotomicElement::zero(conductor)?;
    for l in 1..=args.upper() {
        let mut c = Vec::with_capacity(3);
        let mut s = Vec::with_capacity(3);
        for &p in &args.p {
            let a = p * l * sign;
            c.push(cos_pi_in(a, big_q, conductor)?);
            s.push(sin_pi_in(a, big_q, conductor)?);
        }
        for &(i, j, k) in &CYCLIC {
            let fourteen = CyclotomicElement::from_rational(conductor, Rational::from(14i64))?;
            let num = (&fourteen * &c[i]).checked_add(&c[j].checked_mul(&c[k])?)?;
            let den = s[i].checked_mul(&s[i])?.checked_mul(&s[j])?.checked_mul(&s[k])?;
            let frac = num.checked_div(&den).map_err(|e| match e {
                Error::DivisionByZero => Error::DegenerateDefect { q: args.q, p: args.p[i] },
                other => other,
            })?;
            total = total.checked_add(&frac.scale(&Rational::from(args.p[i])))?;
        }
    }
    let norm = Rational::new(1, 224 * args.q * args.q)?;
    total.scale(&norm).to_rational()
}

/// Double-precision evaluation of the same sum.
pub fn defect_d_float(args: &DefectArgs) -> f64 {
    let q = args.q as f64;
    let mut total = 0.0;
    for l in 1..=args.upper() {
        let x: Vec<f64> = args.p.iter().map(|&p| p as f64 * std::f64::consts::PI * l as f64 / q).collect();
        let (c, s): (Vec<f64>, Vec<f64>) = x.iter().map(|x| (x.cos(), x.sin())).unzip();
        for &(i, j, k) in &CYCLIC {
            total += args.p[i] as f64 * (14.0 * c[i] + c[j] * c[k]) / (s[i] * s[i] * s[j] * s[k]);
        }
    }
    total / (224.0 * q * q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn args(qv: i64, p: [i64; 3]) -> DefectArgs {
        DefectArgs::new(qv, p).unwrap()
    }

    #[test]
    fn empty_sum() {
        assert_eq!(defect_d(1, [4, -2, 4]).unwrap(), Rational::zero());
        assert_eq!(defect_d(-1, [4, 2, 6]).unwrap(), Rational::zero());
        assert_eq!(defect_d_float(&args(1, [4, 2, 6])), 0.0);
    }

    #[test]
    fn single_term_value() {
        // l = 1: cos = -1/2 for all three angles, sines ∓√3/2; (-48 + 24 - 48)/(2⁵·7·9)
        assert_eq!(defect_d(3, [4, -2, 4]).unwrap(), q(-1, 28));
        assert_eq!(defect_d(-3, [4, -2, 4]).unwrap(), q(-1, 28));
        assert!((defect_d_float(&args(3, [4, -2, 4])) + 1.0 / 28.0).abs() < 1e-12);
    }

    #[test]
    fn float_sign_flip() {
        let a = defect_d_float(&args(5, [4, -2, -4]));
        let b = defect_d_float(&args(5, [4, -2, 4]));
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn kernel_matches_reference() {
        for (qv, p) in [
            (3, [4, -2, 4]),
            (5, [4, -4, 2]),
            (-7, [1, 2, 3]),
            (9, [4, -8, 20]),
            (15, [2, 7, -11]),
            (11, [13, -5, 4]),
        ] {
            let a = args(qv, p);
            assert_eq!(defect_d_group_ring(&a).unwrap(), defect_d_reference(&a).unwrap(), "q={qv} p={p:?}");
        }
    }

    #[test]
    fn frozen_values() {
        // 40-digit float evaluation, identified as rationals
        assert_eq!(defect_d(3, [4, -2, 10]).unwrap(), q(-1, 14));
        assert_eq!(defect_d(5, [4, -4, 2]).unwrap(), q(73, 700));
        assert_eq!(defect_d(5, [4, -4, 12]).unwrap(), q(7, 50));
        assert_eq!(defect_d(9, [4, -8, 2]).unwrap(), q(2, 63));
        assert_eq!(defect_d(9, [4, -8, 20]).unwrap(), q(8, 63));
        assert_eq!(defect_d(15, [2, 7, -11]).unwrap(), q(-61, 175));
        assert_eq!(defect_d(11, [13, -5, 4]).unwrap(), q(1115, 3388));
        assert_eq!(defect_d(21, [4, -20, 2]).unwrap(), q(3, 4));
        assert_eq!(defect_d(25, [4, -24, 2]).unwrap(), q(4617, 4375));
        assert_eq!(defect_d(7, [1, 2, 3]).unwrap(), Rational::zero());
    }

    #[test]
    fn argument_errors() {
        assert_eq!(DefectArgs::new(4, [1, 1, 1]), Err(Error::InvalidDefectModulus(4)));
        assert_eq!(DefectArgs::new(0, [1, 1, 1]), Err(Error::InvalidDefectModulus(0)));
        assert_eq!(DefectArgs::new(9, [4, 3, 1]), Err(Error::DegenerateDefect { q: 9, p: 3 }));
        assert_eq!(DefectArgs::new(5, [0, 1, 2]), Err(Error::DegenerateDefect { q: 5, p: 0 }));
        // every p is a unit mod ±1
        assert!(DefectArgs::new(1, [0, 0, 0]).is_ok());
        assert_eq!(DefectArgs::new(7, [1, 2, 2]), Err(Error::OddDefectWeight(5)));
    }

    #[test]
    fn large_modulus_is_rational() {
        let a = args(99, [4, -40, 58]);
        let exact = defect_d_exact(&a).unwrap();
        assert_eq!(exact, q(57611, 30492));
        let float = defect_d_float(&a);
        assert!((exact.to_f64() - float).abs() <= 1e-9 * float.abs().max(1.0));
    }
}
