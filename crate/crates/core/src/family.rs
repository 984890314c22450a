//! Families M_{a_i,b_i}, diffeomorphism decisions and moduli censuses.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::invariants::{
    eells_kuiper, h4_order, invariant_report, m_value, validate_pair, InvariantReport, ParamPair, Triple,
};

/// 28μ for the Milnor spheres (S³-bundles over S⁴).
pub const MILNOR_SET: [u8; 20] = [0, 1, 3, 4, 6, 7, 8, 10, 11, 13, 14, 15, 17, 18, 20, 21, 22, 24, 25, 27];
/// 28μ for the exotic spheres that are not Milnor spheres.
pub const NON_MILNOR_SET: [u8; 8] = [2, 5, 9, 12, 16, 19, 23, 26];

/// Largest |n| for which the unit search is attempted.
pub const MAX_UNIT_SEARCH: u64 = 50_000_000;

fn checked(x: Option<i64>) -> Result<i64> {
    x.ok_or(Error::Overflow("family member"))
}

/// aᵢ = (a₁, a₂ + a₁²(b₃-b₂)i, a₃ + a₁²(b₃-b₂)i), bᵢ = (b₁, b₂ + b₁²(a₃-a₂)i, b₃ + b₁²(a₃-a₂)i).
pub fn family_member(pair: &ParamPair, i: i64) -> Result<ParamPair> {
    let (a, b) = (pair.a(), pair.b());
    let shift = |t1: i64, d: i64| -> Result<i64> {
        checked(t1.checked_mul(t1).and_then(|x: i64| x.checked_mul(d)).and_then(|x: i64| x.checked_mul(i)))
    };
    let sa = shift(a.t1, checked(b.t3.checked_sub(b.t2))?)?;
    let sb = shift(b.t1, checked(a.t3.checked_sub(a.t2))?)?;
    let ai = Triple::new(a.t1, checked(a.t2.checked_add(sa))?, checked(a.t3.checked_add(sa))?);
    let bi = Triple::new(b.t1, checked(b.t2.checked_add(sb))?, checked(b.t3.checked_add(sb))?);
    validate_pair(ai, bi)
}

/// (e₁, e₀) with e₁a₁² + e₀(a₂²-a₃²)/8 = 1; e₁ is reduced into [0, |y|) when y ≠ 0.
pub fn bezout_pair(a: &Triple) -> Result<(BigInt, BigInt)> {
    let x = BigInt::from(a.t1).pow(2);
    let (a2, a3) = (BigInt::from(a.t2), BigInt::from(a.t3));
    let y: BigInt = (&a2 * &a2 - &a3 * &a3) / 8;
    let to_i128 = |v: &BigInt| -> i128 { v.to_i128().unwrap_or(i128::MAX) };
    if y.is_zero() {
        return if x.is_one() {
            Ok((BigInt::one(), BigInt::zero()))
        } else {
            Err(Error::NoBezout(to_i128(&x), 0))
        };
    }
    let e = x.extended_gcd(&y);
    if !e.gcd.is_one() {
        return Err(Error::NoBezout(to_i128(&x), to_i128(&y)));
    }
    let e1 = e.x.mod_floor(&y.abs());
    let e0 = (BigInt::one() - &e1 * &x) / &y;
    debug_assert_eq!(&e1 * &x + &e0 * &y, BigInt::one());
    Ok((e1, e0))
}

/// Bezout coefficient of the i-th member given (e₁, e₀) for the base:
/// e₁ - e₀·(i/4)(b₃-b₂)(a₂-a₃), paired with the unchanged e₀.
pub fn shifted_e1(pair: &ParamPair, e1: &BigInt, e0: &BigInt, i: i64) -> BigInt {
    let (a, b) = (pair.a(), pair.b());
    let prod = BigInt::from(b.t3 - b.t2) * BigInt::from(a.t2 - a.t3) * BigInt::from(i);
    debug_assert!(prod.is_multiple_of(&BigInt::from(4)));
    e1 - e0 * (prod / 4)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCoefficients {
    #[serde(with = "bigint_str")]
    pub a: BigInt,
    #[serde(with = "bigint_str")]
    pub b: BigInt,
    #[serde(with = "bigint_str")]
    pub c: BigInt,
}

impl FamilyCoefficients {
    /// A + Bi + Ci².
    pub fn eval(&self, i: i64) -> BigInt {
        let i = BigInt::from(i);
        &self.a + &self.b * &i + &self.c * &i * &i
    }
}

pub(crate) mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn quarter(x: BigInt, what: &str) -> Result<BigInt> {
    let (q, r) = x.div_rem(&BigInt::from(4));
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::Internal(format!("{what} is not divisible by 4")))
    }
}

/// Coefficients with a₁²b₁²m(aᵢ, bᵢ) = A + Bi + Ci².
pub fn family_coefficients(pair: &ParamPair) -> Result<FamilyCoefficients> {
    let (a, b) = (pair.a(), pair.b());
    let big = BigInt::from;
    let (a1s, b1s) = (big(a.t1).pow(2), big(b.t1).pow(2));
    let scaled_m = m_value(pair) * Rational::from(&a1s * &b1s);
    let ca = scaled_m
        .to_integer()
        .ok_or_else(|| Error::Internal(format!("a1²b1²m = {scaled_m} is not an integer")))?;
    let (da, db) = (big(a.t3 - a.t2), big(b.t3 - b.t2));
    let cb = quarter(
        &a1s * &b1s * big(b.t2 + b.t3) * &da - &b1s * &a1s * big(a.t2 + a.t3) * &db,
        "B determinant",
    )?;
    let cc = quarter(&a1s * b1s.pow(2) * da.pow(2) - &b1s * a1s.pow(2) * db.pow(2), "C determinant")?;
    let coeffs = FamilyCoefficients { a: ca, b: cb, c: cc };
    for i in [-2i64, -1, 1, 2] {
        let member = family_member(pair, i)?;
        let lhs = m_value(&member) * Rational::from(&a1s * &b1s);
        if lhs != Rational::from(coeffs.eval(i)) {
            return Err(Error::Internal(format!("a1²b1²m(a_{i}, b_{i}) = {lhs} != A + Bi + Ci²")));
        }
    }
    Ok(coeffs)
}

/// Predicted s(i) - s(0) = ((A+Bi+Ci²)² - A²)/(2⁵·7·n·a₁²b₁²).
pub fn s_polynomial_increment(pair: &ParamPair, coeffs: &FamilyCoefficients, i: i64) -> Result<Rational> {
    let n = h4_order(pair)?;
    if n == 0 {
        return Err(Error::InfiniteH4);
    }
    let x = coeffs.eval(i);
    let a1b1 = BigInt::from(pair.a().t1).pow(2) * BigInt::from(pair.b().t1).pow(2);
    Rational::new(&x * &x - &coeffs.a * &coeffs.a, BigInt::from(224) * BigInt::from(n) * a1b1)
}

/// 2⁵·7·|n|·a₁²b₁².
pub fn census_stride(pair: &ParamPair) -> Result<i64> {
    let n = h4_order(pair)?;
    let v = 224i128 * n.abs() * (pair.a().t1 as i128).pow(2) * (pair.b().t1 as i128).pow(2);
    i64::try_from(v).map_err(|_| Error::Overflow("census stride"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    Diffeomorphic {
        #[serde(with = "bigint_str")]
        witness: BigInt,
        sign: i32,
    },
    NotDiffeomorphic {
        reason: String,
    },
    Undecidable {
        reason: String,
    },
}

impl Verdict {
    pub fn is_diffeomorphic(&self) -> bool {
        matches!(self, Verdict::Diffeomorphic { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Diffeomorphic { witness, sign } => {
                write!(f, "diffeomorphic (u = {witness}, sign {})", if *sign > 0 { "+" } else { "-" })
            }
            Verdict::NotDiffeomorphic { reason } => write!(f, "not diffeomorphic: {reason}"),
            Verdict::Undecidable { reason } => write!(f, "undecidable: {reason}"),
        }
    }
}

/// Decision from two already computed reports.
pub fn diffeo_decide_reports(p: &InvariantReport, q: &InvariantReport) -> Result<Verdict> {
    let modulus = p.n.abs();
    if modulus != q.n.abs() {
        return Ok(Verdict::NotDiffeomorphic { reason: "H⁴ order differs".into() });
    }
    if modulus.is_even() {
        return Ok(Verdict::Undecidable { reason: "even-order H⁴: q-invariant not computed".into() });
    }
    let (Some(cp), Some(cq)) = (&p.p1, &q.p1) else {
        return Ok(Verdict::Undecidable { reason: "p1 unavailable: gcd(a1, b1) != 1".into() });
    };
    if p.mu != q.mu {
        return Ok(Verdict::NotDiffeomorphic { reason: format!("Eells-Kuiper invariant differs: {} vs {}", p.mu, q.mu) });
    }
    if modulus.is_one() {
        return Ok(Verdict::Diffeomorphic { witness: BigInt::one(), sign: 1 });
    }
    let nn = modulus
        .to_u64()
        .filter(|&v| v <= MAX_UNIT_SEARCH)
        .ok_or_else(|| Error::ModulusTooLarge(modulus.to_string()))?;
    let small = |x: &BigInt| x.mod_floor(&modulus).to_u64().expect("reduced below modulus") as u128;
    let (lp, lq) = (small(&p.lk.scaled()), small(&q.lk.scaled()));
    let (c_p, c_q) = (small(&cp.c), small(&cq.c));
    let n128 = nn as u128;
    let neg_cq = (n128 - c_q) % n128;
    for u in 1..nn {
        if u.gcd(&nn) != 1 {
            continue;
        }
        let u = u as u128;
        if u * u % n128 * lp % n128 != lq {
            continue;
        }
        let uc = u * c_p % n128;
        if uc == c_q {
            return Ok(Verdict::Diffeomorphic { witness: BigInt::from(u), sign: 1 });
        }
        if uc == neg_cq {
            return Ok(Verdict::Diffeomorphic { witness: BigInt::from(u), sign: -1 });
        }
    }
    Ok(Verdict::NotDiffeomorphic { reason: "no unit of Z/|n| maps (lk, p1) of one to the other".into() })
}

pub fn diffeo_decide(p: &ParamPair, q: &ParamPair) -> Result<Verdict> {
    diffeo_decide_reports(&invariant_report(p)?, &invariant_report(q)?)
}

/// Re-checks a Diffeomorphic witness against the two reports.
pub fn witness_holds(p: &InvariantReport, q: &InvariantReport, v: &Verdict) -> bool {
    let Verdict::Diffeomorphic { witness: u, sign } = v else {
        return true;
    };
    let modulus = p.n.abs();
    let (Some(cp), Some(cq)) = (&p.p1, &q.p1) else {
        return false;
    };
    let lk_ok = (u * u * p.lk.scaled() - q.lk.scaled()).mod_floor(&modulus).is_zero();
    let p1_ok = (u * &cp.c - BigInt::from(*sign) * &cq.c).mod_floor(&modulus).is_zero();
    modulus == q.n.abs() && p.mu == q.mu && u.gcd(&modulus).is_one() && lk_ok && p1_ok
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub index: i64,
    pub pair: ParamPair,
    pub s: Rational,
    pub mu: Rational,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub base: ParamPair,
    pub stride: i64,
    pub indices: Vec<i64>,
    pub entries: Vec<CensusEntry>,
    /// Distinct |s| values, ascending.
    pub s_values: Vec<Rational>,
}

impl CensusReport {
    pub fn distinct_abs_s(&self) -> usize {
        self.s_values.len()
    }
}

/// Members at i = stride·t, t = 0..count, checked pairwise for diffeomorphism.
pub fn moduli_census(pair: &ParamPair, count: usize, stride: Option<i64>) -> Result<CensusReport> {
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    let n = h4_order(pair)?;
    if n == 0 {
        return Err(Error::InfiniteH4);
    }
    if n % 2 == 0 {
        return Err(Error::Precondition(format!("|n| = {} is even", n.abs())));
    }
    if pair.a().t1.gcd(&pair.b().t1) != 1 {
        return Err(Error::Precondition("gcd(a1, b1) != 1".into()));
    }
    let stride = match stride {
        Some(s) => s,
        None => census_stride(pair)?,
    };
    let indices: Vec<i64> = (0..count as i64)
        .map(|t| t.checked_mul(stride).ok_or(Error::Overflow("census index")))
        .collect::<Result<_>>()?;
    let reports: Vec<(ParamPair, InvariantReport)> = indices
        .par_iter()
        .map(|&i| {
            let member = family_member(pair, i)?;
            Ok((member, invariant_report(&member)?))
        })
        .collect::<Result<_>>()?;

    for x in 0..reports.len() {
        for y in (x + 1)..reports.len() {
            let v = diffeo_decide_reports(&reports[x].1, &reports[y].1)?;
            if !v.is_diffeomorphic() || !witness_holds(&reports[x].1, &reports[y].1, &v) {
                return Err(Error::CensusContradiction {
                    index: indices[y],
                    detail: format!("member {} vs member {}: {v}", indices[x], indices[y]),
                });
            }
        }
    }

    let base = &reports[0].1;
    let entries = indices
        .iter()
        .zip(&reports)
        .map(|(&index, (member, rep))| {
            Ok(CensusEntry {
                index,
                pair: *member,
                s: rep.s.clone(),
                mu: rep.mu.clone(),
                verdict: diffeo_decide_reports(base, rep)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let s_values: BTreeSet<Rational> = reports.iter().map(|(_, r)| r.s.abs()).collect();
    Ok(CensusReport { base: *pair, stride, indices, entries, s_values: s_values.into_iter().collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Milnor,
    NonMilnor,
    NotHomotopySphere,
}

/// 28μ mod 28 of a homotopy sphere.
pub fn twenty_eight_mu(mu: &Rational) -> Result<u8> {
    let x = (mu * &Rational::from(28i64)).mod_one();
    if !x.is_zero() {
        return Err(Error::Internal(format!("28μ is not an integer for μ = {mu}")));
    }
    let v = (mu * &Rational::from(28i64)).to_integer().expect("integral");
    Ok(v.mod_floor(&BigInt::from(28)).to_u8().expect("reduced mod 28"))
}

pub fn classify_mu28(v: u8) -> Membership {
    if MILNOR_SET.contains(&v) {
        Membership::Milnor
    } else {
        Membership::NonMilnor
    }
}

pub fn milnor_membership(pair: &ParamPair) -> Result<Membership> {
    if h4_order(pair)?.abs() != 1 {
        return Ok(Membership::NotHomotopySphere);
    }
    Ok(classify_mu28(twenty_eight_mu(&eells_kuiper(pair)?)?))
}
