//! Parameter validation and the invariants of M_{a,b}.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::Rational;
use crate::defect::{defect_d_exact, DefectArgs};
use crate::error::{Error, Result};
use crate::family::bezout_pair;

/// Which of the two triples a condition refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "a",
            Side::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct Triple {
    pub t1: i64,
    pub t2: i64,
    pub t3: i64,
}

impl Triple {
    pub const fn new(t1: i64, t2: i64, t3: i64) -> Self {
        Triple { t1, t2, t3 }
    }

    pub fn to_array(self) -> [i64; 3] {
        [self.t1, self.t2, self.t3]
    }

    fn big(&self) -> [BigInt; 3] {
        [BigInt::from(self.t1), BigInt::from(self.t2), BigInt::from(self.t3)]
    }

    /// Violations of the per-triple conditions.
    pub fn violations(&self, side: Side) -> Vec<Violation> {
        let mut out = Vec::new();
        for (index, value) in self.to_array().into_iter().enumerate() {
            if value.mod_floor(&4) != 1 {
                out.push(Violation::NotOneMod4 { side, index: index + 1, value });
            }
        }
        let [t1, t2, t3] = self.big();
        let g = t1.gcd(&t2).gcd(&t3);
        if g != BigInt::from(1) {
            out.push(Violation::GcdAll { side, gcd: g.to_string() });
        }
        let g = t1.gcd(&(&t2 - &t3));
        if g != BigInt::from(1) {
            out.push(Violation::GcdDiff { side, gcd: g.to_string() });
        }
        let g = t1.gcd(&(&t2 + &t3));
        if g != BigInt::from(1) {
            out.push(Violation::GcdSum { side, gcd: g.to_string() });
        }
        out
    }
}

impl From<[i64; 3]> for Triple {
    fn from(t: [i64; 3]) -> Self {
        Triple::new(t[0], t[1], t[2])
    }
}

impl From<Triple> for [i64; 3] {
    fn from(t: Triple) -> Self {
        t.to_array()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.t1, self.t2, self.t3)
    }
}

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().trim_matches(|c| c == '(' || c == ')').split(',').collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated integers, got {s:?}"));
        }
        let mut t = [0i64; 3];
        for (slot, part) in t.iter_mut().zip(parts) {
            *slot = part.trim().parse().map_err(|_| format!("bad integer {part:?} in {s:?}"))?;
        }
        Ok(t.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Violation {
    NotOneMod4 { side: Side, index: usize, value: i64 },
    GcdAll { side: Side, gcd: String },
    GcdDiff { side: Side, gcd: String },
    GcdSum { side: Side, gcd: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotOneMod4 { side, index, value } => write!(f, "{side}{index} = {value} ≢ 1 mod 4"),
            Violation::GcdAll { side: s, gcd } => write!(f, "gcd({s}1,{s}2,{s}3) = {gcd}"),
            Violation::GcdDiff { side: s, gcd } => write!(f, "gcd({s}1, {s}2-{s}3) = {gcd}"),
            Violation::GcdSum { side: s, gcd } => write!(f, "gcd({s}1, {s}2+{s}3) = {gcd}"),
        }
    }
}

/// A validated parameter pair (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ParamPair {
    a: Triple,
    b: Triple,
}

impl ParamPair {
    pub fn a(&self) -> &Triple {
        &self.a
    }

    pub fn b(&self) -> &Triple {
        &self.b
    }

    pub fn triple(&self, side: Side) -> &Triple {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }
}

impl fmt::Display for ParamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={} b={}", self.a, self.b)
    }
}

impl<'de> Deserialize<'de> for ParamPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: Triple,
            b: Triple,
        }
        let raw = Raw::deserialize(d)?;
        validate_pair(raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

/// Checks every condition on both triples and reports all failures.
pub fn validate_pair(a: Triple, b: Triple) -> Result<ParamPair> {
    let mut v = a.violations(Side::A);
    v.extend(b.violations(Side::B));
    if v.is_empty() {
        Ok(ParamPair { a, b })
    } else {
        Err(Error::InvalidPair(v))
    }
}

fn sq(x: &BigInt) -> BigInt {
    x * x
}

fn to_i128(x: &BigInt, what: &'static str) -> Result<i128> {
    x.to_i128().ok_or(Error::Overflow(what))
}

/// 8n as a big integer.
fn eight_n(pair: &ParamPair) -> BigInt {
    let [a1, a2, a3] = pair.a.big();
    let [b1, b2, b3] = pair.b.big();
    sq(&a1) * (sq(&b2) - sq(&b3)) - sq(&b1) * (sq(&a2) - sq(&a3))
}

fn n_big(pair: &ParamPair) -> BigInt {
    let e = eight_n(pair);
    debug_assert!(e.is_multiple_of(&BigInt::from(8)));
    e / 8
}

fn nonzero_n(pair: &ParamPair) -> Result<BigInt> {
    let n = n_big(pair);
    if n.is_zero() {
        Err(Error::InfiniteH4)
    } else {
        Ok(n)
    }
}

fn a1b1_sq(pair: &ParamPair) -> BigInt {
    sq(&BigInt::from(pair.a.t1)) * sq(&BigInt::from(pair.b.t1))
}

/// Signed n; |n| is the order of H⁴ and n = 0 means H⁴ is infinite.
pub fn h4_order(pair: &ParamPair) -> Result<i128> {
    to_i128(&n_big(pair), "n")
}

pub fn m_value(pair: &ParamPair) -> Rational {
    let [a1, a2, a3] = pair.a.big();
    let [b1, b2, b3] = pair.b.big();
    let eight = BigInt::from(8);
    let det = sq(&a1) * (sq(&b2) + sq(&b3) + &eight) - sq(&b1) * (sq(&a2) + sq(&a3) + &eight);
    Rational::new(det, eight * sq(&a1) * sq(&b1)).expect("a1, b1 are odd")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseIntegrals {
    pub euler: Rational,
    pub p1_base: Rational,
    pub p1_bundle: Rational,
}

pub fn base_integrals(pair: &ParamPair) -> BaseIntegrals {
    let [a1, a2, a3] = pair.a.big();
    let [b1, b2, b3] = pair.b.big();
    let (a1s, b1s) = (sq(&a1), sq(&b1));
    let den = BigInt::from(4) * &a1s * &b1s;
    let euler = Rational::new(-n_big(pair), &a1s * &b1s).expect("odd");
    let p1_base = Rational::new(-BigInt::from(8) * (&a1s - &b1s), den.clone()).expect("odd");
    let p1_bundle = Rational::new(-(&a1s * (sq(&b2) + sq(&b3)) - &b1s * (sq(&a2) + sq(&a3))), den).expect("odd");
    BaseIntegrals { euler, p1_base, p1_bundle }
}

/// Sign of the Euler integral, -sign(n).
pub fn sign_w(pair: &ParamPair) -> Result<i32> {
    let n = nonzero_n(pair)?;
    Ok(if n.is_positive() { -1 } else { 1 })
}

pub fn p_wedge_q(pair: &ParamPair) -> Result<Rational> {
    let n = nonzero_n(pair)?;
    let m = m_value(pair);
    Ok(Rational::from(-4i64) * &m * &m * Rational::from(a1b1_sq(pair)) / Rational::from(n))
}

/// The two defect arguments entering s: (q; 4, t3+t2, t3-t2).
pub fn defect_args(t: &Triple) -> Result<DefectArgs> {
    let sum = t.t3.checked_add(t.t2).ok_or(Error::Overflow("defect argument"))?;
    let diff = t.t3.checked_sub(t.t2).ok_or(Error::Overflow("defect argument"))?;
    DefectArgs::new(t.t1, [4, sum, diff])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SParts {
    pub s: Rational,
    /// Quadratic part -(|n| - a₁²b₁²m²)/(2⁵·7·n).
    pub main: Rational,
    pub defect_minus: Rational,
    pub defect_plus: Rational,
}

pub fn s_parts(pair: &ParamPair) -> Result<SParts> {
    let n = nonzero_n(pair)?;
    let m = m_value(pair);
    let num = Rational::from(n.abs()) - Rational::from(a1b1_sq(pair)) * &m * &m;
    let main = -num / Rational::from(BigInt::from(224) * &n);
    let defect_minus = defect_d_exact(&defect_args(&pair.a)?)?;
    let defect_plus = defect_d_exact(&defect_args(&pair.b)?)?;
    let s = &main - &defect_minus + &defect_plus;
    Ok(SParts { s, main, defect_minus, defect_plus })
}

pub fn s_invariant(pair: &ParamPair) -> Result<Rational> {
    Ok(s_parts(pair)?.s)
}

/// μ = s mod 1, in [0, 1).
pub fn eells_kuiper(pair: &ParamPair) -> Result<Rational> {
    Ok(s_invariant(pair)?.mod_one())
}

/// lk(1,1) on the distinguished generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Linking {
    /// H⁴ = 0.
    Trivial,
    Value {
        lk: Rational,
        /// lk·|n|, an integer in [0, |n|).
        scaled: BigInt,
    },
}

impl Linking {
    pub fn as_rational(&self) -> Rational {
        match self {
            Linking::Trivial => Rational::zero(),
            Linking::Value { lk, .. } => lk.clone(),
        }
    }

    pub fn scaled(&self) -> BigInt {
        match self {
            Linking::Trivial => BigInt::zero(),
            Linking::Value { scaled, .. } => scaled.clone(),
        }
    }
}

impl fmt::Display for Linking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Linking::Trivial => f.write_str("trivial"),
            Linking::Value { lk, .. } => write!(f, "{lk}"),
        }
    }
}

impl Serialize for Linking {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Linking::Trivial => s.serialize_str("trivial"),
            Linking::Value { lk, .. } => lk.serialize(s),
        }
    }
}

/// L = e₁b₁² + e₀(b₂²-b₃²)/8 with e₁a₁² + e₀(a₂²-a₃²)/8 = 1.
pub fn linking_numerator(pair: &ParamPair, e1: &BigInt, e0: &BigInt) -> BigInt {
    let [b1, b2, b3] = pair.b.big();
    e1 * sq(&b1) + e0 * ((sq(&b2) - sq(&b3)) / 8)
}

pub fn linking_value(pair: &ParamPair) -> Result<Linking> {
    let n = nonzero_n(pair)?;
    if n.abs() == BigInt::from(1) {
        return Ok(Linking::Trivial);
    }
    let (e1, e0) = bezout_pair(&pair.a)?;
    Ok(linking_from_numerator(&linking_numerator(pair, &e1, &e0), &n))
}

pub(crate) fn linking_from_numerator(l: &BigInt, n: &BigInt) -> Linking {
    let lk = Rational::new(l.clone(), n.clone()).expect("n != 0").mod_one();
    let scaled = (l * n.signum()).mod_floor(&n.abs());
    Linking::Value { lk, scaled }
}

/// p₁(TM) = ±c·generator in Z/|n|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Class {
    #[serde(with = "crate::family::bigint_str")]
    pub modulus: BigInt,
    /// Representative c in [0, |n|).
    #[serde(with = "crate::family::bigint_str")]
    pub c: BigInt,
}

impl P1Class {
    /// {c, -c} sorted.
    pub fn pair(&self) -> (BigInt, BigInt) {
        let neg = (-&self.c).mod_floor(&self.modulus);
        if self.c <= neg {
            (self.c.clone(), neg)
        } else {
            (neg, self.c.clone())
        }
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        let x = x.mod_floor(&self.modulus);
        let (lo, hi) = self.pair();
        x == lo || x == hi
    }
}

impl fmt::Display for P1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.pair();
        write!(f, "±{{{lo},{hi}}} mod {}", self.modulus)
    }
}

pub fn p1_coefficient(pair: &ParamPair) -> Result<P1Class> {
    if pair.a.t1.gcd(&pair.b.t1) != 1 {
        return Err(Error::P1Unavailable("formula requires coprime a1, b1".into()));
    }
    let n = nonzero_n(pair)?.abs();
    let x = Rational::from(2i64) * Rational::from(sq(&BigInt::from(pair.a.t1))) * m_value(pair);
    let inv = mod_inverse(x.denom(), &n).ok_or_else(|| {
        Error::P1Unavailable(format!("denominator {} of 2a1²m not invertible mod {n}", x.denom()))
    })?;
    let c = (x.numer() * inv).mod_floor(&n);
    Ok(P1Class { modulus: n, c })
}

pub(crate) fn mod_inverse(x: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = x.mod_floor(n).extended_gcd(n);
    (e.gcd == BigInt::from(1)).then(|| e.x.mod_floor(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub a: Triple,
    pub b: Triple,
    #[serde(serialize_with = "ser_bigint")]
    pub n: BigInt,
    pub m: Rational,
    pub s: Rational,
    pub mu: Rational,
    pub lk: Linking,
    #[serde(serialize_with = "ser_p1")]
    pub p1: Option<P1Class>,
    pub defect_minus: Rational,
    pub defect_plus: Rational,
    #[serde(rename = "sign_W")]
    pub sign_w: i32,
    pub euler_integral: Rational,
    pub p1_base_integral: Rational,
    pub p1_bundle_integral: Rational,
}

fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

fn ser_p1<S: Serializer>(p: &Option<P1Class>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    match p {
        None => s.serialize_none(),
        Some(p) => {
            let (lo, hi) = p.pair();
            let mut seq = s.serialize_seq(Some(2))?;
            for v in [lo, hi] {
                match v.to_i64() {
                    Some(v) => seq.serialize_element(&v)?,
                    None => seq.serialize_element(&v.to_string())?,
                }
            }
            seq.end()
        }
    }
}

pub fn invariant_report(pair: &ParamPair) -> Result<InvariantReport> {
    let n = nonzero_n(pair)?;
    let m = m_value(pair);
    let parts = s_parts(pair)?;
    let mu = parts.s.mod_one();
    let lk = linking_value(pair)?;
    let p1 = match p1_coefficient(pair) {
        Ok(p) => Some(p),
        Err(Error::P1Unavailable(_)) => None,
        Err(e) => return Err(e),
    };
    let ints = base_integrals(pair);
    let report = InvariantReport {
        a: pair.a,
        b: pair.b,
        n: n.clone(),
        m: m.clone(),
        s: parts.s,
        mu,
        lk,
        p1,
        defect_minus: parts.defect_minus,
        defect_plus: parts.defect_plus,
        sign_w: sign_w(pair)?,
        euler_integral: ints.euler,
        p1_base_integral: ints.p1_base,
        p1_bundle_integral: ints.p1_bundle,
    };
    report.check()?;
    Ok(report)
}

impl InvariantReport {
    /// Internal consistency of the aggregated values.
    pub fn check(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("report for a={} b={}: {what}", self.a, self.b)));
        if self.mu != self.s.mod_one() {
            return fail("mu != s mod 1");
        }
        let a1b1 = Rational::from(self.a.t1 * self.a.t1) * Rational::from(self.b.t1 * self.b.t1);
        if self.euler_integral != -Rational::from(self.n.clone()) / a1b1 {
            return fail("euler integral != -n/(a1²b1²)");
        }
        if &self.p1_base_integral + &self.p1_bundle_integral != Rational::from(-2i64) * &self.m {
            return fail("p1 integrals do not sum to -2m");
        }
        if self.sign_w != -self.n.signum().to_i32().unwrap_or(0) {
            return fail("sign(W) != -sign(n)");
        }
        Ok(())
    }

    /// Fixed CSV row: a1,a2,a3,b1,b2,b3,n,m,s,mu,lk,p1_lo,p1_hi,defect_minus,defect_plus.
    pub fn csv_record(&self) -> Vec<String> {
        let mut row: Vec<String> = self.a.to_array().iter().chain(self.b.to_array().iter()).map(|x| x.to_string()).collect();
        let (lo, hi) = match &self.p1 {
            Some(p) => {
                let (lo, hi) = p.pair();
                (lo.to_string(), hi.to_string())
            }
            None => (String::new(), String::new()),
        };
        row.extend([
            self.n.to_string(),
            self.m.to_string(),
            self.s.to_string(),
            self.mu.to_string(),
            self.lk.to_string(),
            lo,
            hi,
            self.defect_minus.to_string(),
            self.defect_plus.to_string(),
        ]);
        row
    }
}

pub const CSV_HEADER: [&str; 15] = [
    "a1", "a2", "a3", "b1", "b2", "b3", "n", "m", "s", "mu", "lk", "p1_lo", "p1_hi", "defect_minus", "defect_plus",
];
