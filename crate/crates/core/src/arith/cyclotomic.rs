//! Exact arithmetic in Q(ζ_N).
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(N)-1}` reduced
//! modulo Φ_N, so two equal field elements always have identical
//! coefficient vectors and equality is plain vector equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{context, Context};
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct CyclotomicElement {
    ctx: Arc<Context>,
    coeffs: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Binary field operation on two elements of the same Q(ζ_N).
pub fn cyc_arith(x: &CyclotomicElement, y: &CyclotomicElement, op: CycOp) -> Result<CyclotomicElement> {
    match op {
        CycOp::Add => x.checked_add(y),
        CycOp::Sub => x.checked_sub(y),
        CycOp::Mul => x.checked_mul(y),
        CycOp::Div => x.checked_div(y),
    }
}

impl CyclotomicElement {
    pub fn zero(conductor: u32) -> Result<Self> {
        let ctx = context(conductor)?;
        let coeffs = vec![Rational::zero(); ctx.degree];
        Ok(CyclotomicElement { ctx, coeffs })
    }

    pub fn one(conductor: u32) -> Result<Self> {
        Self::from_rational(conductor, Rational::one())
    }

    pub fn from_rational(conductor: u32, r: Rational) -> Result<Self> {
        let mut x = Self::zero(conductor)?;
        x.coeffs[0] = r;
        Ok(x)
    }

    /// ζ_N^e for any integer e.
    pub fn root_of_unity(conductor: u32, e: i64) -> Result<Self> {
        let ctx = context(conductor)?;
        let idx = ctx.exponent(e);
        let coeffs = ctx.powers[idx].iter().map(|&c| Rational::from(c)).collect();
        Ok(CyclotomicElement { ctx, coeffs })
    }

    /// Σ c_e ζ^e over arbitrary integer exponents.
    pub fn from_exponents<'a, I>(conductor: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, &'a Rational)>,
    {
        let ctx = context(conductor)?;
        let mut acc = vec![BigRational::zero(); ctx.degree];
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let row = &ctx.powers[ctx.exponent(e)];
            for (a, &p) in acc.iter_mut().zip(row) {
                if p != 0 {
                    *a += c.as_big() * BigInt::from(p);
                }
            }
        }
        Ok(CyclotomicElement { ctx, coeffs: acc.into_iter().map(Rational::from).collect() })
    }

    /// Element with the given power-basis coordinates; longer inputs are reduced mod Φ_N.
    pub fn from_coeffs(conductor: u32, coeffs: Vec<Rational>) -> Result<Self> {
        let ctx = context(conductor)?;
        let big: Vec<BigRational> = coeffs.into_iter().map(Rational::into_big).collect();
        let reduced = reduce_rational(big, &ctx.phi, ctx.degree);
        Ok(CyclotomicElement { ctx, coeffs: reduced.into_iter().map(Rational::from).collect() })
    }

    /// Integer-coefficient vector over a common denominator, reduced into the field.
    pub(crate) fn from_integer_vector(conductor: u32, ints: &[BigInt], denominator: &BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ctx = context(conductor)?;
        let reduced = reduce_integer(ints.to_vec(), &ctx.phi, ctx.degree);
        let coeffs = reduced
            .into_iter()
            .map(|c| Rational::from(BigRational::new(c, denominator.clone())))
            .collect();
        Ok(CyclotomicElement { ctx, coeffs })
    }

    pub fn conductor(&self) -> u32 {
        self.ctx.n
    }

    pub fn degree(&self) -> usize {
        self.ctx.degree
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ctx.n != other.ctx.n {
            return Err(Error::ConductorMismatch { left: self.ctx.n, right: other.ctx.n });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CyclotomicElement { ctx: self.ctx.clone(), coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CyclotomicElement { ctx: self.ctx.clone(), coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (xi, xd) = integer_form(&self.coeffs);
        let (yi, yd) = integer_form(&other.coeffs);
        let mut prod = vec![BigInt::zero(); xi.len() + yi.len() - 1];
        for (i, a) in xi.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in yi.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let reduced = reduce_integer(prod, &self.ctx.phi, self.ctx.degree);
        let den = xd * yd;
        let coeffs = reduced
            .into_iter()
            .map(|c| Rational::from(BigRational::new(c, den.clone())))
            .collect();
        Ok(CyclotomicElement { ctx: self.ctx.clone(), coeffs })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        self.checked_mul(&other.inverse()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CyclotomicElement { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse: solves (multiplication-by-self) · y = 1 with
    /// fraction-free Gaussian elimination over Z.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.ctx.degree;
        let (ints, den) = integer_form(&self.coeffs);
        // Column j holds the coefficients of self_int · x^j mod Φ_N.
        let mut m = vec![vec![BigInt::zero(); d + 1]; d];
        let mut col = ints;
        for j in 0..d {
            for (row, c) in m.iter_mut().zip(&col) {
                row[j] = c.clone();
            }
            if j + 1 < d {
                col.insert(0, BigInt::zero());
                col = reduce_integer(col, &self.ctx.phi, d);
            }
        }
        m[0][d] = BigInt::one();
        let y = bareiss_solve(m).ok_or_else(|| Error::Internal(format!("singular element of Q(ζ_{})", self.ctx.n)))?;
        let coeffs = y.into_iter().map(|c| Rational::from(c * BigRational::from_integer(den.clone()))).collect();
        Ok(CyclotomicElement { ctx: self.ctx.clone(), coeffs })
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Automorphism ζ ↦ ζ^u; `u` must be a unit mod N for this to be a field map.
    pub fn galois(&self, u: i64) -> Self {
        let n = self.ctx.n as i64;
        let terms = self.coeffs.iter().enumerate().map(|(k, c)| ((k as i64 * u).mod_floor(&n), c));
        Self::from_exponents(self.ctx.n, terms).expect("context exists")
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Same element viewed in Q(ζ_M); requires N | M.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if target == 0 || !target.is_multiple_of(self.ctx.n) {
            return Err(Error::ConductorMismatch { left: self.ctx.n, right: target });
        }
        let step = (target / self.ctx.n) as i64;
        let terms = self.coeffs.iter().enumerate().map(|(k, c)| (k as i64 * step, c));
        Self::from_exponents(target, terms)
    }

    /// The constant coefficient, if every other coordinate vanishes.
    pub fn to_rational(&self) -> Result<Rational> {
        if self.coeffs[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::NotRational { coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() });
        }
        Ok(self.coeffs[0].clone())
    }

    /// Image under the canonical embedding ζ_N ↦ e^{2πi/N}, as (re, im).
    pub fn to_complex(&self) -> (f64, f64) {
        let t = 2.0 * std::f64::consts::PI / self.ctx.n as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (k, c)| {
            let v = c.to_f64();
            let a = t * k as f64;
            (re + v * a.cos(), im + v * a.sin())
        })
    }

    pub fn real_part_f64(&self) -> f64 {
        self.to_complex().0
    }
}

impl PartialEq for CyclotomicElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n && self.coeffs == other.coeffs
    }
}

impl Eq for CyclotomicElement {}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(ζ_{})[", self.ctx.n)?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})ζ")?,
                _ => write!(f, "({c})ζ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// The operator forms panic on mismatched conductors; input-driven code uses `checked_*`.
impl Add for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn add(self, rhs: Self) -> CyclotomicElement {
        self.checked_add(rhs).expect("conductor mismatch in +")
    }
}

impl Sub for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn sub(self, rhs: Self) -> CyclotomicElement {
        self.checked_sub(rhs).expect("conductor mismatch in -")
    }
}

impl Mul for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn mul(self, rhs: Self) -> CyclotomicElement {
        self.checked_mul(rhs).expect("conductor mismatch in *")
    }
}

impl Neg for &CyclotomicElement {
    type Output = CyclotomicElement;
    fn neg(self) -> CyclotomicElement {
        CyclotomicElement { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

fn integer_form(coeffs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    (ints, den)
}

/// Reduce an integer polynomial modulo the monic Φ, keeping `degree` coefficients.
fn reduce_integer(mut p: Vec<BigInt>, phi: &[i64], degree: usize) -> Vec<BigInt> {
    for k in (degree..p.len()).rev() {
        if p[k].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut p[k]);
        for (j, &f) in phi[..degree].iter().enumerate() {
            if f != 0 {
                p[k - degree + j] -= &c * f;
            }
        }
    }
    p.resize(degree, BigInt::zero());
    p
}

fn reduce_rational(mut p: Vec<BigRational>, phi: &[i64], degree: usize) -> Vec<BigRational> {
    for k in (degree..p.len()).rev() {
        if p[k].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut p[k]);
        for (j, &f) in phi[..degree].iter().enumerate() {
            if f != 0 {
                p[k - degree + j] -= &c * BigInt::from(f);
            }
        }
    }
    p.resize(degree, BigRational::zero());
    p
}

/// Solve a square system given as an augmented integer matrix.
fn bareiss_solve(mut m: Vec<Vec<BigInt>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        let (top, rest) = m.split_at_mut(k + 1);
        let row_k = &top[k];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[k]);
            for j in k + 1..=n {
                let v = &mut row[j];
                *v *= &row_k[k];
                if !lead.is_zero() {
                    *v -= &lead * &row_k[j];
                }
                *v /= &prev;
            }
        }
        prev = m[k][k].clone();
    }
    // Cramer: det · x is integral, so back substitution stays in Z.
    let det = prev;
    let mut x = vec![BigInt::zero(); n];
    for i in (0..n).rev() {
        let mut acc = &m[i][n] * &det;
        for j in i + 1..n {
            acc -= &m[i][j] * &x[j];
        }
        x[i] = acc / &m[i][i];
    }
    Some(x.into_iter().map(|xi| BigRational::new(xi, det.clone())).collect())
}
