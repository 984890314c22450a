//! Integer cyclotomic polynomials and the per-conductor reduction tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;

use crate::error::{Error, Result};

/// Integer polynomial, coefficients low degree first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntPolynomial(pub Vec<i64>);

impl IntPolynomial {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (k, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{a}x")?,
                (_, 1) => write!(f, "x^{k}")?,
                _ => write!(f, "{a}x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Φ_N, by dividing x^N - 1 by Φ_d for every proper divisor d of N.
pub fn cyclotomic_polynomial(n: u32) -> Result<IntPolynomial> {
    if n == 0 {
        return Err(Error::ZeroConductor);
    }
    Ok(IntPolynomial(context(n)?.phi.clone()))
}

fn compute_phi(n: u32) -> Result<Vec<i64>> {
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = &context(d)?.phi;
            num = exact_div_monic(&num, phi_d)?;
        }
    }
    Ok(num)
}

/// Exact quotient of `num` by the monic `den`; errors if a remainder is left.
fn exact_div_monic(num: &[i64], den: &[i64]) -> Result<Vec<i64>> {
    let dn = den.len() - 1;
    debug_assert_eq!(den[dn], 1);
    let mut rem = num.to_vec();
    if rem.len() <= dn {
        return Err(Error::Internal("cyclotomic division: degree too small".into()));
    }
    let mut quot = vec![0i64; rem.len() - dn];
    for k in (dn..rem.len()).rev() {
        let c = rem[k];
        if c == 0 {
            continue;
        }
        quot[k - dn] = c;
        for (j, &dj) in den.iter().enumerate() {
            let idx = k - dn + j;
            rem[idx] = rem[idx]
                .checked_sub(c.checked_mul(dj).ok_or(Error::Overflow("cyclotomic polynomial"))?)
                .ok_or(Error::Overflow("cyclotomic polynomial"))?;
        }
    }
    if rem.iter().any(|&c| c != 0) {
        return Err(Error::Internal("cyclotomic division left a remainder".into()));
    }
    Ok(quot)
}

/// Everything needed to work in the power basis of Q(ζ_N).
#[derive(Debug)]
pub(crate) struct Context {
    pub n: u32,
    pub degree: usize,
    /// Φ_N, monic, low degree first.
    pub phi: Vec<i64>,
    /// `powers[e]` = x^e mod Φ_N for 0 <= e < N.
    pub powers: Vec<Vec<i64>>,
}

impl Context {
    fn build(n: u32) -> Result<Self> {
        let phi = if n == 1 { vec![-1, 1] } else { compute_phi(n)? };
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x, reduce the overflow coefficient with x^d = -(phi[0..d])
            let top = cur[degree - 1];
            let mut next = vec![0i64; degree];
            next[1..degree].copy_from_slice(&cur[..(degree - 1)]);
            if top != 0 {
                for j in 0..degree {
                    next[j] = next[j]
                        .checked_sub(top.checked_mul(phi[j]).ok_or(Error::Overflow("power table"))?)
                        .ok_or(Error::Overflow("power table"))?;
                }
            }
            cur = next;
        }
        Ok(Context { n, degree, phi, powers })
    }

    /// Index of ζ^e in the power table.
    pub fn exponent(&self, e: i64) -> usize {
        e.mod_floor(&(self.n as i64)) as usize
    }
}

type Cache = RwLock<HashMap<u32, Arc<Context>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Write-once memo of the reduction data per conductor.
pub(crate) fn context(n: u32) -> Result<Arc<Context>> {
    if n == 0 {
        return Err(Error::ZeroConductor);
    }
    if let Some(ctx) = cache().read().expect("cyclotomic cache poisoned").get(&n) {
        return Ok(ctx.clone());
    }
    // Built outside the lock: Context::build recurses into context() for divisors.
    let built = Arc::new(Context::build(n)?);
    let mut guard = cache().write().expect("cyclotomic cache poisoned");
    Ok(guard.entry(n).or_insert(built).clone())
}

/// Euler's totient.
pub fn totient(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}
