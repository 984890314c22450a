//! The acceptance battery, shared by `seven-inv selftest` and the test suite.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{cos_pi, sin_pi, totient, CyclotomicElement, Rational};
use crate::defect::{defect_d_exact, defect_d_float, DefectArgs};
use crate::error::Result;
use crate::family::{
    family_coefficients, family_member, moduli_census, s_polynomial_increment, twenty_eight_mu, MILNOR_SET,
    NON_MILNOR_SET,
};
use crate::invariants::{
    eells_kuiper, h4_order, linking_value, s_invariant, s_parts, validate_pair, ParamPair, Triple,
};
use crate::oracle::{oracle_check, random_valid_pairs, CALIBRATION_PAIR};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }

    pub fn ok(&self) -> bool {
        self.passed && self.within_budget()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {:<4} {}: {} [{:.2}s / {}s]",
            self.id,
            if self.ok() { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

fn timed(id: u8, name: &'static str, budget_s: u64, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name, passed, detail, elapsed: start.elapsed(), budget: Duration::from_secs(budget_s) }
}

fn pair(a: [i64; 3], b: [i64; 3]) -> Result<ParamPair> {
    validate_pair(a.into(), b.into())
}

pub fn mk(k: i64) -> Result<ParamPair> {
    pair([-3, -3, 1], [1, 4 * k + 1, 4 * k + 1])
}

/// -(9/56)(4k⁴+4k³+3k²+k).
pub fn mk_s_closed_form(k: i64) -> Rational {
    let x = 4 * k.pow(4) + 4 * k.pow(3) + 3 * k * k + k;
    Rational::new(-9 * x, 56).expect("nonzero")
}

pub fn criterion_1() -> CriterionResult {
    timed(1, "M_k golden values", 1, || {
        let mut bad = Vec::new();
        for k in -5..=16 {
            let s = s_invariant(&mk(k)?)?;
            if s != mk_s_closed_form(k) {
                bad.push(format!("k={k}: {s}"));
            }
        }
        Ok((bad.is_empty(), if bad.is_empty() { "22/22 exact".into() } else { bad.join(", ") }))
    })
}

pub const NON_MILNOR_KS: [i64; 8] = [-3, -1, 1, 2, 4, 8, 11, 15];

pub fn criterion_2() -> CriterionResult {
    timed(2, "non-Milnor coverage", 1, || {
        let mut got = BTreeSet::new();
        for k in NON_MILNOR_KS {
            got.insert(twenty_eight_mu(&eells_kuiper(&mk(k)?)?)?);
        }
        let want: BTreeSet<u8> = NON_MILNOR_SET.into_iter().collect();
        Ok((got == want, format!("28μ mod 28 = {got:?}")))
    })
}

pub const ORACLE_SEED: u64 = 0x5eed_0001;

pub fn criterion_3() -> CriterionResult {
    timed(3, "oracle equivalence", 60, || {
        let mut pairs = vec![pair(CALIBRATION_PAIR.0, CALIBRATION_PAIR.1)?];
        pairs.extend(random_valid_pairs(50, 3, 25, ORACLE_SEED)?);
        let reports: Vec<_> = pairs.par_iter().map(oracle_check).collect::<Result<_>>()?;
        let bad: Vec<String> = reports.iter().filter(|r| !r.equal).map(|r| format!("{} ({})", r.pair, r)).collect();
        let detail = format!("{}/{} equal{}", reports.len() - bad.len(), reports.len(), tail(&bad));
        Ok((bad.is_empty(), detail))
    })
}

fn tail(bad: &[String]) -> String {
    match bad.first() {
        None => String::new(),
        Some(first) => format!("; first mismatch {first}"),
    }
}

/// Random valid D arguments with |q| ≤ max_q and |pᵢ| ≤ max_p.
pub fn random_defect_args(rng: &mut impl Rng, max_q: i64, max_p: i64) -> DefectArgs {
    loop {
        let q = 2 * rng.gen_range(-(max_q / 2) - 1..=max_q / 2) + 1;
        if q == 0 || q.abs() > max_q {
            continue;
        }
        let mut p = [0; 3].map(|_| rng.gen_range(-max_p..=max_p));
        if (p[0] + p[1] + p[2]) % 2 != 0 {
            p[2] += if p[2] < max_p { 1 } else { -1 };
        }
        if let Ok(args) = DefectArgs::new(q, p) {
            return args;
        }
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Default)]
struct Tally {
    perm: usize,
    sign: usize,
    odd: usize,
    period: usize,
}

pub fn criterion_4() -> CriterionResult {
    timed(4, "D-sum property suite", 60, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let cases: Vec<DefectArgs> = (0..200).map(|_| random_defect_args(&mut rng, 99, 200)).collect();
        let tallies: Vec<Tally> = cases
            .par_iter()
            .map(|args| -> Result<Tally> {
                let (q, p) = (args.q(), args.p());
                let d = defect_d_exact(args)?;
                let mut t = Tally::default();
                let perm_ok = PERMUTATIONS
                    .iter()
                    .map(|s| defect_d_exact(&DefectArgs::new(q, [p[s[0]], p[s[1]], p[s[2]]])?).map(|v| v == d))
                    .collect::<Result<Vec<_>>>()?;
                t.perm += perm_ok.iter().all(|&x| x) as usize;
                t.sign += (defect_d_exact(&DefectArgs::new(-q, p)?)? == d) as usize;
                for i in 0..3 {
                    let mut pn = p;
                    pn[i] = -pn[i];
                    t.odd += (defect_d_exact(&DefectArgs::new(q, pn)?)? == -&d) as usize;
                }
                let shifted = [p[0], p[1], p[2] + 2 * q];
                t.period += (defect_d_exact(&DefectArgs::new(q, shifted)?)? == d) as usize;
                Ok(t)
            })
            .collect::<Result<_>>()?;
        let sum = |f: fn(&Tally) -> usize| tallies.iter().map(f).sum::<usize>();
        let (perm, sign, odd, period) = (sum(|t| t.perm), sum(|t| t.sign), sum(|t| t.odd), sum(|t| t.period));
        let anchor = defect_d_exact(&DefectArgs::new(3, [4, -2, 4])?)? == Rational::new(-1, 28)?
            && defect_d_exact(&DefectArgs::new(1, [4, -2, 4])?)?.is_zero()
            && defect_d_exact(&DefectArgs::new(-1, [7, 3, -6])?)?.is_zero();
        let passed = anchor && perm == 200 && sign == 200 && odd == 600 && period == 200;
        let detail = format!(
            "permutation {perm}/200, q-sign {sign}/200, oddness {odd}/600, p3 2q-periodicity {period}/200, anchors {}",
            if anchor { "ok" } else { "FAILED" }
        );
        Ok((passed, detail))
    })
}

#[derive(Default, Debug)]
struct FamilyTally {
    n: usize,
    lk: usize,
    defect: usize,
    poly: usize,
    nonconstant: usize,
}

pub const FAMILY_SEED: u64 = 0x5eed_0005;

/// Random valid bases with n ≠ 0 and |a₁|, |b₁| ≤ 9.
pub fn family_bases(count: usize, seed: u64) -> Result<Vec<ParamPair>> {
    let mut out = Vec::with_capacity(count);
    let mut s = seed;
    while out.len() < count {
        for p in random_valid_pairs(count, 1, 9, s)? {
            if out.len() < count && h4_order(&p)? != 0 {
                out.push(p);
            }
        }
        s = s.wrapping_add(1);
    }
    Ok(out)
}

pub fn criterion_5() -> CriterionResult {
    timed(5, "family suite", 30, || {
        let bases = family_bases(25, FAMILY_SEED)?;
        let tallies: Vec<FamilyTally> = bases
            .par_iter()
            .map(|base| -> Result<FamilyTally> {
                let coeffs = family_coefficients(base)?;
                let n0 = h4_order(base)?;
                let lk0 = linking_value(base)?;
                let parts0 = s_parts(base)?;
                let mut t = FamilyTally { nonconstant: !(coeffs.b == 0.into() && coeffs.c == 0.into()) as usize, ..Default::default() };
                let (mut n_ok, mut lk_ok, mut d_ok, mut p_ok) = (true, true, true, true);
                for i in -3..=3 {
                    let member = family_member(base, i)?;
                    n_ok &= h4_order(&member)? == n0;
                    lk_ok &= linking_value(&member)? == lk0;
                    let parts = s_parts(&member)?;
                    d_ok &= parts.defect_minus == parts0.defect_minus && parts.defect_plus == parts0.defect_plus;
                    p_ok &= &parts.s - &parts0.s == s_polynomial_increment(base, &coeffs, i)?;
                }
                t.n = n_ok as usize;
                t.lk = lk_ok as usize;
                t.defect = d_ok as usize;
                t.poly = p_ok as usize;
                Ok(t)
            })
            .collect::<Result<_>>()?;
        let sum = |f: fn(&FamilyTally) -> usize| tallies.iter().map(f).sum::<usize>();
        let (n, lk, defect, poly, nc) =
            (sum(|t| t.n), sum(|t| t.lk), sum(|t| t.defect), sum(|t| t.poly), sum(|t| t.nonconstant));
        let passed = [n, lk, defect, poly, nc].iter().all(|&x| x == 25);
        let detail = format!(
            "bases passing over i∈[-3,3]: n {n}/25, lk {lk}/25, defect stability {defect}/25, s-polynomial {poly}/25, (B,C)≠0 {nc}/25"
        );
        Ok((passed, detail))
    })
}

pub fn criterion_6() -> CriterionResult {
    timed(6, "moduli census", 10, || {
        let base = pair(CALIBRATION_PAIR.0, CALIBRATION_PAIR.1)?;
        let rep = moduli_census(&base, 5, None)?;
        let all = rep.entries.iter().all(|e| e.verdict.is_diffeomorphic());
        let passed = all && rep.distinct_abs_s() == 5 && rep.stride == 2016;
        let s: Vec<String> = rep.s_values.iter().map(|x| x.to_string()).collect();
        Ok((passed, format!("stride {}, all diffeomorphic: {all}, distinct |s|: {} [{}]", rep.stride, rep.distinct_abs_s(), s.join(", "))))
    })
}

/// Entries x ≡ 1 mod 4 with |x| ≤ bound.
pub fn admissible_entries(bound: i64) -> Vec<i64> {
    (-bound..=bound).filter(|x| x.mod_floor(&4) == 1).collect()
}

pub fn criterion_7() -> CriterionResult {
    timed(7, "homotopy-sphere quantization", 120, || {
        let vals = admissible_entries(9);
        let mut triples = Vec::new();
        for &x in &vals {
            for &y in &vals {
                for &z in &vals {
                    let t = Triple::new(x, y, z);
                    if t.violations(crate::invariants::Side::A).is_empty() {
                        triples.push(t);
                    }
                }
            }
        }
        let rows: Vec<(ParamPair, Rational)> = triples
            .par_iter()
            .flat_map_iter(|&a| triples.iter().map(move |&b| (a, b)))
            .filter_map(|(a, b)| validate_pair(a, b).ok())
            .filter(|p| h4_order(p).map(|n| n.abs() == 1).unwrap_or(false))
            .map(|p| Ok((p, s_invariant(&p)?)))
            .collect::<Result<_>>()?;
        let twenty_eight = Rational::from(28i64);
        let non_integral = rows.iter().filter(|(_, s)| !(s * &twenty_eight).is_integer()).count();
        let mut milnor_total = 0;
        let mut outside = 0;
        for (p, s) in &rows {
            if p.a().t1 == 1 && p.b().t1 == 1 {
                milnor_total += 1;
                match twenty_eight_mu(&s.mod_one()) {
                    Ok(v) if MILNOR_SET.contains(&v) => {}
                    _ => outside += 1,
                }
            }
        }
        let passed = non_integral == 0 && outside == 0 && !rows.is_empty();
        Ok((
            passed,
            format!(
                "{} homotopy spheres, 28s non-integral: {non_integral}; a1=b1=1: {milnor_total}, outside Milnor set: {outside}",
                rows.len()
            ),
        ))
    })
}

fn random_element(rng: &mut impl Rng, n: u32) -> Result<CyclotomicElement> {
    let d = totient(n) as usize;
    let coeffs = (0..d).map(|_| Rational::new(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3)).expect("den > 0")).collect();
    CyclotomicElement::from_coeffs(n, coeffs)
}

/// Relative error measured against max(|exact|, 1e-3), so exact zeros are handled.
pub fn float_close(exact: &Rational, float: f64, rel: f64) -> bool {
    let e = exact.to_f64();
    (e - float).abs() <= rel * e.abs().max(1e-3)
}

pub fn criterion_8() -> CriterionResult {
    timed(8, "arithmetic soundness", 60, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
        let cases: Vec<(u32, u64)> = (0..500).map(|_| (rng.gen_range(1..=120u32), rng.gen())).collect();
        let field_ok = cases
            .par_iter()
            .map(|&(n, seed)| -> Result<bool> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (x, y, z) = (random_element(&mut rng, n)?, random_element(&mut rng, n)?, random_element(&mut rng, n)?);
                let assoc = x.checked_mul(&y)?.checked_mul(&z)? == x.checked_mul(&y.checked_mul(&z)?)?;
                let dist = x.checked_mul(&y.checked_add(&z)?)? == x.checked_mul(&y)?.checked_add(&x.checked_mul(&z)?)?;
                let inv = x.is_zero() || x.checked_mul(&x.inverse()?)? == CyclotomicElement::one(n)?;
                Ok(assoc && dist && inv)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        let pyth_ok = (0..500)
            .map(|_| -> Result<bool> {
                let b = rng.gen_range(1..=30i64);
                let a = rng.gen_range(-200..=200i64);
                let (c, s) = (cos_pi(a, b)?, sin_pi(a, b)?);
                let n = c.conductor().lcm(&s.conductor());
                let (c, s) = (c.embed(n)?, s.embed(n)?);
                Ok(c.checked_mul(&c)?.checked_add(&s.checked_mul(&s)?)? == CyclotomicElement::one(n)?)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        let d_cases: Vec<DefectArgs> = (0..200).map(|_| random_defect_args(&mut rng, 99, 200)).collect();
        let float_ok = d_cases
            .par_iter()
            .map(|a| Ok(float_close(&defect_d_exact(a)?, defect_d_float(a), 1e-9)))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count();
        let passed = field_ok == 500 && pyth_ok == 500 && float_ok == 200;
        Ok((passed, format!("field axioms {field_ok}/500, cos²+sin²=1 {pyth_ok}/500, float vs exact D {float_ok}/200")))
    })
}

pub const CRITERIA: [fn() -> CriterionResult; 8] =
    [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8];

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| c()).collect()
}
