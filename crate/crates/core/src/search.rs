//! Deterministic sweeps over the parameter space.

use std::io::Write;

use rayon::prelude::*;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::family::{classify_mu28, twenty_eight_mu, Membership};
use crate::invariants::{h4_order, invariant_report, validate_pair, InvariantReport, ParamPair, Triple};

/// Which pairs to enumerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    /// Every valid pair with all |entries| ≤ max, lexicographic in (a1,a2,a3,b1,b2,b3).
    Box { max: i64 },
    /// M_k = ((-3,-3,1),(1,4k+1,4k+1)) in the given order.
    Mk(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub space: Space,
    pub target_mu: Option<Rational>,
    pub homotopy_sphere: bool,
    pub membership: Option<Membership>,
    /// Resume strictly after this tuple.
    pub start_after: Option<[i64; 6]>,
}

impl SearchConfig {
    pub fn new(space: Space) -> Self {
        SearchConfig { space, target_mu: None, homotopy_sphere: false, membership: None, start_after: None }
    }

    fn keep(&self, rep: &InvariantReport) -> Result<bool> {
        if let Some(t) = &self.target_mu {
            if &rep.mu != t {
                return Ok(false);
            }
        }
        let sphere = rep.n.magnitude() == &1u32.into();
        if (self.homotopy_sphere || self.membership.is_some()) && !sphere {
            return Ok(false);
        }
        if let Some(want) = self.membership {
            return Ok(classify_mu28(twenty_eight_mu(&rep.mu)?) == want);
        }
        Ok(true)
    }
}

/// Entries ≡ 1 mod 4 in [-max, max], ascending.
pub fn admissible(max: i64) -> Vec<i64> {
    let lo = -max + (1 - -max).rem_euclid(4);
    (lo..=max).step_by(4).collect()
}

pub fn tuple(pair: &ParamPair) -> [i64; 6] {
    let (a, b) = (pair.a(), pair.b());
    [a.t1, a.t2, a.t3, b.t1, b.t2, b.t3]
}

fn mk_pair(k: i64) -> Result<ParamPair> {
    let e = k.checked_mul(4).and_then(|x| x.checked_add(1)).ok_or(Error::Overflow("M_k entry"))?;
    validate_pair(Triple::new(-3, -3, 1), Triple::new(1, e, e))
}

/// Reports for the valid, finite-H⁴ pairs among the candidates, in order.
fn evaluate(config: &SearchConfig, candidates: Vec<[i64; 6]>) -> Result<Vec<InvariantReport>> {
    let rows: Vec<Option<InvariantReport>> = candidates
        .par_iter()
        .map(|t| {
            if config.start_after.is_some_and(|c| *t <= c) {
                return Ok(None);
            }
            let Ok(pair) = validate_pair(Triple::new(t[0], t[1], t[2]), Triple::new(t[3], t[4], t[5])) else {
                return Ok(None);
            };
            if h4_order(&pair)? == 0 {
                return Ok(None);
            }
            let rep = invariant_report(&pair)?;
            Ok(config.keep(&rep)?.then_some(rep))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Walks the space block by block; blocks are evaluated in parallel and
/// handed to `emit` in enumeration order.
pub fn stream_search(config: &SearchConfig, mut emit: impl FnMut(&InvariantReport) -> Result<()>) -> Result<usize> {
    let mut count = 0;
    let mut flush = |block: Vec<[i64; 6]>| -> Result<()> {
        for rep in evaluate(config, block)? {
            emit(&rep)?;
            count += 1;
        }
        Ok(())
    };
    match &config.space {
        Space::Mk(ks) => {
            let block = ks.iter().map(|&k| mk_pair(k).map(|p| tuple(&p))).collect::<Result<Vec<_>>>()?;
            // M_k order is the caller's; the cursor still means "skip up to and including"
            let block = match config.start_after {
                Some(c) => block.iter().position(|t| *t == c).map_or(block.clone(), |i| block[i + 1..].to_vec()),
                None => block,
            };
            let cfg = SearchConfig { start_after: None, ..config.clone() };
            for rep in evaluate(&cfg, block)? {
                emit(&rep)?;
                count += 1;
            }
        }
        Space::Box { max } => {
            let vals = admissible(*max);
            for &a1 in &vals {
                for &a2 in &vals {
                    if let Some(c) = config.start_after {
                        if [a1, a2] < [c[0], c[1]] {
                            continue;
                        }
                    }
                    let mut block = Vec::with_capacity(vals.len().pow(4));
                    for &a3 in &vals {
                        for &b1 in &vals {
                            for &b2 in &vals {
                                for &b3 in &vals {
                                    block.push([a1, a2, a3, b1, b2, b3]);
                                }
                            }
                        }
                    }
                    flush(block)?;
                }
            }
        }
    }
    Ok(count)
}

/// Streams CSV rows to `out`, header before the first row; I/O failures carry the last written tuple.
pub fn write_search_csv(config: &SearchConfig, out: &mut dyn Write) -> Result<usize> {
    let mut last = String::from("start");
    let io = |last: &str, e: &dyn std::fmt::Display| Error::Io { cursor: last.to_string(), detail: e.to_string() };
    let mut w = csv::Writer::from_writer(out);
    let n = stream_search(config, |rep| {
        if last == "start" {
            w.write_record(crate::invariants::CSV_HEADER).map_err(|e| io(&last, &e))?;
        }
        w.write_record(rep.csv_record()).map_err(|e| io(&last, &e))?;
        w.flush().map_err(|e| io(&last, &e))?;
        last = rep.csv_record()[..6].join(",");
        Ok(())
    })?;
    w.flush().map_err(|e| io(&last, &e))?;
    Ok(n)
}
