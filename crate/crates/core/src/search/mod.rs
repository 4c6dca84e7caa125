//! Exact CN/PCN counts by enumeration, PCN search and certificates.

mod cert;
mod oracle;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    factor_qn_minus_1, pow_mod_u64, prime_divisors, prime_power, ArithError, FactorBudget,
};
use crate::ffield::{make_field, FieldArith, FieldCtx, FieldError, LogElem, LogField, TABLE_CAP};
use crate::fqxpoly::LogNormality;

pub use cert::{
    find_pcn, replay_random, verify_certificate, CertFactor, NormalityCheck, PcnCertificate,
    PrimitivityCheck, Rejection, RejectionCode, SearchConfig, SearchRecord, Strategy, Verification,
    CERTIFICATE_SCHEMA,
};
pub use oracle::{check_counts, BoundCheck, CountChecks};

/// Default number of elements a count may enumerate.
pub const ENUMERATION_CAP: u64 = 1 << 22;
/// Default trial budget for random search.
pub const TRIAL_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("n must be positive")]
    BadDegree,
    #[error("field of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: String, cap: u64 },
    #[error("blocked on factoring: {value} has the unfactored part {cofactor}")]
    BlockedOnFactoring { value: String, cofactor: String },
    #[error("no primitive completely normal element found in {trials} trials")]
    BudgetExhausted { trials: u64 },
    #[error("check failed to evaluate: {0}")]
    Check(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountConfig {
    pub enumeration_cap: u64,
    pub budget: FactorBudget,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            enumeration_cap: ENUMERATION_CAP,
            budget: FactorBudget::default(),
        }
    }
}

/// Number of elements normal over F_{q^l}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalCount {
    pub l: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub q: u64,
    pub n: u64,
    pub size: u64,
    pub primitive: u64,
    /// One entry per proper divisor `l` of `n`, ascending.
    pub normal: Vec<NormalCount>,
    pub cn: u64,
    pub pcn: u64,
}

/// Builds `F_{q^n}` over the default modulus with `q^n - 1` fully factored.
pub fn field_for(q: u64, n: u64, budget: FactorBudget) -> Result<FieldCtx, SearchError> {
    let (p, e) = prime_power(q).ok_or(SearchError::NotPrimePower(q))?;
    if n == 0 {
        return Err(SearchError::BadDegree);
    }
    let n32 = u32::try_from(n).map_err(|_| SearchError::BadDegree)?;
    let mut ctx = make_field(p, e, n32, None)?;
    let f = factor_qn_minus_1(q, n, budget)?;
    if !f.complete {
        return Err(SearchError::BlockedOnFactoring {
            value: f.value.to_string(),
            cofactor: f.cofactor.map(|c| c.to_string()).unwrap_or_default(),
        });
    }
    ctx.set_group_order_factors(f)?;
    Ok(ctx)
}

/// Exact `CN_q(n)` and `PCN_q(n)` by enumerating every nonzero element.
pub fn count_cn_pcn(q: u64, n: u64, config: &CountConfig) -> Result<CountReport, SearchError> {
    prime_power(q).ok_or(SearchError::NotPrimePower(q))?;
    if n == 0 {
        return Err(SearchError::BadDegree);
    }
    let cap = config.enumeration_cap;
    let size = u32::try_from(n)
        .ok()
        .and_then(|n| q.checked_pow(n))
        .filter(|&s| s <= cap)
        .ok_or_else(|| SearchError::CapExceeded {
            size: BigUint::from(q).pow(n as u32).to_string(),
            cap: config.enumeration_cap,
        })?;
    if n == 1 && crate::arith::is_prime_u64(q) {
        return Ok(count_prime_field(q));
    }
    let ctx = field_for(q, n, config.budget)?;
    let table = build_table(&ctx, size)?;
    Ok(count_with_table(&table, q, n))
}

fn build_table(ctx: &FieldCtx, size: u64) -> Result<LogField, SearchError> {
    LogField::new(ctx).map_err(|err| match err {
        FieldError::FieldTooLarge { .. } => SearchError::CapExceeded {
            size: size.to_string(),
            cap: TABLE_CAP,
        },
        other => other.into(),
    })
}

/// Counts for every view `q = p^e`, `n = d/e` of `F_{p^d}`, sharing one table.
pub fn count_views(p: u64, d: u32, config: &CountConfig) -> Result<Vec<CountReport>, SearchError> {
    let size = p
        .checked_pow(d)
        .filter(|&s| s <= config.enumeration_cap)
        .ok_or_else(|| SearchError::CapExceeded {
            size: BigUint::from(p).pow(d).to_string(),
            cap: config.enumeration_cap,
        })?;
    let ctx = field_for(p, d as u64, config.budget)?;
    let table = build_table(&ctx, size)?;
    Ok(crate::arith::divisors(d as u64)
        .into_iter()
        .map(|e| count_with_table(&table, p.pow(e as u32), d as u64 / e))
        .collect())
}

/// Counts over a prebuilt table of `F_{q^n}`; views `q = p^e` of one field share it.
pub fn count_with_table(t: &LogField, q: u64, n: u64) -> CountReport {
    let order = t.order();
    let prim_exps: Vec<u64> = prime_divisors(order)
        .into_iter()
        .map(|r| order / r)
        .collect();
    let norm = LogNormality::new(t, q, n);
    let full = norm.full_mask();
    let nd = norm.divisors.len();
    const CHUNK: u64 = 1 << 14;
    let chunks = order.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::new(nd);
            let mut buf = Vec::new();
            for k in c * CHUNK..((c + 1) * CHUNK).min(order) {
                let x = k as LogElem;
                // x^{N/r} = 1 in log form is k·N/r ≡ 0 (mod N)
                let primitive = prim_exps.iter().all(|&e| t.pow(x, e) != t.one());
                let mask = norm.mask(t, x, &mut buf);
                tally.add(primitive, mask, full);
            }
            tally
        })
        .reduce(|| Tally::new(nd), Tally::merge);
    CountReport {
        q,
        n,
        size: t.size(),
        primitive: tally.primitive,
        normal: norm
            .divisors
            .iter()
            .zip(&tally.normal)
            .map(|(&l, &count)| NormalCount { l, count })
            .collect(),
        cn: tally.cn,
        pcn: tally.pcn,
    }
}

/// Counts for `F_p` over itself: every nonzero element is (completely) normal.
///
/// Walks `g^k` for the least primitive root `g`, checks that every nonzero
/// residue is reached exactly once, and counts the `k` with `gcd(k, p - 1) = 1`.
pub fn count_prime_field(p: u64) -> CountReport {
    assert!((2..1 << 32).contains(&p), "p must be a prime below 2^32");
    let order = p - 1;
    let primes: Vec<u64> = prime_divisors(order);
    let g = (1..p)
        .find(|&g| primes.iter().all(|&r| pow_mod_u64(g, order / r, p) != 1))
        .expect("a primitive root exists");
    assert!(walk_covers_units(p, g), "powers of g miss a unit");
    // k in [0, p - 1) is the log of g^k; it is primitive iff no r | p - 1 divides k
    let mut hit = vec![false; order as usize];
    for &r in &primes {
        for k in (0..order).step_by(r as usize) {
            hit[k as usize] = true;
        }
    }
    let primitive = hit.iter().filter(|&&h| !h).count() as u64;
    CountReport {
        q: p,
        n: 1,
        size: p,
        primitive,
        normal: Vec::new(),
        cn: order,
        pcn: primitive,
    }
}

/// Whether `g^k`, `0 ≤ k < p - 1`, are pairwise distinct with `g^{p-1} = 1`.
fn walk_covers_units(p: u64, g: u64) -> bool {
    const LANES: usize = 4;
    let order = p - 1;
    let len = order.div_ceil(LANES as u64);
    // Shoup multiplication by the fixed g
    let g_shoup = (((g as u128) << 64) / p as u128) as u64;
    let mul_g = |x: u64| {
        let qhat = ((x as u128 * g_shoup as u128) >> 64) as u64;
        let r = x.wrapping_mul(g).wrapping_sub(qhat.wrapping_mul(p));
        if r >= p {
            r - p
        } else {
            r
        }
    };
    let mut seen = vec![0u64; (p as usize).div_ceil(64)];
    // independent lanes start at g^{i·len}; their chains interleave for throughput
    let mut cur = [0u64; LANES];
    for (i, c) in cur.iter_mut().enumerate() {
        *c = pow_mod_u64(g, i as u64 * len, p);
    }
    let mut fresh = true;
    for k in 0..len {
        for (i, c) in cur.iter_mut().enumerate() {
            if i as u64 * len + k < order {
                let (w, b) = ((*c / 64) as usize, 1u64 << (*c % 64));
                fresh &= seen[w] & b == 0;
                seen[w] |= b;
                *c = mul_g(*c);
            }
        }
    }
    fresh && pow_mod_u64(g, order, p) == 1
}

struct Tally {
    primitive: u64,
    normal: Vec<u64>,
    cn: u64,
    pcn: u64,
}

impl Tally {
    fn new(nd: usize) -> Self {
        Tally {
            primitive: 0,
            normal: vec![0; nd],
            cn: 0,
            pcn: 0,
        }
    }

    fn add(&mut self, primitive: bool, mask: u64, full: u64) {
        self.primitive += primitive as u64;
        for (i, c) in self.normal.iter_mut().enumerate() {
            *c += (mask >> i) & 1;
        }
        if mask == full {
            self.cn += 1;
            self.pcn += primitive as u64;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.primitive += other.primitive;
        for (a, b) in self.normal.iter_mut().zip(&other.normal) {
            *a += b;
        }
        self.cn += other.cn;
        self.pcn += other.pcn;
        self
    }
}

#[cfg(test)]
mod tests;
