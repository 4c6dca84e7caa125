//! Scans that chain the conditions into full case analyses for `q > n`-type
//! and `q > m`-type statements.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    cond2, cond2_real, cond3, cond_p_family, ip_pcn2, robin_form, BoundsError, Cond3Mode,
    EvalOptions, PFamily, Result,
};
use crate::arith::{
    is_prime_power, next_prime_power, prime_power, sieve, FactorBudget, RobinConstant,
};
use crate::classify::{is_completely_basic, is_prime_or_prime_square};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NqPair {
    pub n: u64,
    pub q: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LmPair {
    pub l: u32,
    pub m: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LmqTriple {
    pub l: u32,
    pub m: u64,
    pub q: u64,
}

impl LmqTriple {
    /// `(n, q)` with `n = p^ℓ m`.
    pub fn pair(self) -> NqPair {
        let p = prime_power(self.q).expect("q is a prime power").0;
        NqPair {
            n: p.pow(self.l) * self.m,
            q: self.q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: u64,
    pub q0: u64,
    pub q1: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobinCrossover {
    pub constant: RobinConstant,
    pub scan_limit: u64,
    pub violations: usize,
    pub last_violation: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Config {
    pub n_max: u64,
    /// `q0` is the least prime power `≥ n + q0_offset`.
    pub q0_offset: u64,
    pub robin_scan_limit: u64,
    pub opts: EvalOptions,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Theorem1Config {
            n_max: 1212,
            q0_offset: 2,
            robin_scan_limit: 5000,
            opts: EvalOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Result {
    pub config: Theorem1Config,
    pub table1: Vec<Table1Row>,
    /// Values of `n > 984` that produce a row.
    pub rows_above_984: Vec<u64>,
    /// Rows of the table under the other `q0` reading (`n + 1` vs `n + 2`)
    /// that differ from the default table, in either direction.
    pub q0_reading_diff: Vec<Table1Row>,
    pub region: Vec<NqPair>,
    pub after_c16: Vec<NqPair>,
    pub after_exact_w: Vec<NqPair>,
    pub after_basic_filter: Vec<NqPair>,
    pub robin: Vec<RobinCrossover>,
}

/// `cond2` rows: `n` in `[2, n_max]`, not a prime or a prime square, failing at `q0`.
pub fn table1(n_max: u64, q0_offset: u64, opts: EvalOptions) -> Result<Vec<Table1Row>> {
    let ns: Vec<u64> = (2..=n_max)
        .filter(|&n| !is_prime_or_prime_square(n))
        .collect();
    let rows: Vec<Option<Table1Row>> = ns
        .par_iter()
        .map(|&n| -> Result<Option<Table1Row>> {
            let q0 = next_prime_power(n + q0_offset);
            if cond2(n, q0, None, opts)?.holds {
                return Ok(None);
            }
            let mut q = next_prime_power(q0 + 1);
            while !cond2(n, q, None, opts)?.holds {
                q = next_prime_power(q + 1);
            }
            Ok(Some(Table1Row { n, q0, q1: q }))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Last `n ≤ limit` at which the Robin-substituted `cond2` fails at `q = n + 2`.
pub fn robin_crossover(
    limit: u64,
    constant: RobinConstant,
    opts: EvalOptions,
) -> Result<RobinCrossover> {
    let bad: Vec<u64> = (3..=limit)
        .into_par_iter()
        .map(|n| -> Result<Option<u64>> {
            let q = num_rational::BigRational::from_integer((n + 2).into());
            Ok((!cond2_real(n, &q, Some(constant), opts)?.holds).then_some(n))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(RobinCrossover {
        constant,
        scan_limit: limit,
        violations: bad.len(),
        last_violation: bad.last().copied(),
    })
}

fn region_of(rows: &[Table1Row]) -> Vec<NqPair> {
    rows.iter()
        .flat_map(|r| {
            (r.q0..r.q1)
                .filter(|&q| is_prime_power(q))
                .map(move |q| NqPair { n: r.n, q })
        })
        .collect()
}

fn failing<F>(pairs: &[NqPair], f: F) -> Result<Vec<NqPair>>
where
    F: Fn(NqPair) -> Result<bool> + Sync,
{
    let keep: Vec<bool> = pairs
        .par_iter()
        .map(|&pq| f(pq).map(|h| !h))
        .collect::<Result<_>>()?;
    Ok(pairs
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| *p)
        .collect())
}

pub fn pipeline_theorem1(config: Theorem1Config) -> Result<Theorem1Result> {
    let opts = config.opts;
    let rows = table1(config.n_max, config.q0_offset, opts)?;
    let other_offset = if config.q0_offset == 2 { 1 } else { 2 };
    let alt = table1(config.n_max, other_offset, opts)?;
    let mut q0_reading_diff: Vec<Table1Row> =
        alt.iter().filter(|r| !rows.contains(r)).copied().collect();
    q0_reading_diff.extend(rows.iter().filter(|r| !alt.contains(r)).copied());
    q0_reading_diff.sort_by_key(|r| (r.n, r.q0));
    let region = region_of(&rows);
    let with_pair = |e: BoundsError, pq: NqPair| match e {
        BoundsError::IncompleteFactorization { .. } => e,
        other => BoundsError::Precondition(format!("(n, q) = ({}, {}): {other}", pq.n, pq.q)),
    };
    let after_c16 = failing(&region, |pq| {
        cond3(pq.q, pq.n, Cond3Mode::C16, opts)
            .map(|r| r.holds)
            .map_err(|e| with_pair(e, pq))
    })?;
    let after_exact_w = failing(&after_c16, |pq| {
        cond3(pq.q, pq.n, Cond3Mode::Exact, opts)
            .map(|r| r.holds)
            .map_err(|e| with_pair(e, pq))
    })?;
    let after_basic_filter = failing(&after_exact_w, |pq| Ok(is_completely_basic(pq.q, pq.n)?))?;
    let robin = [RobinConstant::Exp0578, RobinConstant::ExpGamma]
        .into_iter()
        .map(|c| robin_crossover(config.robin_scan_limit, c, opts))
        .collect::<Result<_>>()?;
    Ok(Theorem1Result {
        config,
        rows_above_984: rows.iter().filter(|r| r.n > 984).map(|r| r.n).collect(),
        table1: rows,
        q0_reading_diff,
        region,
        after_c16,
        after_exact_w,
        after_basic_filter,
        robin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem0Config {
    pub podd_l_max: u32,
    pub podd_m_max: u64,
    pub p2_l_max: u32,
    pub p2_m_max: u64,
    pub a12_robin_m_max: u64,
    /// The exact `a = 12` scan covers odd `m` up to the larger of this and the
    /// last Robin-form violation.
    pub a12_exact_m_min_limit: u64,
    pub opts: EvalOptions,
}

impl Default for Theorem0Config {
    fn default() -> Self {
        Theorem0Config {
            podd_l_max: 6,
            podd_m_max: 200,
            p2_l_max: 9,
            p2_m_max: 401,
            a12_robin_m_max: 3001,
            a12_exact_m_min_limit: 873,
            opts: EvalOptions {
                precision_bits: 64,
                budget: FactorBudget::new(200_000_000),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem0Result {
    pub config: Theorem0Config,
    /// `(ℓ, m)`, `m ≥ 3`, violating the Robin-form condition for `p > 2`.
    pub podd_robin_exceptions: Vec<LmPair>,
    /// Triples found by scanning odd prime powers upward from `max(m+2, 7)`
    /// and stopping at the first `q` that satisfies the condition.
    pub podd_triples: Vec<LmqTriple>,
    /// All failing triples, scanning each characteristic separately.
    pub podd_triples_all: Vec<LmqTriple>,
    pub podd_nonbasic: Vec<LmqTriple>,
    pub podd_all_nonbasic: Vec<LmqTriple>,
    pub p2_robin_exceptions: Vec<LmPair>,
    pub p2_triples: Vec<LmqTriple>,
    pub p2_nonbasic: Vec<LmqTriple>,
    pub a12_robin_last_violation: Option<u64>,
    pub a12_exceptions: Vec<LmqTriple>,
    pub a12_after_filter: Vec<LmqTriple>,
    pub a12_main_failures: Vec<LmqTriple>,
}

fn robin_exceptions(
    ls: impl Iterator<Item = u32>,
    ms: &[u64],
    which: PFamily,
    opts: EvalOptions,
) -> Result<Vec<LmPair>> {
    let grid: Vec<LmPair> = ls
        .flat_map(|l| ms.iter().map(move |&m| LmPair { l, m }))
        .collect();
    let bad: Vec<bool> = grid
        .par_iter()
        .map(|lm| robin_form(lm.l, lm.m, which, opts).map(|r| !r.holds))
        .collect::<Result<_>>()?;
    Ok(grid
        .into_iter()
        .zip(bad)
        .filter(|(_, b)| *b)
        .map(|(x, _)| x)
        .collect())
}

/// Failing `q = p^k` for `k` upward from the least power `≥ q_min`, until the first success.
fn scan_powers(
    lm: LmPair,
    p: u64,
    q_min: u64,
    which: PFamily,
    opts: EvalOptions,
) -> Result<(Vec<LmqTriple>, u64)> {
    let mut q = p;
    while q < q_min {
        q *= p;
    }
    let first = q;
    let mut out = Vec::new();
    loop {
        if cond_p_family(lm.l, lm.m, q, which, opts)?.holds {
            return Ok((out, first));
        }
        out.push(LmqTriple {
            l: lm.l,
            m: lm.m,
            q,
        });
        q = q
            .checked_mul(p)
            .ok_or_else(|| BoundsError::Precondition("q overflow in scan".into()))?;
    }
}

fn podd_scans(pairs: &[LmPair], opts: EvalOptions) -> Result<(Vec<LmqTriple>, Vec<LmqTriple>)> {
    let odd_primes: Vec<u64> = sieve(1 << 20).into_iter().skip(1).map(u64::from).collect();
    let per_pair: Vec<(Vec<LmqTriple>, Vec<LmqTriple>)> = pairs
        .par_iter()
        .map(|&lm| -> Result<_> {
            let q_min = (lm.m + 2).max(7);
            // stop-at-first-success over all odd prime powers
            let mut first_stop = Vec::new();
            let mut q = q_min;
            loop {
                q = next_prime_power(q);
                let p = prime_power(q).unwrap().0;
                if p == 2 || lm.m % p == 0 {
                    q += 1;
                    continue;
                }
                if cond_p_family(lm.l, lm.m, q, PFamily::Cond2POdd, opts)?.holds {
                    break;
                }
                first_stop.push(LmqTriple {
                    l: lm.l,
                    m: lm.m,
                    q,
                });
                q += 1;
            }
            // per characteristic: the condition increases with q for fixed p, and at
            // q = p it increases with p, so the scan ends at the first prime p ≥ q_min
            // whose own q = p succeeds
            let mut all = Vec::new();
            for &p in &odd_primes {
                if lm.m % p == 0 {
                    continue;
                }
                let (bad, first) = scan_powers(lm, p, q_min, PFamily::Cond2POdd, opts)?;
                let done = first == p && bad.is_empty();
                all.extend(bad);
                if done {
                    break;
                }
            }
            all.sort();
            Ok((first_stop, all))
        })
        .collect::<Result<_>>()?;
    let mut first = Vec::new();
    let mut all = Vec::new();
    for (f, a) in per_pair {
        first.extend(f);
        all.extend(a);
    }
    first.sort();
    all.sort();
    Ok((first, all))
}

fn nonbasic(ts: &[LmqTriple]) -> Result<Vec<LmqTriple>> {
    let mut out = Vec::new();
    for &t in ts {
        let pq = t.pair();
        if !is_completely_basic(pq.q, pq.n)? {
            out.push(t);
        }
    }
    Ok(out)
}

pub fn pipeline_theorem0(config: Theorem0Config) -> Result<Theorem0Result> {
    let opts = config.opts;
    // p > 2
    let ms: Vec<u64> = (3..=config.podd_m_max).collect();
    let podd_robin_exceptions =
        robin_exceptions(1..=config.podd_l_max, &ms, PFamily::Cond2POdd, opts)?;
    let mut podd_pairs: Vec<LmPair> = (1..=config.podd_l_max)
        .map(|l| LmPair { l, m: 2 })
        .collect();
    podd_pairs.extend(&podd_robin_exceptions);
    let (podd_triples, podd_triples_all) = podd_scans(&podd_pairs, opts)?;
    let podd_nonbasic = nonbasic(&podd_triples)?;
    let podd_all_nonbasic = nonbasic(&podd_triples_all)?;

    // p = 2, ℓ ≥ 2
    let odd_ms: Vec<u64> = (3..=config.p2_m_max).step_by(2).collect();
    let p2_robin_exceptions =
        robin_exceptions(2..=config.p2_l_max, &odd_ms, PFamily::Cond3P2, opts)?;
    let mut p2_triples = Vec::new();
    for &lm in &p2_robin_exceptions {
        p2_triples.extend(scan_powers(lm, 2, (lm.m + 1).max(8), PFamily::Cond3P2, opts)?.0);
    }
    p2_triples.sort();
    let p2_nonbasic = nonbasic(&p2_triples)?;

    // p = 2, ℓ = 1
    let a12_ms: Vec<u64> = (3..=config.a12_robin_m_max).step_by(2).collect();
    let a12_robin = robin_exceptions(std::iter::once(1), &a12_ms, PFamily::A12, opts)?;
    let a12_robin_last_violation = a12_robin.last().map(|lm| lm.m);
    let exact_limit = config
        .a12_exact_m_min_limit
        .max(a12_robin_last_violation.unwrap_or(0));
    let exact_ms: Vec<u64> = (3..=exact_limit).step_by(2).collect();
    let per_m: Vec<Vec<LmqTriple>> = exact_ms
        .par_iter()
        .map(|&m| {
            scan_powers(LmPair { l: 1, m }, 2, (m + 2).max(8), PFamily::A12, opts).map(|r| r.0)
        })
        .collect::<Result<_>>()?;
    let a12_exceptions: Vec<LmqTriple> = per_m.into_iter().flatten().collect();
    let a12_after_filter: Vec<LmqTriple> = a12_exceptions
        .iter()
        .filter(|t| (t.q - 1) % t.m != 0)
        .copied()
        .collect();
    let verdicts: Vec<bool> = a12_after_filter
        .par_iter()
        .map(|t| ip_pcn2(t.l, t.m, t.q, opts).map(|r| r.holds))
        .collect::<Result<_>>()?;
    let a12_main_failures = a12_after_filter
        .iter()
        .zip(verdicts)
        .filter(|(_, h)| !h)
        .map(|(t, _)| *t)
        .collect();

    Ok(Theorem0Result {
        config,
        podd_robin_exceptions,
        podd_triples,
        podd_triples_all,
        podd_nonbasic,
        podd_all_nonbasic,
        p2_robin_exceptions,
        p2_triples,
        p2_nonbasic,
        a12_robin_last_violation,
        a12_exceptions,
        a12_after_filter,
        a12_main_failures,
    })
}

/// Table 2 as printed, `(n, q)` in reading order (contains `(6, 8)` twice).
pub const PUBLISHED_TABLE2: [(u64, u64); 18] = [
    (6, 8),
    (6, 11),
    (6, 17),
    (6, 23),
    (6, 29),
    (8, 11),
    (8, 19),
    (12, 17),
    (12, 23),
    (12, 29),
    (12, 41),
    (24, 29),
    (24, 41),
    (21, 9),
    (12, 8),
    (20, 8),
    (24, 8),
    (6, 8),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2 {
    /// Deduplicated union of the residual pairs of both case analyses, sorted.
    pub pairs: Vec<NqPair>,
    /// Printed entries absent from `pairs`, with multiplicity.
    pub printed_not_derived: Vec<NqPair>,
    /// Derived pairs absent from the printed list.
    pub derived_not_printed: Vec<NqPair>,
    /// Printed entries occurring more than once.
    pub printed_duplicates: Vec<NqPair>,
}

pub fn table2(t1: &Theorem1Result, t0: &Theorem0Result) -> Table2 {
    let mut set: BTreeSet<NqPair> = t1.after_basic_filter.iter().copied().collect();
    for t in t0
        .podd_nonbasic
        .iter()
        .chain(&t0.p2_nonbasic)
        .chain(&t0.a12_main_failures)
    {
        set.insert(t.pair());
    }
    let printed: Vec<NqPair> = PUBLISHED_TABLE2
        .iter()
        .map(|&(n, q)| NqPair { n, q })
        .collect();
    let mut remaining: Vec<NqPair> = set.iter().copied().collect();
    let mut printed_not_derived = Vec::new();
    let mut printed_duplicates = Vec::new();
    let mut seen = BTreeSet::new();
    for p in &printed {
        if !seen.insert(*p) {
            printed_duplicates.push(*p);
        }
        if let Some(i) = remaining.iter().position(|x| x == p) {
            remaining.remove(i);
        } else if !set.contains(p) {
            printed_not_derived.push(*p);
        }
    }
    let derived_not_printed = set
        .iter()
        .filter(|x| !printed.contains(x))
        .copied()
        .collect();
    Table2 {
        pairs: set.into_iter().collect(),
        printed_not_derived,
        derived_not_printed,
        printed_duplicates,
    }
}

/// One labelled step of a case analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub count: usize,
    pub items: StageItems,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "list", rename_all = "snake_case")]
pub enum StageItems {
    Table1(Vec<Table1Row>),
    Pairs(Vec<NqPair>),
    LmPairs(Vec<LmPair>),
    Triples(Vec<LmqTriple>),
}

impl StageItems {
    fn len(&self) -> usize {
        match self {
            StageItems::Table1(v) => v.len(),
            StageItems::Pairs(v) => v.len(),
            StageItems::LmPairs(v) => v.len(),
            StageItems::Triples(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub pipeline: String,
    pub stages: Vec<Stage>,
}

fn stage(label: &str, items: StageItems) -> Stage {
    Stage {
        label: label.to_string(),
        count: items.len(),
        items,
    }
}

impl From<&Theorem1Result> for PipelineResult {
    fn from(r: &Theorem1Result) -> Self {
        PipelineResult {
            pipeline: "thm1".into(),
            stages: vec![
                stage("table1", StageItems::Table1(r.table1.clone())),
                stage("region", StageItems::Pairs(r.region.clone())),
                stage(
                    "cond3_c16_survivors",
                    StageItems::Pairs(r.after_c16.clone()),
                ),
                stage(
                    "cond3_exact_w_survivors",
                    StageItems::Pairs(r.after_exact_w.clone()),
                ),
                stage(
                    "not_completely_basic",
                    StageItems::Pairs(r.after_basic_filter.clone()),
                ),
            ],
        }
    }
}

impl From<&Theorem0Result> for PipelineResult {
    fn from(r: &Theorem0Result) -> Self {
        PipelineResult {
            pipeline: "thm0".into(),
            stages: vec![
                stage(
                    "p_odd_robin_exceptions",
                    StageItems::LmPairs(r.podd_robin_exceptions.clone()),
                ),
                stage("p_odd_triples", StageItems::Triples(r.podd_triples.clone())),
                stage(
                    "p_odd_triples_all_characteristics",
                    StageItems::Triples(r.podd_triples_all.clone()),
                ),
                stage(
                    "p_odd_not_completely_basic",
                    StageItems::Triples(r.podd_nonbasic.clone()),
                ),
                stage(
                    "p2_robin_exceptions",
                    StageItems::LmPairs(r.p2_robin_exceptions.clone()),
                ),
                stage("p2_triples", StageItems::Triples(r.p2_triples.clone())),
                stage(
                    "p2_not_completely_basic",
                    StageItems::Triples(r.p2_nonbasic.clone()),
                ),
                stage(
                    "a12_exceptions",
                    StageItems::Triples(r.a12_exceptions.clone()),
                ),
                stage(
                    "a12_after_m_divides_q_minus_1",
                    StageItems::Triples(r.a12_after_filter.clone()),
                ),
                stage(
                    "a12_main_inequality_failures",
                    StageItems::Triples(r.a12_main_failures.clone()),
                ),
            ],
        }
    }
}

/// Groups `(ℓ, m)` pairs into `(ℓ, m_min..=m_max)` runs over consecutive
/// admissible `m` (step 1 or 2).
pub fn lm_ranges(pairs: &[LmPair], step: u64) -> Vec<(u32, u64, u64)> {
    let mut out: Vec<(u32, u64, u64)> = Vec::new();
    for lm in pairs {
        match out.last_mut() {
            Some((l, _, hi)) if *l == lm.l && *hi + step == lm.m => *hi = lm.m,
            _ => out.push((lm.l, lm.m, lm.m)),
        }
    }
    out
}
