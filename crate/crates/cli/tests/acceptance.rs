//! End-to-end acceptance run: one line per criterion.
//!
//! Criteria that drive a command go through the `pcn-lab` binary and read its
//! JSON; the sweeps call `pcn-core` directly. A sub-check listed in `KNOWN`
//! is a recorded disagreement with a printed value: it still prints FAIL but
//! does not fail the run.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use pcn_core::arith::{
    decimal, factor_u64, lemma_constant_sup, lemma_w_bound_holds, sieve, FactorBudget,
    RobinConstant,
};
use pcn_core::bounds::{
    lm_ranges, LmPair, LmqTriple, NqPair, Table1Row, Table2, Theorem0Result, Theorem1Result,
};
use pcn_core::chars::CharSystem;
use pcn_core::search::{
    check_counts, count_prime_field, count_views, CountChecks, CountConfig, PcnCertificate,
    Verification,
};

/// Sub-checks whose printed value is not reproduced by the stated procedure.
const KNOWN: &[&str] = &[
    "p>2 Robin-form exceptions: 54 pairs (1,3..49) (2,3..8) (3,3)",
    "p=2 triples: exactly the 5 printed",
];

struct Check {
    label: String,
    pass: bool,
}

fn check(label: impl Into<String>, pass: bool) -> Check {
    Check {
        label: label.into(),
        pass,
    }
}

struct Outcome {
    summary: String,
    checks: Vec<Check>,
}

#[derive(Deserialize)]
struct Envelope<T> {
    schema: String,
    result: T,
}

fn lab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pcn-lab"))
        .args(args)
        .output()
        .expect("pcn-lab runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn lab_json<T: DeserializeOwned>(args: &[&str]) -> (i32, T) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let (code, out) = lab(&all);
    let env: Envelope<T> =
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
    assert_eq!(env.schema, "pcn-lab/1");
    (code, env.result)
}

fn pairs(v: &[(u64, u64)]) -> Vec<NqPair> {
    v.iter().map(|&(n, q)| NqPair { n, q }).collect()
}

fn triples(v: &[(u32, u64, u64)]) -> Vec<LmqTriple> {
    v.iter().map(|&(l, m, q)| LmqTriple { l, m, q }).collect()
}

const TABLE1: [(u64, u64, u64); 42] = [
    (6, 8, 1259),
    (8, 11, 431),
    (10, 13, 223),
    (12, 16, 419),
    (14, 16, 107),
    (15, 17, 79),
    (16, 19, 137),
    (18, 23, 179),
    (20, 23, 139),
    (21, 23, 49),
    (22, 25, 59),
    (24, 27, 243),
    (26, 29, 49),
    (27, 29, 41),
    (28, 31, 89),
    (30, 32, 173),
    (32, 37, 79),
    (34, 37, 41),
    (36, 41, 193),
    (40, 43, 113),
    (42, 47, 121),
    (44, 47, 61),
    (45, 47, 49),
    (48, 53, 191),
    (50, 53, 59),
    (54, 59, 97),
    (56, 59, 81),
    (60, 64, 256),
    (66, 71, 83),
    (72, 79, 211),
    (80, 83, 101),
    (84, 89, 181),
    (90, 97, 163),
    (96, 101, 163),
    (108, 113, 151),
    (120, 125, 311),
    (132, 137, 139),
    (144, 149, 211),
    (168, 173, 229),
    (180, 191, 311),
    (240, 243, 343),
    (360, 367, 439),
];

const EXACT_W_SURVIVORS: [(u64, u64); 37] = [
    (6, 8),
    (6, 9),
    (6, 11),
    (6, 13),
    (6, 16),
    (6, 17),
    (6, 19),
    (6, 23),
    (6, 25),
    (6, 29),
    (6, 31),
    (6, 37),
    (6, 43),
    (6, 49),
    (6, 61),
    (8, 11),
    (8, 13),
    (8, 17),
    (8, 19),
    (8, 25),
    (12, 17),
    (12, 19),
    (12, 23),
    (12, 25),
    (12, 29),
    (12, 31),
    (12, 37),
    (12, 41),
    (12, 43),
    (12, 49),
    (12, 61),
    (12, 73),
    (18, 37),
    (24, 29),
    (24, 37),
    (24, 41),
    (24, 49),
];

const NOT_BASIC: [(u64, u64); 13] = [
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
];

/// `(m, lowest exponent, highest exponent)` of the printed a = 12 exceptions `(1, m, 2^k)`.
const A12_RANGES: [(u64, u32, u32); 17] = [
    (3, 3, 34),
    (5, 3, 21),
    (7, 4, 16),
    (9, 4, 13),
    (11, 4, 11),
    (13, 4, 9),
    (15, 5, 10),
    (17, 5, 8),
    (19, 5, 7),
    (21, 5, 8),
    (23, 5, 6),
    (25, 5, 6),
    (27, 5, 7),
    (29, 5, 5),
    (33, 6, 6),
    (35, 6, 6),
    (45, 6, 6),
];

const TABLE2: [(u64, u64); 18] = [
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

fn criterion1(t1: &Theorem1Result, elapsed: Duration) -> Outcome {
    let expected: Vec<Table1Row> = TABLE1
        .iter()
        .map(|&(n, q0, q1)| Table1Row { n, q0, q1 })
        .collect();
    let has = |n, q0, q1| t1.table1.contains(&Table1Row { n, q0, q1 });
    Outcome {
        summary: format!(
            "Table 1: {} rows in {:.1}s",
            t1.table1.len(),
            elapsed.as_secs_f64()
        ),
        checks: vec![
            check("42 rows equal to the printed table", t1.table1 == expected),
            check(
                "anchor rows (6,8,1259) (14,16,107) (360,367,439)",
                has(6, 8, 1259) && has(14, 16, 107) && has(360, 367, 439),
            ),
            check(
                "runtime under 10 minutes",
                elapsed < Duration::from_secs(600),
            ),
        ],
    }
}

fn criterion2(t1: &Theorem1Result) -> Outcome {
    Outcome {
        summary: format!(
            "stage counts {}/{}/{}/{}",
            t1.region.len(),
            t1.after_c16.len(),
            t1.after_exact_w.len(),
            t1.after_basic_filter.len()
        ),
        checks: vec![
            check("region pairs: 1162", t1.region.len() == 1162),
            check(
                "COND3 with c_{q',16} survivors: 47",
                t1.after_c16.len() == 47,
            ),
            check(
                "exact-W survivors: the printed 37",
                t1.after_exact_w == pairs(&EXACT_W_SURVIVORS),
            ),
            check(
                "not completely basic: the printed 13",
                t1.after_basic_filter == pairs(&NOT_BASIC),
            ),
        ],
    }
}

fn criterion3(t0: &Theorem0Result) -> Outcome {
    let podd_printed: Vec<LmPair> = (3..=49)
        .map(|m| LmPair { l: 1, m })
        .chain((3..=8).map(|m| LmPair { l: 2, m }))
        .chain([LmPair { l: 3, m: 3 }])
        .collect();
    let podd_ranges: Vec<String> = lm_ranges(&t0.podd_robin_exceptions, 1)
        .into_iter()
        .map(|(l, a, b)| {
            if a == b {
                format!("({l},{a})")
            } else {
                format!("({l},{a}..{b})")
            }
        })
        .collect();
    let a12: Vec<LmqTriple> = A12_RANGES
        .iter()
        .flat_map(|&(m, lo, hi)| (lo..=hi).map(move |k| LmqTriple { l: 1, m, q: 1 << k }))
        .collect();
    let a12_filtered: Vec<LmqTriple> = a12
        .iter()
        .copied()
        .filter(|t| (t.q - 1) % t.m != 0)
        .collect();
    let mut derived_a12 = t0.a12_exceptions.clone();
    derived_a12.sort();
    let mut printed_a12 = a12.clone();
    printed_a12.sort();
    let mut derived_filtered = t0.a12_after_filter.clone();
    derived_filtered.sort();
    let mut printed_filtered = a12_filtered.clone();
    printed_filtered.sort();
    Outcome {
        summary: format!(
            "p>2 Robin pairs {} = {}, p=2 triples {}, a12 {}/{}",
            t0.podd_robin_exceptions.len(),
            podd_ranges.join(" "),
            t0.p2_triples.len(),
            t0.a12_exceptions.len(),
            t0.a12_after_filter.len()
        ),
        checks: vec![
            check(KNOWN[0], t0.podd_robin_exceptions == podd_printed),
            check(
                "p>2 triples: (1,2,7) (1,2,9) (1,7,9)",
                t0.podd_triples == triples(&[(1, 2, 7), (1, 2, 9), (1, 7, 9)]),
            ),
            check(
                KNOWN[1],
                t0.p2_triples == triples(&[(2, 3, 8), (2, 3, 16), (2, 5, 8), (2, 7, 8), (3, 3, 8)]),
            ),
            check(
                "p=2 non-basic survivors: (2,3,8) (2,5,8) (3,3,8)",
                t0.p2_nonbasic == triples(&[(2, 3, 8), (2, 5, 8), (3, 3, 8)]),
            ),
            check(
                "a12 Robin form satisfied for all m > 873",
                t0.a12_robin_last_violation.is_some_and(|m| m <= 873),
            ),
            check(
                "a12: the printed 116 exceptions",
                a12.len() == 116 && derived_a12 == printed_a12,
            ),
            check(
                "a12: the printed 85 after m | q-1",
                a12_filtered.len() == 85 && derived_filtered == printed_filtered,
            ),
            check(
                "a12 main inequality: only (1,3,8)",
                t0.a12_main_failures == triples(&[(1, 3, 8)]),
            ),
        ],
    }
}

fn criterion4(t1: &Theorem1Result) -> Outcome {
    let c = t1
        .robin
        .iter()
        .find(|c| c.constant == RobinConstant::Exp0578)
        .expect("e^0.578 crossover reported");
    Outcome {
        summary: format!(
            "last COND2_ROBIN violation at q = n+2: {} (scan to {})",
            c.last_violation.map_or("none".into(), |n| n.to_string()),
            c.scan_limit
        ),
        checks: vec![check(
            "last violation n = 1212 within n <= 5000",
            c.scan_limit == 5000 && c.last_violation == Some(1212),
        )],
    }
}

fn criterion5() -> Outcome {
    let sup = |a, odd, bound: &str| {
        let e = lemma_constant_sup(a, odd, 128).expect("constant encloses");
        e.upper.to_rational() < decimal(bound)
    };
    let limit = 1_000_000u64;
    let (w4, w8, count) = (1..=limit)
        .into_par_iter()
        .filter_map(|r| {
            let f = factor_u64(r);
            f.iter()
                .all(|&(_, e)| e == 1)
                .then(|| f.iter().map(|&(p, _)| p).collect::<Vec<u64>>())
        })
        .map(|ps| {
            (
                lemma_w_bound_holds(&ps, 4),
                lemma_w_bound_holds(&ps, 8),
                1u64,
            )
        })
        .reduce(
            || (true, true, 0),
            |a, b| (a.0 && b.0, a.1 && b.1, a.2 + b.2),
        );
    Outcome {
        summary: format!("suprema over primes <= 2^a, W(r) bound on {count} square-free r <= 10^6"),
        checks: vec![
            check("sup c_{r,4} < 4.9", sup(4, false, "4.9")),
            check("sup c_{r,8} < 4514.7", sup(8, false, "4514.7")),
            check("sup over odd r of c_{r,4} < 2.9", sup(4, true, "2.9")),
            check(
                "sup over odd r of c_{r,8} < 2461.62",
                sup(8, true, "2461.62"),
            ),
            check("W(r) <= c_{r,4} r^(1/4) for square-free r <= 10^6", w4),
            check("W(r) <= c_{r,8} r^(1/8) for square-free r <= 10^6", w8),
        ],
    }
}

/// Counts and checks for every `(q, n)` with `q^n <= 2^20`.
fn enumerate_all() -> Vec<CountChecks> {
    let cfg = CountConfig::default();
    let budget = FactorBudget::default();
    let primes: Vec<u64> = sieve(1 << 20).into_iter().map(u64::from).collect();
    let fields: Vec<(u64, u32)> = primes
        .iter()
        .flat_map(|&p| {
            (2..)
                .take_while(move |&d| p.checked_pow(d).is_some_and(|s| s <= 1 << 20))
                .map(move |d| (p, d))
        })
        .collect();
    let mut out: Vec<CountChecks> = fields
        .par_iter()
        .flat_map_iter(|&(p, d)| count_views(p, d, &cfg).expect("field within cap"))
        .chain(primes.par_iter().map(|&p| count_prime_field(p)))
        .map(|r| check_counts(&r, budget).expect("counts check"))
        .collect();
    out.sort_by_key(|c| (c.q, c.n));
    out
}

fn criterion6(all: &[CountChecks], elapsed: Duration) -> Outcome {
    let every = |f: fn(&CountChecks) -> bool| all.iter().all(f);
    let bounds = all.iter().map(|c| c.bounds.len()).sum::<usize>();
    Outcome {
        summary: format!(
            "{} pairs (q, n), {} with n > 1, {bounds} CN bounds, {:.1}s",
            all.len(),
            all.iter().filter(|c| c.n > 1).count(),
            elapsed.as_secs_f64()
        ),
        checks: vec![
            check("at least 150 pairs", all.len() >= 150),
            check("#primitive = phi(q^n - 1)", every(|c| c.primitive_count)),
            check(
                "#normal over F_{q^l} = phi_l(X^{n/l} - 1)",
                every(|c| c.normal_counts),
            ),
            check(
                "CN >= every applicable lower bound",
                every(|c| c.bounds.iter().all(|b| b.holds)),
            ),
            check("two-sided PCN estimate", every(|c| c.two_sided)),
            check("PCN > 0", every(|c| c.pcn_positive)),
            check(
                "runtime under 30 minutes",
                elapsed < Duration::from_secs(1800),
            ),
        ],
    }
}

fn criterion7() -> Outcome {
    let mut fields = Vec::new();
    for p in sieve(1 << 12) {
        let p = p as u64;
        for d in (1..).take_while(|&d| p.pow(d) <= 1 << 12) {
            fields.push((p, d));
        }
    }
    struct Sweep {
        fields: usize,
        views: usize,
        orth: bool,
        gauss: bool,
        omega: bool,
        normality: bool,
        orders: bool,
        identity: bool,
    }
    let sweep = fields
        .par_iter()
        .map(|&(p, d)| {
            let s = CharSystem::new(p, 1, d).expect("character system");
            let f = s.field_checks();
            let mut r = Sweep {
                fields: 1,
                views: 0,
                orth: f.orthogonality.pass,
                gauss: f.gauss.pass,
                omega: f.omega.pass,
                normality: true,
                orders: true,
                identity: true,
            };
            for e in pcn_core::arith::divisors(d as u64) {
                let v = s
                    .relabel(e as u32)
                    .and_then(|v| v.view_checks())
                    .expect("view checks");
                r.views += 1;
                r.normality &= v.normality.iter().all(|x| x.pass);
                r.orders &= v.orders.iter().all(|x| x.pass);
                r.identity &= v.identity.pass;
            }
            r
        })
        .reduce(
            || Sweep {
                fields: 0,
                views: 0,
                orth: true,
                gauss: true,
                omega: true,
                normality: true,
                orders: true,
                identity: true,
            },
            |a, b| Sweep {
                fields: a.fields + b.fields,
                views: a.views + b.views,
                orth: a.orth && b.orth,
                gauss: a.gauss && b.gauss,
                omega: a.omega && b.omega,
                normality: a.normality && b.normality,
                orders: a.orders && b.orders,
                identity: a.identity && b.identity,
            },
        );
    Outcome {
        summary: format!(
            "{} fields of size <= 2^12, {} views",
            sweep.fields, sweep.views
        ),
        checks: vec![
            check("orthogonality within 1e-9 |group|", sweep.orth),
            check("|G(chi, psi)| = q^(n/2) within 1e-6 relative", sweep.gauss),
            check("omega = primitivity indicator within 1e-9", sweep.omega),
            check("Omega_l = normality indicator within 1e-9", sweep.normality),
            check("#additive characters of order F = phi_l(F)", sweep.orders),
            check("character sums reproduce CN and PCN", sweep.identity),
        ],
    }
}

fn criterion8(table2: &Table2) -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let distinct: BTreeSet<(u64, u64)> = TABLE2.iter().copied().collect();
    let mut certified = Vec::new();
    let mut below_1e20 = 0;
    let mut exhaustive_secs = f64::NAN;
    for &(n, q) in &distinct {
        let (qs, ns) = (q.to_string(), n.to_string());
        let t = Instant::now();
        let (code, cert) = lab_json::<PcnCertificate>(&["search", &qs, &ns]);
        if (n, q) == (6, 8) {
            exhaustive_secs = t.elapsed().as_secs_f64();
        }
        let path = dir.path().join(format!("{n}_{q}.json"));
        std::fs::write(&path, cert.to_json()).expect("write certificate");
        let (vcode, v) = lab_json::<Verification>(&["verify", path.to_str().expect("utf-8 path")]);
        let small = (q as f64).powi(n as i32) < 1e20;
        below_1e20 += small as usize;
        if code == 0 && vcode == 0 && v.valid {
            certified.push((n, q, small));
        }
    }
    let required = [(6, 8), (8, 11), (12, 17), (21, 9), (20, 8), (24, 8)];
    let derived: BTreeSet<(u64, u64)> = table2.pairs.iter().map(|p| (p.n, p.q)).collect();
    let small_ok = certified.iter().filter(|c| c.2).count();
    Outcome {
        summary: format!(
            "{} of {} distinct printed pairs certified ({small_ok} of {below_1e20} with q^n < 10^20), (6,8) exhaustive in {exhaustive_secs:.2}s",
            certified.len(),
            distinct.len()
        ),
        checks: vec![
            check("derived residual pairs = printed pairs", derived == distinct),
            check("every pair with q^n < 10^20 certified", small_ok == below_1e20),
            check("at least 14 certified", certified.len() >= 14),
            check(
                "(6,8) (8,11) (12,17) (21,9) (20,8) (24,8) certified",
                required.iter().all(|&(n, q)| certified.iter().any(|c| (c.0, c.1) == (n, q))),
            ),
            check("(6,8) exhaustive search in seconds", exhaustive_secs < 10.0),
        ],
    }
}

fn criterion9(all: &[CountChecks]) -> Outcome {
    let basic = all
        .iter()
        .filter(|c| pcn_core::classify::is_completely_basic(c.q, c.n).expect("classifier"))
        .count();
    let agree = all.iter().filter(|c| c.classifier_agrees).count();
    Outcome {
        summary: format!(
            "{agree} of {} pairs agree, {basic} completely basic",
            all.len()
        ),
        checks: vec![check(
            "classifier = (every normal element is completely normal)",
            agree == all.len(),
        )],
    }
}

fn main() -> ExitCode {
    let mut rows: Vec<(u8, Outcome)> = Vec::new();
    let mut report = |id: u8, o: Outcome| {
        let failed: Vec<&Check> = o.checks.iter().filter(|c| !c.pass).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {id}: {verdict}  {}", o.summary);
        for c in &failed {
            let note = if KNOWN.contains(&c.label.as_str()) {
                " (known deviation)"
            } else {
                ""
            };
            println!("    failed: {}{note}", c.label);
        }
        rows.push((id, o));
    };

    let t = Instant::now();
    let (code, t1) = lab_json::<Theorem1Result>(&["pipeline", "thm1"]);
    assert_eq!(code, 0);
    let thm1_time = t.elapsed();
    report(1, criterion1(&t1, thm1_time));
    report(2, criterion2(&t1));
    let (code, t0) = lab_json::<Theorem0Result>(&["pipeline", "thm0"]);
    assert_eq!(code, 0);
    report(3, criterion3(&t0));
    report(4, criterion4(&t1));
    report(5, criterion5());
    let t = Instant::now();
    let all = enumerate_all();
    report(6, criterion6(&all, t.elapsed()));
    report(7, criterion7());
    let (code, table2) = lab_json::<Table2>(&["table2"]);
    assert_eq!(code, 0);
    report(8, criterion8(&table2));
    report(9, criterion9(&all));

    let unexpected: Vec<String> = rows
        .iter()
        .flat_map(|(id, o)| {
            o.checks
                .iter()
                .filter(|c| !c.pass && !KNOWN.contains(&c.label.as_str()))
                .map(move |c| format!("{id}: {}", c.label))
        })
        .collect();
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
