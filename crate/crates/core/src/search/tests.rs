use super::*;
use crate::arith::euler_phi;
use crate::fqxpoly::{is_completely_normal, normality_test, poly_stats, proper_divisors};

fn counts(q: u64, n: u64) -> CountReport {
    count_cn_pcn(q, n, &CountConfig::default()).unwrap()
}

/// Counts with the polynomial backend, element by element.
fn brute_force(q: u64, n: u64) -> CountReport {
    let ctx = field_for(q, n, FactorBudget::default()).unwrap();
    let size = ctx.size_u64().unwrap();
    let divs = proper_divisors(n);
    let mut r = CountReport {
        q,
        n,
        size,
        primitive: 0,
        normal: divs.iter().map(|&l| NormalCount { l, count: 0 }).collect(),
        cn: 0,
        pcn: 0,
    };
    for idx in 1..size {
        let x = ctx.from_index(idx);
        let prim = ctx.is_primitive(&x).unwrap();
        r.primitive += prim as u64;
        for c in r.normal.iter_mut() {
            c.count += normality_test(&ctx, &x, c.l).unwrap() as u64;
        }
        if is_completely_normal(&ctx, &x) {
            r.cn += 1;
            r.pcn += prim as u64;
        }
    }
    r
}

#[test]
fn f4_counts() {
    let r = counts(2, 2);
    assert_eq!((r.cn, r.pcn, r.primitive), (2, 2, 2));
}

#[test]
fn f343_counts() {
    let r = counts(7, 3);
    assert_eq!(r.cn, 216);
    assert_eq!(r.primitive, 108);
    assert!(r.pcn > 0);
}

#[test]
fn table_counts_match_polynomial_backend() {
    for (q, n) in [
        (2, 1),
        (3, 1),
        (2, 4),
        (2, 6),
        (4, 3),
        (3, 4),
        (2, 8),
        (9, 2),
        (5, 3),
        (8, 2),
        (2, 9),
        (4, 4),
        (2, 10),
        (3, 6),
    ] {
        assert_eq!(counts(q, n), brute_force(q, n), "q={q} n={n}");
    }
}

#[test]
fn counts_match_closed_forms() {
    for (q, n) in [
        (2, 12),
        (4, 6),
        (8, 4),
        (3, 8),
        (5, 4),
        (16, 3),
        (7, 4),
        (2, 15),
        (9, 4),
    ] {
        let r = counts(q, n);
        let (p, _) = crate::arith::prime_power(q).unwrap();
        assert_eq!(r.primitive, euler_phi(r.size - 1), "q={q} n={n}");
        for c in &r.normal {
            let phi = poly_stats(q, p, n, c.l).unwrap().phi;
            assert_eq!(BigUint::from(c.count), phi, "q={q} n={n} l={}", c.l);
        }
        if crate::classify::is_completely_basic(q, n).unwrap() {
            assert_eq!(r.cn, r.normal[0].count);
        }
        assert!(r.pcn > 0);
    }
}

#[test]
fn count_errors() {
    let cfg = CountConfig::default();
    assert!(matches!(
        count_cn_pcn(6, 2, &cfg),
        Err(SearchError::NotPrimePower(6))
    ));
    assert!(matches!(
        count_cn_pcn(2, 0, &cfg),
        Err(SearchError::BadDegree)
    ));
    assert!(matches!(
        count_cn_pcn(2, 23, &cfg),
        Err(SearchError::CapExceeded { .. })
    ));
    let small = CountConfig {
        enumeration_cap: 100,
        ..cfg
    };
    assert!(matches!(
        count_cn_pcn(3, 5, &small),
        Err(SearchError::CapExceeded { .. })
    ));
    assert!(count_cn_pcn(3, 4, &small).is_ok());
}

fn exhaustive() -> SearchConfig {
    SearchConfig {
        strategy: Strategy::Exhaustive,
        ..SearchConfig::default()
    }
}

#[test]
fn exhaustive_finds_least_index() {
    for (q, n) in [(2, 2), (2, 4), (3, 3), (4, 3), (2, 6)] {
        let cert = find_pcn(q, n, &exhaustive()).unwrap();
        assert!(verify_certificate(&cert).valid);
        let ctx = field_for(q, n, FactorBudget::default()).unwrap();
        let first = (1..ctx.size_u64().unwrap())
            .find(|&i| {
                let x = ctx.from_index(i);
                ctx.is_primitive(&x).unwrap() && is_completely_normal(&ctx, &x)
            })
            .unwrap();
        assert_eq!(cert.search.trial, first);
        assert_eq!(ctx.from_index(first).coords, cert.element);
    }
}

#[test]
fn exhaustive_8_6() {
    let cert = find_pcn(8, 6, &exhaustive()).unwrap();
    assert_eq!((cert.p, cert.e, cert.n), (2, 3, 6));
    assert_eq!(cert.modulus.len(), 19);
    assert!(verify_certificate(&cert).valid);
}

#[test]
fn random_11_6_is_seeded() {
    let cfg = SearchConfig {
        seed: 7,
        streams: 3,
        ..SearchConfig::default()
    };
    let cert = find_pcn(11, 6, &cfg).unwrap();
    assert!(verify_certificate(&cert).valid);
    assert_eq!(find_pcn(11, 6, &cfg).unwrap(), cert);
    let ctx = field_for(11, 6, FactorBudget::default()).unwrap();
    let s = &cert.search;
    let x = replay_random(&ctx, s.seed.unwrap(), s.stream.unwrap(), s.trial);
    assert_eq!(x.coords, cert.element);
    let mut c = cert.clone();
    c.search.seed = Some(8);
    rejected(&c, RejectionCode::RecordMismatch);
}

#[test]
fn budget_exhaustion_reports_trials() {
    let cfg = SearchConfig {
        max_trials: 1,
        ..exhaustive()
    };
    // 1 is never completely normal for n > 1
    assert_eq!(
        find_pcn(2, 4, &cfg),
        Err(SearchError::BudgetExhausted { trials: 1 })
    );
}

fn base_cert() -> PcnCertificate {
    find_pcn(4, 6, &exhaustive()).unwrap()
}

fn rejected(cert: &PcnCertificate, code: RejectionCode) {
    let v = verify_certificate(cert);
    assert!(!v.valid);
    assert!(v.has(code), "{v:?}");
}

#[test]
fn json_uses_decimal_strings() {
    let cert = base_cert();
    let json = cert.to_json();
    assert!(
        json.starts_with(r#"{"schema":"pcn-certificate/1","p":"2","e":"2","n":"6","modulus":["#)
    );
    let back = PcnCertificate::from_json(&json).unwrap();
    assert_eq!(back, cert);
    assert!(verify_certificate(&back).valid);
    assert!(PcnCertificate::from_json(&json.replace(r#""p":"2""#, r#""p":2"#)).is_err());
    assert!(PcnCertificate::from_json(&json.replace(r#""p":"2""#, r#""p":"+2""#)).is_err());
}

#[test]
fn tampering_is_rejected() {
    let cert = base_cert();

    let mut c = cert.clone();
    c.normality_divisors.remove(1);
    rejected(&c, RejectionCode::NormalityCoverIncomplete);

    let mut c = cert.clone();
    let (a, b) = (
        c.order_factors[0].prime.clone(),
        c.order_factors[1].prime.clone(),
    );
    c.order_factors.remove(0);
    c.order_factors[0].prime = &a * &b;
    rejected(&c, RejectionCode::FactorNotPrime);

    let mut c = cert.clone();
    c.order_factors[0].exponent += 1;
    rejected(&c, RejectionCode::FactorProductMismatch);

    let mut c = cert.clone();
    c.primitivity_checks.pop();
    rejected(&c, RejectionCode::PrimitivityCoverIncomplete);

    let mut c = cert.clone();
    c.primitivity_checks[0].nontrivial = false;
    rejected(&c, RejectionCode::RecordMismatch);

    let mut c = cert.clone();
    c.element = vec![0; c.element.len()];
    rejected(&c, RejectionCode::ZeroElement);

    let mut c = cert.clone();
    c.element[0] = 2;
    rejected(&c, RejectionCode::BadElement);

    let mut c = cert.clone();
    c.element = vec![0; c.element.len()];
    c.element[0] = 1;
    rejected(&c, RejectionCode::NotPrimitive);

    let mut c = cert.clone();
    // x^12 + x is divisible by x
    c.modulus = vec![0; 13];
    c.modulus[1] = 1;
    c.modulus[12] = 1;
    rejected(&c, RejectionCode::ReducibleModulus);

    let mut c = cert.clone();
    c.modulus.pop();
    rejected(&c, RejectionCode::BadModulus);

    let mut c = cert.clone();
    c.n = 4;
    assert!(!verify_certificate(&c).valid);

    let mut c = cert.clone();
    c.search.trial += 1;
    rejected(&c, RejectionCode::RecordMismatch);

    let mut c = cert.clone();
    c.search.strategy = Strategy::Random;
    rejected(&c, RejectionCode::RecordMismatch);

    let mut c = cert.clone();
    c.schema = "pcn-certificate/0".into();
    rejected(&c, RejectionCode::SchemaMismatch);
}

#[test]
fn element_flips_verify_iff_still_pcn() {
    // a changed coordinate is rejected; with the search record updated it
    // passes exactly when the new element is itself a PCN
    let cert = base_cert();
    let ctx = field_for(4, 6, FactorBudget::default()).unwrap();
    for i in 0..cert.element.len() {
        let mut c = cert.clone();
        c.element[i] ^= 1;
        let v = verify_certificate(&c);
        assert!(v.has(RejectionCode::RecordMismatch), "coordinate {i}");
        let x = ctx.elem(c.element.clone()).unwrap();
        c.search.trial = ctx.index_of(&x).unwrap();
        let v = verify_certificate(&c);
        let still_pcn = ctx.is_primitive(&x).unwrap() && is_completely_normal(&ctx, &x);
        assert_eq!(v.valid, still_pcn, "coordinate {i}");
    }
}

#[test]
fn views_share_one_table() {
    let cfg = CountConfig::default();
    let views = count_views(2, 6, &cfg).unwrap();
    let qs: Vec<(u64, u64)> = views.iter().map(|r| (r.q, r.n)).collect();
    assert_eq!(qs, vec![(2, 6), (4, 3), (8, 2), (64, 1)]);
    for r in &views {
        assert_eq!(r, &counts(r.q, r.n));
        assert!(check_counts(r, FactorBudget::default()).unwrap().pass());
    }
}

#[test]
fn checks_flag_wrong_counts() {
    let mut r = counts(3, 4);
    let budget = FactorBudget::default();
    let c = check_counts(&r, budget).unwrap();
    assert!(c.pass());
    assert!(c
        .bounds
        .iter()
        .any(|b| b.variant == crate::bounds::CnVariant::General));
    r.primitive += 1;
    r.normal[0].count -= 1;
    let c = check_counts(&r, budget).unwrap();
    assert!(!c.primitive_count && !c.normal_counts && !c.classifier_agrees);
    r.pcn = 0;
    assert!(!check_counts(&r, budget).unwrap().pcn_positive);
}

#[test]
fn prime_field_walk_matches_tables() {
    for p in crate::arith::sieve(1 << 12) {
        let p = p as u64;
        let fast = count_prime_field(p);
        let ctx = field_for(p, 1, FactorBudget::default()).unwrap();
        let table = LogField::new(&ctx).unwrap();
        assert_eq!(fast, count_with_table(&table, p, 1), "p={p}");
    }
    assert_eq!(counts(1_048_573, 1).primitive, euler_phi(1_048_572));
}
