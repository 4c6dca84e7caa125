use num_bigint::BigUint;
use proptest::prelude::*;

use pcn_core::arith::{
    euler_phi, factor_int, factor_qn_minus_1, is_prime_u64, mult_order, p_free_part, FactorBudget,
};
use pcn_core::classify::is_completely_basic;
use pcn_core::ffield::{make_field, FieldCtx};
use pcn_core::fqxpoly::{is_completely_normal, normality_rank_test, normality_test, poly_stats};
use pcn_core::search::{
    count_cn_pcn, find_pcn, verify_certificate, CountConfig, PcnCertificate, SearchConfig, Strategy as SearchStrategy,
};

/// Small fields `F_{p^{en}}` as `(p, e, n)`.
fn small_field() -> impl Strategy<Value = (u64, u32, u32)> {
    prop_oneof![
        Just((2, 1, 4)),
        Just((2, 2, 3)),
        Just((2, 3, 2)),
        Just((3, 1, 4)),
        Just((3, 2, 2)),
        Just((5, 1, 3)),
        Just((7, 1, 2)),
        Just((2, 1, 12)),
        Just((11, 2, 3)),
        Just((13, 1, 4)),
    ]
}

fn field(p: u64, e: u32, n: u32) -> FieldCtx {
    make_field(p, e, n, None).unwrap().with_factored_order(FactorBudget::default()).unwrap()
}

fn elem(ctx: &FieldCtx, seed: u64) -> pcn_core::ffield::FFElem {
    let size = ctx.size_u64().unwrap();
    ctx.from_index(seed % size)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms((p, e, n) in small_field(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let ctx = field(p, e, n);
        let (a, b, c) = (elem(&ctx, a), elem(&ctx, b), elem(&ctx, c));
        prop_assert_eq!(ctx.mul(&ctx.mul(&a, &b), &c), ctx.mul(&a, &ctx.mul(&b, &c)));
        prop_assert_eq!(ctx.mul(&a, &ctx.add(&b, &c)), ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
        prop_assert_eq!(ctx.mul(&a, &b), ctx.mul(&b, &a));
        prop_assert_eq!(ctx.sub(&ctx.add(&a, &b), &b), a.clone());
        if !a.is_zero() {
            prop_assert!(ctx.is_one(&ctx.mul(&a, &ctx.inv(&a).unwrap())));
            prop_assert!(ctx.is_one(&ctx.pow(&a, ctx.order())));
        }
        // x^{q^n} = x, and frob_q is additive and multiplicative
        prop_assert_eq!(ctx.frobenius(&a, n).unwrap(), a.clone());
        prop_assert_eq!(ctx.frob_q(&ctx.add(&a, &b)), ctx.add(&ctx.frob_q(&a), &ctx.frob_q(&b)));
        prop_assert_eq!(ctx.frob_q(&ctx.mul(&a, &b)), ctx.mul(&ctx.frob_q(&a), &ctx.frob_q(&b)));
    }

    #[test]
    fn index_round_trip((p, e, n) in small_field(), i in any::<u64>()) {
        let ctx = field(p, e, n);
        let idx = i % ctx.size_u64().unwrap();
        prop_assert_eq!(ctx.index_of(&ctx.from_index(idx)), Some(idx));
    }

    #[test]
    fn normality_tests_agree((p, e, n) in small_field(), a in any::<u64>()) {
        // gcd test against the rank of the conjugate matrix
        let ctx = field(p, e, n);
        let x = elem(&ctx, a);
        for l in pcn_core::arith::divisors(n as u64).into_iter().filter(|&l| l < n as u64) {
            prop_assert_eq!(normality_test(&ctx, &x, l).unwrap(), normality_rank_test(&ctx, &x, l).unwrap());
        }
    }

    #[test]
    fn primitive_elements_have_full_order((p, e, n) in small_field(), a in any::<u64>()) {
        let ctx = field(p, e, n);
        let x = elem(&ctx, a);
        prop_assume!(!x.is_zero());
        let size = ctx.size_u64().unwrap();
        prop_assume!(size <= 1 << 13);
        let mut y = ctx.one();
        let mut order = 0u64;
        loop {
            y = ctx.mul(&y, &x);
            order += 1;
            if ctx.is_one(&y) {
                break;
            }
        }
        prop_assert_eq!(ctx.is_primitive(&x).unwrap(), order == size - 1);
    }

    #[test]
    fn factorizations_multiply_back(n in 2u64..u64::MAX) {
        let f = factor_int(&BigUint::from(n), FactorBudget::default()).unwrap();
        prop_assert!(f.complete);
        prop_assert_eq!(f.product(), BigUint::from(n));
        for pf in &f.factors {
            prop_assert!(is_prime_u64(u64::try_from(&pf.prime).unwrap()));
        }
    }

    #[test]
    fn cyclotomic_split_matches_direct((q, n) in (2u64..200, 1u64..13).prop_filter("prime power", |(q, _)| pcn_core::arith::is_prime_power(*q))) {
        let f = factor_qn_minus_1(q, n, FactorBudget::default()).unwrap();
        let direct = BigUint::from(q).pow(n as u32) - 1u32;
        prop_assert_eq!(f.product(), direct.clone());
        let g = factor_int(&direct, FactorBudget::default()).unwrap();
        let primes = |f: &pcn_core::arith::IntFactorization| f.factors.iter().map(|x| (x.prime.clone(), x.exponent)).collect::<Vec<_>>();
        prop_assert_eq!(primes(&f), primes(&g));
    }

    #[test]
    fn m_divides_q_minus_1_is_completely_basic(q in (2u64..500).prop_filter("prime power", |q| pcn_core::arith::is_prime_power(*q)), k in 1u64..6) {
        // any n whose p-free part divides q - 1
        let (p, _) = pcn_core::arith::prime_power(q).unwrap();
        let m = pcn_core::arith::divisors(q - 1)[(k as usize) % pcn_core::arith::divisors(q - 1).len()];
        let n = m * p.pow((k % 3) as u32);
        prop_assert_eq!(p_free_part(n, p), m);
        prop_assert!(is_completely_basic(q, n).unwrap());
        if m > 1 {
            prop_assert_eq!(mult_order(q, m).unwrap(), 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn counts_match_closed_forms((p, e, n) in small_field()) {
        let q = p.pow(e);
        let r = count_cn_pcn(q, n as u64, &CountConfig::default()).unwrap();
        prop_assert_eq!(r.primitive, euler_phi(r.size - 1));
        for c in &r.normal {
            prop_assert_eq!(BigUint::from(c.count), poly_stats(q, p, n as u64, c.l).unwrap().phi);
        }
        prop_assert!(r.pcn <= r.cn && r.pcn <= r.primitive);
    }

    #[test]
    fn random_certificates_verify((p, e, n) in small_field(), seed in any::<u64>(), streams in 1u32..5) {
        let cfg = SearchConfig { strategy: SearchStrategy::Random, seed, streams, ..SearchConfig::default() };
        let cert = find_pcn(p.pow(e), n as u64, &cfg).unwrap();
        let back = PcnCertificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert!(verify_certificate(&back).valid);
        prop_assert_eq!(find_pcn(p.pow(e), n as u64, &cfg).unwrap(), cert.clone());
        let ctx = field(p, e, n);
        let x = ctx.elem(cert.element.clone()).unwrap();
        prop_assert!(ctx.is_primitive(&x).unwrap() && is_completely_normal(&ctx, &x));
    }
}
