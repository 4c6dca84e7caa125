use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;

use pcn_core::arith::{factor_int, factor_qn_minus_1, FactorBudget, RobinConstant};
use pcn_core::bounds::{evaluate, table1, ConditionId, EvalOptions, Params};
use pcn_core::classify::classify_pair;
use pcn_core::ffield::make_field;
use pcn_core::fqxpoly::is_completely_normal;
use pcn_core::search::{
    count_cn_pcn, count_prime_field, find_pcn, verify_certificate, CountConfig, SearchConfig,
};

fn field(c: &mut Criterion) {
    let ctx = make_field(41, 1, 24, None)
        .unwrap()
        .with_factored_order(FactorBudget::default())
        .unwrap();
    let x = ctx.from_index(123_456_789);
    let y = ctx.from_index(987_654_321);
    let order = BigUint::from(41u32).pow(24) - 1u32;
    c.bench_function("mul F_41^24", |b| {
        b.iter(|| ctx.mul(black_box(&x), black_box(&y)))
    });
    c.bench_function("pow F_41^24", |b| b.iter(|| ctx.pow(black_box(&x), &order)));
    c.bench_function("primitive F_41^24", |b| {
        b.iter(|| ctx.is_primitive(black_box(&x)).unwrap())
    });
    c.bench_function("completely normal F_41^24", |b| {
        b.iter(|| is_completely_normal(&ctx, black_box(&x)))
    });
}

fn factoring(c: &mut Criterion) {
    let n = BigUint::from(1_000_000_007u64) * BigUint::from(998_244_353u64);
    c.bench_function("rho 60-bit semiprime", |b| {
        b.iter(|| factor_int(black_box(&n), FactorBudget::default()).unwrap())
    });
    c.bench_function("factor 29^12 - 1", |b| {
        b.iter(|| factor_qn_minus_1(29, 12, FactorBudget::default()).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("count");
    g.sample_size(10);
    let cfg = CountConfig::default();
    g.bench_function("F_2^16 over F_2", |b| {
        b.iter(|| count_cn_pcn(2, 16, &cfg).unwrap())
    });
    g.bench_function("F_3^10 over F_3", |b| {
        b.iter(|| count_cn_pcn(3, 10, &cfg).unwrap())
    });
    g.bench_function("prime field 1048573", |b| {
        b.iter(|| count_prime_field(1_048_573))
    });
    g.finish();
}

fn search(c: &mut Criterion) {
    let cfg = SearchConfig::default();
    c.bench_function("search 41^24", |b| {
        b.iter(|| find_pcn(41, 24, &cfg).unwrap())
    });
    let cert = find_pcn(41, 24, &cfg).unwrap();
    c.bench_function("verify 41^24", |b| {
        b.iter(|| verify_certificate(black_box(&cert)))
    });
}

fn conditions(c: &mut Criterion) {
    let opts = EvalOptions::default();
    c.bench_function("COND2 (6, 1259)", |b| {
        b.iter(|| {
            evaluate(
                ConditionId::Cond2,
                Params::Pair { q: 1259, n: 6 },
                RobinConstant::ExpGamma,
                opts,
            )
            .unwrap()
        })
    });
    c.bench_function("classify (9, 72)", |b| {
        b.iter(|| classify_pair(black_box(9), 72).unwrap())
    });
    let mut g = c.benchmark_group("table1");
    g.sample_size(10);
    g.bench_function("n <= 1212", |b| b.iter(|| table1(1212, 2, opts).unwrap()));
    g.finish();
}

criterion_group!(benches, field, factoring, counting, search, conditions);
criterion_main!(benches);
