use num_rational::BigRational;

use pcn_core::arith::{
    divisors, is_prime_power, prime_power, prime_powers_up_to, robin_upper, sigma_t, FactorBudget,
};
use pcn_core::bounds::{cond1, cond2, cond_p_family, main_inequality, EvalOptions, PFamily, WMode};
use pcn_core::ffield::{default_modulus, is_irreducible_over_fp, make_field, FieldCtx};
use pcn_core::fqxpoly::is_completely_normal;
use pcn_core::search::{count_cn_pcn, CountConfig};

fn opts() -> EvalOptions {
    EvalOptions::default()
}

#[test]
fn divisor_sum_below_robin_bound() {
    for n in 3..=100_000u64 {
        let bound = robin_upper(n).unwrap();
        let s = sigma_t(n);
        let lower = bound.lower.to_rational();
        assert!(BigRational::from_integer(s.into()) < lower, "n={n}");
    }
}

/// The next irreducible modulus of degree `d` after the default one.
fn second_modulus(p: u64, d: usize) -> Vec<u64> {
    let first = default_modulus(p, d);
    let mut f = first.clone();
    loop {
        // step the low coefficients as a base-p counter
        for c in f.iter_mut().take(d) {
            *c = (*c + 1) % p;
            if *c != 0 {
                break;
            }
        }
        if f != first && is_irreducible_over_fp(&f, p) {
            return f;
        }
    }
}

fn brute_counts(ctx: &FieldCtx) -> (u64, u64, u64) {
    let size = ctx.size_u64().unwrap();
    let (mut prim, mut cn, mut pcn) = (0, 0, 0);
    for i in 1..size {
        let x = ctx.from_index(i);
        let a = ctx.is_primitive(&x).unwrap();
        let b = is_completely_normal(ctx, &x);
        prim += a as u64;
        cn += b as u64;
        pcn += (a && b) as u64;
    }
    (prim, cn, pcn)
}

#[test]
fn counts_do_not_depend_on_the_modulus() {
    for (p, e, n) in [(2u64, 1u32, 6u32), (2, 2, 4), (3, 1, 4), (2, 3, 3), (5, 1, 4), (3, 2, 3)] {
        let d = (e * n) as usize;
        let one = make_field(p, e, n, None).unwrap().with_factored_order(FactorBudget::default()).unwrap();
        let other = make_field(p, e, n, Some(second_modulus(p, d)))
            .unwrap()
            .with_factored_order(FactorBudget::default())
            .unwrap();
        assert_ne!(one.modulus(), other.modulus());
        let r = count_cn_pcn(p.pow(e), n as u64, &CountConfig::default()).unwrap();
        let expected = (r.primitive, r.cn, r.pcn);
        assert_eq!(brute_counts(&one), expected, "p={p} e={e} n={n}");
        assert_eq!(brute_counts(&other), expected, "p={p} e={e} n={n}, second modulus");
    }
}

#[test]
fn frobenius_fixes_exactly_the_subfield() {
    for (p, e, n) in [(2u64, 1u32, 12u32), (3, 1, 6), (2, 2, 6), (5, 1, 4)] {
        let ctx = make_field(p, e, n, None).unwrap();
        let q = p.pow(e);
        let size = ctx.size_u64().unwrap();
        let elems: Vec<_> = (0..size).map(|i| ctx.from_index(i)).collect();
        for l in divisors(n as u64) {
            let frob = |x: &pcn_core::ffield::FFElem| ctx.frobenius(x, l as u32).unwrap();
            let fixed: Vec<_> = elems.iter().filter(|x| &frob(x) == *x).collect();
            assert_eq!(fixed.len() as u64, q.pow(l as u32), "q={q} n={n} l={l}");
            // linear over the fixed field, and a bijection
            let a = fixed[fixed.len() / 2];
            for (x, y) in elems.iter().zip(elems.iter().rev()).step_by(7) {
                let lhs = frob(&ctx.add(&ctx.mul(a, x), y));
                let rhs = ctx.add(&ctx.mul(a, &frob(x)), &frob(y));
                assert_eq!(lhs, rhs);
            }
            let mut images: Vec<u64> = elems.iter().map(|x| ctx.index_of(&frob(x)).unwrap()).collect();
            images.sort_unstable();
            assert!(images.iter().copied().eq(0..size));
        }
    }
}

#[test]
fn sufficient_conditions_chain_to_positive_counts() {
    // cond2 => cond1 => main inequality => PCN > 0, on every pair with q^n <= 2^18
    let cfg = CountConfig::default();
    let mut holds = [0usize; 3];
    for q in prime_powers_up_to(1 << 9) {
        for n in (2u64..).take_while(|&n| (q as u128).pow(n as u32) <= 1 << 18) {
            let c2 = cond2(n, q, None, opts()).map(|r| r.holds).unwrap_or(false);
            let c1 = cond1(q, n, opts()).unwrap().holds;
            let m = main_inequality(q, n, WMode::Exact, opts()).unwrap().holds;
            assert!(!c2 || c1, "cond2 without cond1 at q={q} n={n}");
            assert!(!c1 || m, "cond1 without main inequality at q={q} n={n}");
            holds[0] += c2 as usize;
            holds[1] += c1 as usize;
            holds[2] += m as usize;
            if m {
                assert!(count_cn_pcn(q, n, &cfg).unwrap().pcn > 0, "q={q} n={n}");
            }
        }
    }
    assert!(holds[2] > 0);
}

#[test]
fn cond2_is_monotone_in_q() {
    for n in (4u64..=120).filter(|&n| !is_prime_power(n) || prime_power(n).unwrap().1 > 2) {
        let mut seen = false;
        for q in prime_powers_up_to(1500).into_iter().filter(|&q| q >= n + 2) {
            let h = cond2(n, q, None, opts()).unwrap().holds;
            assert!(h || !seen, "n={n}: cond2 fails at q={q} after holding below");
            seen |= h;
        }
    }
}

#[test]
fn family_conditions_are_monotone_within_a_characteristic() {
    let o = opts();
    for (which, ls, ms, chars) in [
        (PFamily::Cond2POdd, 1..=3u32, (3..=30u64).collect::<Vec<_>>(), vec![3u64, 5, 7, 11]),
        (PFamily::Cond3P2, 2..=4, (3..=31).step_by(2).collect(), vec![2]),
        (PFamily::A12, 1..=1, (3..=45).step_by(2).collect(), vec![2]),
    ] {
        for l in ls.clone() {
            for &m in &ms {
                for &p in &chars {
                    if m % p == 0 {
                        continue;
                    }
                    let mut seen = false;
                    let mut q = p;
                    while q < 1 << 20 {
                        if q > m {
                            let h = cond_p_family(l, m, q, which, o).unwrap().holds;
                            assert!(h || !seen, "{which:?} l={l} m={m}: fails at q={q} after holding below");
                            seen |= h;
                        }
                        q *= p;
                    }
                }
            }
        }
    }
}
