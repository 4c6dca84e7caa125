//! Exact integer number theory.

mod constants;
mod enclosure;
mod factor;
mod mont;
mod primes;

use num_bigint::BigUint;
use num_integer::Integer;
use thiserror::Error;

pub use constants::{
    c_constant, decimal, lemma_constant_sup, lemma_w_bound_holds, robin_upper, robin_upper_with,
    small_prime_divisors, RobinConstant,
};
pub use enclosure::{
    certify, certify_from, Dyadic, EnclosureError, RealEnclosure, Relation, PRECISION_LADDER,
};
pub use factor::{
    cyclotomic_pieces, cyclotomic_value, factor_int, factor_qn_minus_1, factor_u64, radical_info,
    CyclotomicPiece, FactorBudget, IntFactorization, PrimeFactor, RadicalInfo, DEFAULT_RHO_BUDGET,
};
pub use primes::{is_prime_u64, primality, sieve, small_primes, Primality, TRIAL_DIVISION_LIMIT};

pub(crate) use primes::pow_mod_u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("gcd({q}, {m}) != 1")]
    NotCoprime { q: u64, m: u64 },
    #[error("factorization of {value} is incomplete")]
    IncompleteFactorization { value: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Enclosure(#[from] EnclosureError),
}

/// Sorted list of positive divisors.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0, "divisors(0)");
    let mut divs = vec![1u64];
    for (p, k) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn mobius(n: u64) -> i32 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sum of the positive divisors of `n`.
pub fn sigma_t(n: u64) -> BigUint {
    assert!(n > 0, "sigma_t(0)");
    factor_u64(n)
        .into_iter()
        .fold(BigUint::from(1u8), |acc, (p, k)| {
            let p = BigUint::from(p);
            acc * ((p.pow(k + 1) - 1u32) / (p - 1u32))
        })
}

/// `n` with every factor of `p` removed.
pub fn p_free_part(mut n: u64, p: u64) -> u64 {
    assert!(n > 0 && p > 1);
    while n % p == 0 {
        n /= p;
    }
    n
}

/// Least `k ≥ 1` with `q^k ≡ 1 (mod m)`.
pub fn mult_order(q: u64, m: u64) -> Result<u64, ArithError> {
    if m == 0 {
        return Err(ArithError::InvalidInput("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(1);
    }
    if q.gcd(&m) != 1 {
        return Err(ArithError::NotCoprime { q, m });
    }
    let mut k = euler_phi(m);
    for (r, _) in factor_u64(k) {
        while k % r == 0 && pow_mod_u64(q, k / r, m) == 1 {
            k /= r;
        }
    }
    Ok(k)
}

/// `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factor_u64(q);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power(q).is_some()
}

/// All prime powers `p^k ≤ limit` (k ≥ 1), ascending; primes are sieved then exponentiated.
pub fn prime_powers_up_to(limit: u64) -> Vec<u64> {
    let sieve_limit = u32::try_from(limit.saturating_add(1)).expect("prime power bound too large");
    let mut out = Vec::new();
    for p in sieve(sieve_limit) {
        let p = p as u64;
        let mut pk = p;
        loop {
            out.push(pk);
            match pk.checked_mul(p) {
                Some(next) if next <= limit => pk = next,
                _ => break,
            }
        }
    }
    out.sort_unstable();
    out
}

/// Least prime power `≥ x`.
pub fn next_prime_power(x: u64) -> u64 {
    let mut q = x.max(2);
    while !is_prime_power(q) {
        q += 1;
    }
    q
}

/// Number of positive divisors of `n`.
pub fn num_divisors(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .map(|(_, k)| k as u64 + 1)
        .product()
}
