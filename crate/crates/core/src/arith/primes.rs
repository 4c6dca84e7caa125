//! Prime sieving and primality testing.
//!
//! Values below 3.317·10^24 get a deterministic Miller–Rabin verdict; larger
//! values are run through strong BPSW and labeled probable primes.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Trial division bound used by the factorizer.
pub const TRIAL_DIVISION_LIMIT: u32 = 1_000_000;

/// Outcome of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    /// Proven by a deterministic base set for this magnitude.
    Prime,
    /// Passed strong BPSW; no counterexample is known, but not proven.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// Sieve of Eratosthenes returning all primes `< limit`.
pub fn sieve(limit: u32) -> Vec<u32> {
    if limit < 3 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit];
    let mut primes = Vec::with_capacity(limit / 10);
    for i in 2..limit {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// All primes below [`TRIAL_DIVISION_LIMIT`], computed once.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(TRIAL_DIVISION_LIMIT))
}

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    // This base set is exact for all n < 2^64.
    [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022]
        .iter()
        .all(|&a| strong_probable_prime_u64(n, a))
}

fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd positive n.
fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let mut n = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n);
    let mut result = 1;
    let three = BigInt::from(3u8);
    let five = BigInt::from(5u8);
    let eight = BigInt::from(8u8);
    let four = BigInt::from(4u8);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice.
fn strong_lucas(n: &BigUint) -> bool {
    let nsqrt = n.sqrt();
    if &nsqrt * &nsqrt == *n {
        return false;
    }
    let mut d = BigInt::from(5);
    loop {
        let j = jacobi(&d, n);
        if j == -1 {
            break;
        }
        if j == 0 {
            // gcd(d, n) > 1; n is composite unless n == |d|.
            return BigInt::from(n.clone()) == d.abs();
        }
        d = if d.is_positive() {
            -(d + 2i32)
        } else {
            -(d - 2i32)
        };
    }
    let ni = BigInt::from(n.clone());
    let to_mod = |v: &BigInt| -> BigUint { v.mod_floor(&ni).to_biguint().unwrap() };
    let dd = to_mod(&d);
    let qq = to_mod(&((BigInt::one() - &d) / 4));
    let one = BigUint::one();

    let np1 = n + &one;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;

    // Binary Lucas chain with P = 1.
    let mut u = BigUint::zero();
    let mut v = BigUint::from(2u8);
    let mut qk = BigUint::one();
    let two = BigUint::from(2u8);
    for i in (0..k.bits()).rev() {
        // double
        u = (&u * &v) % n;
        v = ((&v * &v) + n * &two - (&qk * &two) % n) % n;
        qk = (&qk * &qk) % n;
        if k.bit(i) {
            let u_next = half_mod(&u + &v, n);
            let v_next = half_mod((&dd * &u) % n + &v, n);
            u = u_next % n;
            v = v_next % n;
            qk = (&qk * &qq) % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = ((&v * &v) + n * &two - (&qk * &two) % n) % n;
        qk = (&qk * &qk) % n;
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// Upper limit of the deterministic Miller–Rabin range (first 13 prime bases).
fn deterministic_limit() -> &'static BigUint {
    static LIMIT: OnceLock<BigUint> = OnceLock::new();
    LIMIT.get_or_init(|| "3317044064679887385961981".parse().unwrap())
}

/// Primality of an arbitrary-precision integer.
pub fn primality(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    for &p in &small_primes()[..200] {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    if n < deterministic_limit() {
        let all = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]
            .iter()
            .all(|&a| strong_probable_prime(n, &BigUint::from(a)));
        return if all {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    if strong_probable_prime(n, &BigUint::from(2u8)) && strong_lucas(n) {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    }
}
