//! Robin's upper bound for the divisor sum and the `c_{r,a}` constants.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::enclosure::RealEnclosure;
use super::primes::{is_prime_u64, pow_mod_u64, sieve};
use super::ArithError;

/// Leading constant in the Robin-form bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobinConstant {
    /// `e^γ` with γ Euler's constant.
    ExpGamma,
    /// `e^0.578`, slightly above `e^γ`.
    Exp0578,
}

impl RobinConstant {
    pub fn enclosure(self, prec: u32) -> Result<RealEnclosure, ArithError> {
        let x = match self {
            RobinConstant::ExpGamma => RealEnclosure::euler_gamma(prec),
            RobinConstant::Exp0578 => RealEnclosure::from_ratio(&578.into(), &1000.into(), prec),
        };
        Ok(x.exp()?)
    }
}

/// `C·n·ln ln n + 0.6483·n / ln ln n`.
pub fn robin_upper_with(
    n: u64,
    constant: RobinConstant,
    prec: u32,
) -> Result<RealEnclosure, ArithError> {
    if n < 3 {
        return Err(ArithError::InvalidInput(format!(
            "robin_upper needs n >= 3, got {n}"
        )));
    }
    let nn = RealEnclosure::from_int(n, prec);
    let ll = nn.ln()?.ln()?;
    let c = constant.enclosure(prec)?;
    let k = RealEnclosure::from_ratio(&6483.into(), &10_000.into(), prec);
    let first = c.mul(&nn).mul(&ll);
    let second = k.mul(&nn).div(&ll)?;
    Ok(first.add(&second))
}

/// Robin-form upper bound with `e^γ` at 128 bits.
pub fn robin_upper(n: u64) -> Result<RealEnclosure, ArithError> {
    robin_upper_with(n, RobinConstant::ExpGamma, 128)
}

/// `2^s / (p_1 ⋯ p_s)^{1/a}` for distinct primes `p_i ≤ 2^a`.
pub fn c_constant(primes: &[u64], a: u32, prec: u32) -> Result<RealEnclosure, ArithError> {
    let bound = 1u64
        .checked_shl(a)
        .ok_or_else(|| ArithError::InvalidInput("a too large".into()))?;
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ArithError::InvalidInput("primes must be distinct".into()));
    }
    for &p in &sorted {
        if !is_prime_u64(p) {
            return Err(ArithError::NotPrime(p));
        }
        if p > bound {
            return Err(ArithError::InvalidInput(format!("prime {p} exceeds 2^{a}")));
        }
    }
    if sorted.is_empty() {
        return Ok(RealEnclosure::from_int(1, prec));
    }
    let product = sorted.iter().fold(BigUint::one(), |acc, &p| acc * p);
    let root = RealEnclosure::from_int(BigInt::from(product), prec)
        .ln()?
        .div(&RealEnclosure::from_int(a, prec))?
        .exp()?;
    let two_s = RealEnclosure::from_int(1, prec).mul_pow2(sorted.len() as i64);
    Ok(two_s.div(&root)?)
}

/// Primes `p ≤ bound` dividing `q^n - 1`, found by testing `ord_p(q) | n`
/// (that is, `q^n ≡ 1 mod p`) without forming `q^n - 1`.
pub fn small_prime_divisors(q: u64, n: u64, bound: u64) -> Vec<u64> {
    let limit = u32::try_from(bound.saturating_add(1)).expect("bound too large for sieve");
    sieve(limit)
        .into_iter()
        .map(u64::from)
        .filter(|&p| q % p != 0 && pow_mod_u64(q % p, n, p) == 1)
        .collect()
}

/// Supremum of `c_{r,a}` over square-free `r` (odd `r` when `odd_only`):
/// the product of `2/p^{1/a}` over the primes where that factor exceeds 1.
pub fn lemma_constant_sup(a: u32, odd_only: bool, prec: u32) -> Result<RealEnclosure, ArithError> {
    let bound = 1u64 << a;
    let primes: Vec<u64> = sieve(bound as u32 + 1)
        .into_iter()
        .map(u64::from)
        .filter(|&p| p < bound && !(odd_only && p == 2))
        .collect();
    c_constant(&primes, a, prec)
}

/// Exact check of `W(r) ≤ c_{r,a}·r^{1/a}` for square-free `r`, after raising
/// both sides to the power `a`: `W(r)^a · Π_{p|r, p≤2^a} p ≤ 2^{s·a} · r`.
pub fn lemma_w_bound_holds(prime_factors: &[u64], a: u32) -> bool {
    let bound = 1u64 << a;
    let r = prime_factors.iter().fold(BigUint::one(), |acc, &p| acc * p);
    let small: Vec<u64> = prime_factors
        .iter()
        .copied()
        .filter(|&p| p <= bound)
        .collect();
    let small_product = small.iter().fold(BigUint::one(), |acc, &p| acc * p);
    let omega = prime_factors.len() as u64;
    let lhs = (BigUint::one() << (omega * a as u64)) * small_product;
    let rhs = (BigUint::one() << (small.len() as u64 * a as u64)) * r;
    lhs <= rhs
}

/// Stated bounds for the Lemma-3.3-type suprema, as exact rationals.
pub fn decimal(s: &str) -> BigRational {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let den = BigInt::from(10u8).pow(frac.len() as u32);
    let num: BigInt = format!("{int}{frac}").parse().expect("decimal literal");
    BigRational::new(num, den)
}
