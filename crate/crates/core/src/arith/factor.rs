//! Integer factorization: trial division, perfect-power detection and
//! Pollard–Brent rho, plus the cyclotomic split of `q^n - 1`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::mont::{gcd_u128, Mont128};
use super::primes::{primality, small_primes, Primality};
use super::{divisors, mobius, prime_power, ArithError};

/// Default rho iteration budget per composite cofactor.
pub const DEFAULT_RHO_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBudget {
    /// Maximum number of rho iterations spent on any single cofactor.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            rho_iterations: DEFAULT_RHO_BUDGET,
        }
    }
}

impl FactorBudget {
    pub fn new(rho_iterations: u64) -> Self {
        FactorBudget { rho_iterations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFactor {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    pub exponent: u32,
    /// False when primality rests on BPSW rather than a deterministic test.
    pub proven: bool,
}

/// Factorization of a positive integer, possibly partial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntFactorization {
    #[serde(with = "crate::serde_dec")]
    pub value: BigUint,
    pub factors: Vec<PrimeFactor>,
    pub complete: bool,
    /// Product of the composite parts that resisted the budget (absent when complete).
    #[serde(with = "crate::serde_dec::option", default)]
    pub cofactor: Option<BigUint>,
}

impl IntFactorization {
    pub fn one() -> Self {
        IntFactorization {
            value: BigUint::one(),
            factors: Vec::new(),
            complete: true,
            cofactor: None,
        }
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|f| &f.prime)
    }

    pub fn num_distinct(&self) -> usize {
        self.factors.len()
    }

    pub fn has_probable_primes(&self) -> bool {
        self.factors.iter().any(|f| !f.proven)
    }

    /// Product of prime^exponent over the listed factors.
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * f.prime.pow(f.exponent))
    }

    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.factors
            .iter()
            .find(|f| &f.prime == p)
            .map_or(0, |f| f.exponent)
    }

    /// Structural validity: sorted distinct primes and product identity when complete.
    pub fn is_consistent(&self) -> bool {
        let sorted = self.factors.windows(2).all(|w| w[0].prime < w[1].prime);
        let exps = self.factors.iter().all(|f| f.exponent > 0);
        let product = self.product();
        let identity = if self.complete {
            product == self.value && self.cofactor.is_none()
        } else {
            match &self.cofactor {
                Some(c) => c > &BigUint::one() && product * c == self.value,
                None => false,
            }
        };
        sorted && exps && identity
    }

    fn from_map(
        value: BigUint,
        map: BTreeMap<BigUint, (u32, bool)>,
        leftovers: Vec<BigUint>,
    ) -> Self {
        let factors = map
            .into_iter()
            .map(|(prime, (exponent, proven))| PrimeFactor {
                prime,
                exponent,
                proven,
            })
            .collect();
        let complete = leftovers.is_empty();
        let cofactor = if complete {
            None
        } else {
            Some(leftovers.into_iter().fold(BigUint::one(), |a, b| a * b))
        };
        IntFactorization {
            value,
            factors,
            complete,
            cofactor,
        }
    }
}

/// Square-free kernel data of a completely factored integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadicalInfo {
    #[serde(with = "crate::serde_dec")]
    pub radical: BigUint,
    pub num_primes: u32,
    #[serde(with = "crate::serde_dec")]
    pub num_divisors: BigUint,
    #[serde(with = "crate::serde_dec::rational")]
    pub theta: BigRational,
}

pub fn radical_info(f: &IntFactorization) -> Result<RadicalInfo, ArithError> {
    if !f.complete {
        return Err(ArithError::IncompleteFactorization {
            value: f.value.to_string(),
        });
    }
    let mut radical = BigUint::one();
    let mut num = BigUint::one();
    for pf in &f.factors {
        radical *= &pf.prime;
        num *= &pf.prime - 1u32;
    }
    let s = f.factors.len() as u32;
    Ok(RadicalInfo {
        theta: BigRational::new(num.into(), radical.clone().into()),
        radical,
        num_primes: s,
        num_divisors: BigUint::one() << s,
    })
}

fn add_prime(map: &mut BTreeMap<BigUint, (u32, bool)>, p: BigUint, k: u32, proven: bool) {
    let entry = map.entry(p).or_insert((0, true));
    entry.0 += k;
    entry.1 &= proven;
}

/// Returns `(root, k)` with `n = root^k` and `k` maximal among small exponents.
fn perfect_power(n: &BigUint) -> (BigUint, u32) {
    let bits = n.bits();
    // Cofactors have no prime factor below 10^6 (about 20 bits).
    let max_k = (bits / 19).max(1) as u32;
    for k in (2..=max_k).rev() {
        let r = n.nth_root(k);
        if &r.pow(k) == n {
            let (rr, kk) = perfect_power(&r);
            return (rr, kk * k);
        }
    }
    (n.clone(), 1)
}

const RHO_BATCH: u64 = 128;

/// Pollard–Brent rho for odd composite `n < 2^127`.
fn rho_u128(n: u128, budget: u64) -> Option<u128> {
    let mont = Mont128::new(n);
    let mut spent: u64 = 0;
    let mut c_raw: u128 = 1;
    while spent < budget {
        let c = mont.to_mont(c_raw);
        let f = |v: u128| mont.add(mont.mul(v, v), c);
        let mut y = mont.to_mont(2);
        let mut x = y;
        let mut ys = y;
        let mut q = mont.to_mont(1);
        let mut g: u128 = 1;
        let mut r: u64 = 1;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            spent += r;
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = RHO_BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mont.mul(q, mont.sub(x, y));
                }
                spent += steps;
                g = gcd_u128(q, n);
                k += steps;
            }
            r *= 2;
            if g == 1 && spent >= budget {
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                spent += 1;
                g = gcd_u128(mont.sub(x, ys), n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
        c_raw += 1;
    }
    None
}

/// Same algorithm on arbitrary-precision residues, for cofactors above 2^127.
fn rho_big(n: &BigUint, budget: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let mut spent: u64 = 0;
    let mut c = BigUint::one();
    while spent < budget {
        let f = |v: &BigUint| (v * v + &c) % n;
        let sub = |a: &BigUint, b: &BigUint| if a >= b { a - b } else { a + n - b };
        let mut y = BigUint::from(2u8);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = one.clone();
        let mut g = one.clone();
        let mut r: u64 = 1;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            spent += r;
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = RHO_BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    q = (q * sub(&x, &y)) % n;
                }
                spent += steps;
                g = q.gcd(n);
                k += steps;
            }
            r *= 2;
            if g.is_one() && spent >= budget {
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                spent += 1;
                g = sub(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
        c += 1u32;
    }
    None
}

fn rho_split(n: &BigUint, budget: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u8));
    }
    if n.bits() < 127 {
        rho_u128(n.to_u128().unwrap(), budget).map(BigUint::from)
    } else {
        rho_big(n, budget)
    }
}

/// Removes all prime factors below [`super::primes::TRIAL_DIVISION_LIMIT`];
/// returns the remaining cofactor.
fn trial_divide(n: &BigUint, map: &mut BTreeMap<BigUint, (u32, bool)>) -> BigUint {
    let mut rem = n.clone();
    let primes = small_primes();
    let mut i = 0;
    while i < primes.len() && !rem.is_one() {
        if let Some(mut r) = rem.to_u64() {
            for &p in &primes[i..] {
                let p = p as u64;
                if p * p > r {
                    break;
                }
                let mut k = 0;
                while r % p == 0 {
                    r /= p;
                    k += 1;
                }
                if k > 0 {
                    add_prime(map, BigUint::from(p), k, true);
                }
            }
            return BigUint::from(r);
        }
        let p = primes[i];
        let mut k = 0;
        while (&rem % p).is_zero() {
            rem /= p;
            k += 1;
        }
        if k > 0 {
            add_prime(map, BigUint::from(p), k, true);
        }
        i += 1;
    }
    rem
}

/// Fully splits a cofactor free of small primes; unsplit composites go to `leftovers`.
fn split_cofactor(
    rem: BigUint,
    budget: FactorBudget,
    map: &mut BTreeMap<BigUint, (u32, bool)>,
    leftovers: &mut Vec<BigUint>,
) {
    let mut stack: Vec<(BigUint, u32)> = Vec::new();
    if !rem.is_one() {
        stack.push((rem, 1));
    }
    while let Some((c, mult)) = stack.pop() {
        if c.is_one() {
            continue;
        }
        // No prime factor below 10^6, so anything below 10^12 is prime.
        if c.bits() < 40 && c.to_u64().unwrap() < 1_000_000_000_000 {
            add_prime(map, c, mult, true);
            continue;
        }
        match primality(&c) {
            Primality::Prime => add_prime(map, c, mult, true),
            Primality::ProbablePrime => add_prime(map, c, mult, false),
            Primality::Composite => {
                let (root, k) = perfect_power(&c);
                if k > 1 {
                    stack.push((root, mult * k));
                    continue;
                }
                match rho_split(&c, budget.rho_iterations) {
                    Some(d) => {
                        let other = &c / &d;
                        stack.push((d, mult));
                        stack.push((other, mult));
                    }
                    None => leftovers.push(c.pow(mult)),
                }
            }
        }
    }
}

/// Factors `n ≥ 1`: trial division by primes below 10^6, then Pollard–Brent rho.
pub fn factor_int(n: &BigUint, budget: FactorBudget) -> Result<IntFactorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::InvalidInput("cannot factor 0".into()));
    }
    let mut map = BTreeMap::new();
    let mut leftovers = Vec::new();
    let rem = trial_divide(n, &mut map);
    split_cofactor(rem, budget, &mut map, &mut leftovers);
    Ok(IntFactorization::from_map(n.clone(), map, leftovers))
}

/// Factorization of a `u64` as `(prime, exponent)` pairs. Always complete.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor_u64(0)");
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut r = n;
    for &p in small_primes() {
        let p = p as u64;
        if p * p > r {
            break;
        }
        let mut k = 0;
        while r % p == 0 {
            r /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
    }
    if r > 1 {
        let mut stack = vec![r];
        let mut big: Vec<u64> = Vec::new();
        while let Some(c) = stack.pop() {
            if super::primes::is_prime_u64(c) {
                big.push(c);
            } else {
                let d = rho_u128(c as u128, u64::MAX)
                    .expect("rho always splits a composite eventually")
                    as u64;
                stack.push(d);
                stack.push(c / d);
            }
        }
        big.sort_unstable();
        for p in big {
            match out.last_mut() {
                Some((q, k)) if *q == p => *k += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    out
}

/// Value of the d-th cyclotomic polynomial at `x`.
pub fn cyclotomic_value(d: u64, x: &BigUint) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for k in divisors(d) {
        let term = x.pow(k as u32) - 1u32;
        match mobius(d / k) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

/// One piece `Φ_d(p)` of the split `q^n - 1 = p^{en} - 1 = Π_{d | en} Φ_d(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicPiece {
    pub d: u64,
    pub base: u64,
    pub value: BigUint,
}

pub fn cyclotomic_pieces(q: u64, n: u64) -> Result<Vec<CyclotomicPiece>, ArithError> {
    let (p, e) = prime_power(q).ok_or(ArithError::NotPrimePower(q))?;
    if n == 0 {
        return Err(ArithError::InvalidInput("n must be positive".into()));
    }
    let base = BigUint::from(p);
    Ok(divisors(e as u64 * n)
        .into_iter()
        .map(|d| CyclotomicPiece {
            d,
            base: p,
            value: cyclotomic_value(d, &base),
        })
        .collect())
}

type PieceCache = std::sync::Mutex<std::collections::HashMap<(u64, u64), IntFactorization>>;

fn piece_cache() -> &'static PieceCache {
    static CACHE: std::sync::OnceLock<PieceCache> = std::sync::OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn factor_piece(piece: &CyclotomicPiece, budget: FactorBudget) -> IntFactorization {
    let key = (piece.base, piece.d);
    if let Some(f) = piece_cache().lock().unwrap().get(&key) {
        return f.clone();
    }
    let f = factor_int(&piece.value, budget).expect("cyclotomic values are positive");
    if f.complete {
        piece_cache().lock().unwrap().insert(key, f.clone());
    }
    f
}

/// Factorization of `q^n - 1` through its cyclotomic pieces.
pub fn factor_qn_minus_1(
    q: u64,
    n: u64,
    budget: FactorBudget,
) -> Result<IntFactorization, ArithError> {
    let pieces = cyclotomic_pieces(q, n)?;
    let mut map = BTreeMap::new();
    let mut leftovers = Vec::new();
    for piece in &pieces {
        let f = factor_piece(piece, budget);
        for pf in f.factors {
            add_prime(&mut map, pf.prime, pf.exponent, pf.proven);
        }
        if let Some(c) = f.cofactor {
            leftovers.push(c);
        }
    }
    let value = BigUint::from(q).pow(n as u32) - 1u32;
    Ok(IntFactorization::from_map(value, map, leftovers))
}
