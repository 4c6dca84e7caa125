//! Shape of `X^{n/l} - 1` over F_{q^l} through cyclotomic cosets, the derived
//! Euler/divisor counts, and normality tests over intermediate fields.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors, p_free_part, pow_mod_u64, prime_power};
use crate::ffield::{FFElem, FieldArith, FieldCtx, FieldError, LogElem, LogField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FqxError {
    #[error("gcd({q}, {m}) != 1")]
    NotCoprime { q: u64, m: u64 },
    #[error("{l} does not divide {n}")]
    NotADivisor { l: u64, n: u64 },
    #[error("{q} is not a power of {p}")]
    NotPowerOfP { q: u64, p: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Orbits of `Z/mZ` under multiplication by `Q`, each listed from its least element.
pub fn cyclotomic_cosets(m: u64, big_q: u64) -> Result<Vec<Vec<u64>>, FqxError> {
    if m == 0 || big_q.gcd(&m) != 1 {
        return Err(FqxError::NotCoprime { q: big_q, m });
    }
    let qm = big_q % m;
    let mut seen = vec![false; m as usize];
    let mut cosets = Vec::new();
    for a in 0..m {
        if seen[a as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut b = a;
        while !seen[b as usize] {
            seen[b as usize] = true;
            orbit.push(b);
            b = ((b as u128 * qm as u128) % m as u128) as u64;
        }
        cosets.push(orbit);
    }
    Ok(cosets)
}

/// Factorization shape of `X^{n/l} - 1 = (X^{m'} - 1)^{p^k}` over F_{q^l}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycFactorization {
    pub l: u64,
    pub m_prime: u64,
    pub multiplicity: u64,
    /// Degrees of the distinct irreducible factors, ascending.
    pub coset_degrees: Vec<u64>,
}

fn check_power_of_p(q: u64, p: u64) -> Result<(), FqxError> {
    match prime_power(q) {
        Some((base, _)) if base == p => Ok(()),
        _ => Err(FqxError::NotPowerOfP { q, p }),
    }
}

impl CycFactorization {
    pub fn new(q: u64, p: u64, n: u64, l: u64) -> Result<Self, FqxError> {
        check_power_of_p(q, p)?;
        if l == 0 || n % l != 0 {
            return Err(FqxError::NotADivisor { l, n });
        }
        let k = n / l;
        let m_prime = p_free_part(k, p);
        let big_q_mod = pow_mod_u64(q % m_prime, l, m_prime);
        let cosets = cyclotomic_cosets(m_prime, if m_prime == 1 { 1 } else { big_q_mod })?;
        let mut coset_degrees: Vec<u64> = cosets.iter().map(|c| c.len() as u64).collect();
        coset_degrees.sort_unstable();
        Ok(CycFactorization {
            l,
            m_prime,
            multiplicity: k / m_prime,
            coset_degrees,
        })
    }

    pub fn num_factors(&self) -> usize {
        self.coset_degrees.len()
    }
}

/// `φ_l(X^{n/l}-1)`, `W_l` of its square-free part and `θ_l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyStats {
    #[serde(with = "crate::serde_dec")]
    pub phi: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub w_sf: BigUint,
    #[serde(with = "crate::serde_dec::rational")]
    pub theta: BigRational,
}

pub fn poly_stats(q: u64, p: u64, n: u64, l: u64) -> Result<PolyStats, FqxError> {
    let cf = CycFactorization::new(q, p, n, l)?;
    Ok(poly_stats_from(&cf, q, n))
}

pub fn poly_stats_from(cf: &CycFactorization, q: u64, n: u64) -> PolyStats {
    let big_q = BigUint::from(q).pow(cf.l as u32);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for &d in &cf.coset_degrees {
        let qd = big_q.pow(d as u32);
        num *= &qd - 1u32;
        den *= qd;
    }
    // φ = q^n Π (1 - Q^{-d}) and Σ d = m' ≤ n/l, so the quotient is exact
    let phi = BigUint::from(q).pow(n as u32) / &den * &num;
    PolyStats {
        phi,
        w_sf: BigUint::one() << cf.coset_degrees.len(),
        theta: BigRational::new(num.into(), den.into()),
    }
}

/// Divisors `l` of `n` with `l < n`.
pub fn proper_divisors(n: u64) -> Vec<u64> {
    divisors(n).into_iter().filter(|&d| d < n).collect()
}

/// Whether `Σ c_i X^i` is coprime to `X^k - 1` with `k = coeffs.len()`.
pub fn coprime_to_xk_minus_1<F: FieldArith>(f: &F, coeffs: &[F::Elem]) -> bool {
    let k = coeffs.len();
    // b(1) = 0 means (X - 1) is a common factor
    let mut at_one = f.zero();
    for c in coeffs {
        at_one = f.add(&at_one, c);
    }
    if f.is_zero(&at_one) {
        return false;
    }
    let mut a: Vec<F::Elem> = vec![f.zero(); k + 1];
    a[0] = f.sub(&f.zero(), &f.one());
    a[k] = f.one();
    let mut b: Vec<F::Elem> = coeffs.to_vec();
    trim(f, &mut b);
    loop {
        if b.is_empty() {
            // gcd is a, which has degree ≥ 1 here
            return a.len() == 1;
        }
        if b.len() == 1 {
            return true;
        }
        let lead_inv = f.inv(b.last().unwrap());
        let db = b.len() - 1;
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let c = f.mul(a.last().unwrap(), &lead_inv);
            for j in 0..db {
                let t = f.mul(&c, &b[j]);
                a[shift + j] = f.sub(&a[shift + j], &t);
            }
            a.pop();
            trim(f, &mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
}

fn trim<F: FieldArith>(f: &F, v: &mut Vec<F::Elem>) {
    while v.last().is_some_and(|c| f.is_zero(c)) {
        v.pop();
    }
}

fn check_divisor(ctx: &FieldCtx, l: u64) -> Result<(), FqxError> {
    let n = ctx.n() as u64;
    if l == 0 || n % l != 0 {
        return Err(FqxError::NotADivisor { l, n });
    }
    Ok(())
}

fn normal_from_conjugates(ctx: &FieldCtx, x: &FFElem, conj: &[FFElem], l: u64) -> bool {
    let n = ctx.n() as u64;
    if l == n {
        return !x.is_zero();
    }
    let coeffs: Vec<FFElem> = (0..n / l).map(|i| conj[(l * i) as usize].clone()).collect();
    coprime_to_xk_minus_1(ctx, &coeffs)
}

/// Normality of `x` over F_{q^l}: `gcd(X^{n/l} - 1, Σ x^{q^{l i}} X^i) = 1`.
pub fn normality_test(ctx: &FieldCtx, x: &FFElem, l: u64) -> Result<bool, FqxError> {
    check_divisor(ctx, l)?;
    let conj = ctx.conjugates(x, ctx.n() as usize);
    Ok(normal_from_conjugates(ctx, x, &conj, l))
}

/// Normal over F_{q^l} for every proper divisor `l` of `n`; false for 0.
pub fn is_completely_normal(ctx: &FieldCtx, x: &FFElem) -> bool {
    if x.is_zero() {
        return false;
    }
    let conj = ctx.conjugates(x, ctx.n() as usize);
    proper_divisors(ctx.n() as u64)
        .into_iter()
        .all(|l| normal_from_conjugates(ctx, x, &conj, l))
}

/// Independent check: `x` is normal over F_{q^l} iff the F_p-span of
/// `{ b·x^{q^{l i}} }`, with `b` running over an F_p-basis of F_{q^l}, is everything.
pub fn normality_rank_test(ctx: &FieldCtx, x: &FFElem, l: u64) -> Result<bool, FqxError> {
    check_divisor(ctx, l)?;
    let p = ctx.p();
    let d = ctx.degree();
    // F_{q^l} = kernel of y ↦ y^{q^l} - y, as an F_p-linear map
    let mut cols = Vec::with_capacity(d);
    let mut basis_elem = ctx.one();
    let gen = ctx.x();
    for _ in 0..d {
        let img = ctx.frobenius(&basis_elem, l as u32)?;
        cols.push(ctx.sub(&img, &basis_elem).coords);
        basis_elem = ctx.mul(&basis_elem, &gen);
    }
    let kernel = kernel_mod_p(&cols, d, p);
    let conj = ctx.conjugates(x, ctx.n() as usize);
    let k = ctx.n() as u64 / l;
    let mut rows = Vec::with_capacity(d);
    for kv in &kernel {
        let b = FFElem { coords: kv.clone() };
        for i in 0..k {
            rows.push(ctx.mul(&b, &conj[(l * i) as usize]).coords);
        }
    }
    Ok(rank_mod_p(rows, p) == d)
}

/// Rank over F_p of a list of row vectors.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod_u64(rows[rank][col], p - 2, p);
        for c in rows[rank].iter_mut() {
            *c = *c * inv % p;
        }
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (c, &pv) in row.iter_mut().zip(&prow) {
                    *c = (*c + (p - f) * pv) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of `{ v : Σ v_j · cols[j] = 0 }` where `cols[j]` has length `d`.
fn kernel_mod_p(cols: &[Vec<u64>], d: usize, p: u64) -> Vec<Vec<u64>> {
    let ncols = cols.len();
    // matrix rows i, columns j
    let mut m: Vec<Vec<u64>> = (0..d)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..d).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = pow_mod_u64(m[r][c], p - 2, p);
        for v in m[r].iter_mut() {
            *v = *v * inv % p;
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (v, &pv) in row.iter_mut().zip(&prow) {
                    *v = (*v + (p - f) * pv) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == d {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[row][fc]) % p;
            }
            v
        })
        .collect()
}

/// Normality tests on log-represented elements, for enumeration.
#[derive(Debug, Clone)]
pub struct LogNormality {
    n: u64,
    /// Proper divisors of `n`, ascending.
    pub divisors: Vec<u64>,
    /// `q^j mod |F^*|` for `j < n`.
    q_pows: Vec<u64>,
}

impl LogNormality {
    pub fn new(t: &LogField, q: u64, n: u64) -> Self {
        let order = t.order();
        let mut q_pows = Vec::with_capacity(n as usize);
        let mut v = 1u64 % order.max(1);
        for _ in 0..n {
            q_pows.push(v);
            v = ((v as u128 * q as u128) % order as u128) as u64;
        }
        LogNormality {
            n,
            divisors: proper_divisors(n),
            q_pows,
        }
    }

    /// Normality over F_{q^l} for the element with discrete log `x`.
    pub fn is_normal(&self, t: &LogField, x: LogElem, l: u64, buf: &mut Vec<LogElem>) -> bool {
        if t.is_zero(&x) {
            return false;
        }
        if l == self.n {
            return true;
        }
        buf.clear();
        for i in 0..self.n / l {
            buf.push(t.pow(x, self.q_pows[(l * i) as usize]));
        }
        coprime_to_xk_minus_1(t, buf)
    }

    /// Bit `i` is set when `x` is normal over F_{q^{divisors[i]}}.
    pub fn mask(&self, t: &LogField, x: LogElem, buf: &mut Vec<LogElem>) -> u64 {
        let mut m = 0u64;
        for (i, &l) in self.divisors.iter().enumerate() {
            if self.is_normal(t, x, l, buf) {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.divisors.len()) - 1
    }
}
