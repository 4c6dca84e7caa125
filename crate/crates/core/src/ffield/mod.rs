//! Arithmetic in F_{q^n} realized as F_p[x]/(f) with `deg f = e·n`.

mod fp_poly;
mod logtab;

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, factor_qn_minus_1, is_prime_u64, FactorBudget, IntFactorization};

pub use logtab::{LogElem, LogField, LOG_ZERO, TABLE_CAP};

/// Largest field handled by table-based discrete logarithms.
pub const DLOG_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is too large (must be below 2^31)")]
    CharacteristicTooLarge(u64),
    #[error("modulus is reducible over F_p")]
    ReducibleModulus,
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{l} does not divide {n}")]
    NotADivisor { l: u64, n: u64 },
    #[error("factorization of q^n - 1 is not available")]
    MissingFactorization,
    #[error("factorization of q^n - 1 is incomplete")]
    IncompleteFactorization,
    #[error("field of size {size} exceeds the cap {cap}")]
    FieldTooLarge { size: String, cap: u64 },
    #[error("element has {got} coordinates, expected {want}")]
    WrongLength { got: usize, want: usize },
    #[error("coordinate {0} is out of range")]
    CoordinateOutOfRange(u64),
    #[error("element is not primitive")]
    NotPrimitive,
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
}

/// An element of F_p[x]/(f) as its coordinate vector in the power basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FFElem {
    pub coords: Vec<u64>,
}

/// Field operations shared by the polynomial and the table backends.
pub trait FieldArith {
    type Elem: Clone + PartialEq;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
}

#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u64,
    e: u32,
    n: u32,
    q: u64,
    degree: usize,
    modulus: Vec<u64>,
    /// `x^{D+k} mod f` for `k < D - 1`.
    reduction: Vec<Vec<u64>>,
    /// Row `j` holds the coordinates of `(x^j)^q`.
    frob: Vec<Vec<u64>>,
    order: BigUint,
    group_order_factors: Option<IntFactorization>,
    primitivity_exponents: Vec<BigUint>,
}

/// Builds `F_{p^{e n}}` viewed as a degree-`n` extension of `F_{p^e}`.
pub fn make_field(
    p: u64,
    e: u32,
    n: u32,
    modulus: Option<Vec<u64>>,
) -> Result<FieldCtx, FieldError> {
    FieldCtx::new(p, e, n, modulus)
}

impl FieldCtx {
    pub fn new(p: u64, e: u32, n: u32, modulus: Option<Vec<u64>>) -> Result<Self, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 31 {
            return Err(FieldError::CharacteristicTooLarge(p));
        }
        if e == 0 || n == 0 {
            return Err(FieldError::BadModulus("e and n must be positive".into()));
        }
        let degree = (e * n) as usize;
        let q = p
            .checked_pow(e)
            .ok_or_else(|| FieldError::BadModulus("q = p^e overflows 64 bits".into()))?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != degree + 1 || m[degree] != 1 {
                    return Err(FieldError::BadModulus(format!(
                        "expected a monic polynomial of degree {degree}"
                    )));
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(FieldError::CoordinateOutOfRange(c));
                }
                if !fp_poly::is_irreducible(&m, p) {
                    return Err(FieldError::ReducibleModulus);
                }
                m
            }
            None => fp_poly::least_irreducible(p, degree),
        };
        let mut reduction = Vec::with_capacity(degree.saturating_sub(1));
        for k in 0..degree.saturating_sub(1) {
            let mut mono = vec![0u64; degree + k + 1];
            mono[degree + k] = 1;
            let mut r = fp_poly::rem(&mono, &modulus, p);
            r.resize(degree, 0);
            reduction.push(r);
        }
        let order = BigUint::from(q).pow(n) - 1u32;
        let mut ctx = FieldCtx {
            p,
            e,
            n,
            q,
            degree,
            modulus,
            reduction,
            frob: Vec::new(),
            order,
            group_order_factors: None,
            primitivity_exponents: Vec::new(),
        };
        let xq = ctx.pow(&ctx.x(), &BigUint::from(q));
        let mut row = ctx.one();
        let mut frob = Vec::with_capacity(degree);
        for _ in 0..degree {
            frob.push(row.coords.clone());
            row = ctx.mul(&row, &xq);
        }
        ctx.frob = frob;
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Degree `e·n` of the modulus over F_p.
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    /// Multiplicative group order `q^n - 1`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }
    pub fn size(&self) -> BigUint {
        &self.order + 1u32
    }
    pub fn size_u64(&self) -> Option<u64> {
        self.size().to_u64()
    }

    pub fn group_order_factors(&self) -> Option<&IntFactorization> {
        self.group_order_factors.as_ref()
    }

    /// Installs a factorization of `q^n - 1`; it must be complete and match.
    pub fn set_group_order_factors(&mut self, f: IntFactorization) -> Result<(), FieldError> {
        if f.value != self.order {
            return Err(FieldError::BadModulus(
                "factorization does not match q^n - 1".into(),
            ));
        }
        if !f.complete {
            return Err(FieldError::IncompleteFactorization);
        }
        self.primitivity_exponents = f.distinct_primes().map(|r| &self.order / r).collect();
        self.group_order_factors = Some(f);
        Ok(())
    }

    pub fn factor_group_order(&mut self, budget: FactorBudget) -> Result<(), FieldError> {
        let f = factor_qn_minus_1(self.q, self.n as u64, budget)?;
        self.set_group_order_factors(f)
    }

    pub fn with_factored_order(mut self, budget: FactorBudget) -> Result<Self, FieldError> {
        self.factor_group_order(budget)?;
        Ok(self)
    }

    pub fn zero(&self) -> FFElem {
        FFElem {
            coords: vec![0; self.degree],
        }
    }

    pub fn one(&self) -> FFElem {
        self.from_int(1)
    }

    pub fn from_int(&self, c: u64) -> FFElem {
        let mut v = self.zero();
        v.coords[0] = c % self.p;
        v
    }

    /// The class of `x` (the generator of the power basis).
    pub fn x(&self) -> FFElem {
        let mut v = self.zero();
        if self.degree == 1 {
            // F_p[x]/(x - c): x is the constant c
            v.coords[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            v.coords[1] = 1;
        }
        v
    }

    pub fn elem(&self, coords: Vec<u64>) -> Result<FFElem, FieldError> {
        if coords.len() != self.degree {
            return Err(FieldError::WrongLength {
                got: coords.len(),
                want: self.degree,
            });
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::CoordinateOutOfRange(c));
        }
        Ok(FFElem { coords })
    }

    /// Index `Σ c_i p^i` of an element, if it fits in 64 bits.
    pub fn index_of(&self, x: &FFElem) -> Option<u64> {
        let mut idx: u64 = 0;
        for &c in x.coords.iter().rev() {
            idx = idx.checked_mul(self.p)?.checked_add(c)?;
        }
        Some(idx)
    }

    pub fn from_index(&self, mut idx: u64) -> FFElem {
        let mut v = self.zero();
        for c in v.coords.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        v
    }

    pub fn is_zero(&self, x: &FFElem) -> bool {
        x.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, x: &FFElem) -> bool {
        x.coords[0] == 1 && x.coords[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let p = self.p;
        FFElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(&x, &y)| (x + y) % p)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let p = self.p;
        FFElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(&x, &y)| (x + p - y) % p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FFElem) -> FFElem {
        let p = self.p;
        FFElem {
            coords: a.coords.iter().map(|&x| (p - x) % p).collect(),
        }
    }

    pub fn scale(&self, a: &FFElem, c: u64) -> FFElem {
        let p = self.p;
        let c = c % p;
        FFElem {
            coords: a.coords.iter().map(|&x| x * c % p).collect(),
        }
    }

    /// Allocation-free product kernel; `acc` must have length ≥ `2D - 1`.
    pub fn mul_into(&self, a: &[u64], b: &[u64], out: &mut [u64], acc: &mut [u128]) {
        let d = self.degree;
        let p = self.p as u128;
        let acc = &mut acc[..2 * d - 1];
        acc.fill(0);
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let row = &mut acc[i..i + d];
            for (slot, &bj) in row.iter_mut().zip(b) {
                *slot += (ai * bj) as u128;
            }
        }
        for k in 0..d.saturating_sub(1) {
            let h = (acc[d + k] % p) as u64;
            if h == 0 {
                continue;
            }
            for (slot, &r) in acc[..d].iter_mut().zip(&self.reduction[k]) {
                *slot += (h * r) as u128;
            }
        }
        for (o, &v) in out.iter_mut().zip(acc.iter()) {
            *o = (v % p) as u64;
        }
    }

    pub fn scratch(&self) -> Vec<u128> {
        vec![0u128; 2 * self.degree]
    }

    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let mut out = self.zero();
        let mut acc = self.scratch();
        self.mul_into(&a.coords, &b.coords, &mut out.coords, &mut acc);
        out
    }

    pub fn square(&self, a: &FFElem) -> FFElem {
        self.mul(a, a)
    }

    pub fn inv(&self, a: &FFElem) -> Result<FFElem, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        let mut poly = a.coords.clone();
        fp_poly::trim(&mut poly);
        let mut inv =
            fp_poly::inv_modpoly(&poly, &self.modulus, self.p).ok_or(FieldError::DivisionByZero)?;
        inv.resize(self.degree, 0);
        Ok(FFElem { coords: inv })
    }

    pub fn div(&self, a: &FFElem, b: &FFElem) -> Result<FFElem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Left-to-right binary exponentiation.
    pub fn pow(&self, x: &FFElem, exp: &BigUint) -> FFElem {
        let mut acc = self.one();
        let mut tmp = self.zero();
        let mut scratch = self.scratch();
        for i in (0..exp.bits()).rev() {
            self.mul_into(&acc.coords, &acc.coords, &mut tmp.coords, &mut scratch);
            std::mem::swap(&mut acc, &mut tmp);
            if exp.bit(i) {
                self.mul_into(&acc.coords, &x.coords, &mut tmp.coords, &mut scratch);
                std::mem::swap(&mut acc, &mut tmp);
            }
        }
        acc
    }

    pub fn pow_u64(&self, x: &FFElem, exp: u64) -> FFElem {
        self.pow(x, &BigUint::from(exp))
    }

    /// One application of `y ↦ y^q` through the precomputed linear map.
    pub fn frob_q(&self, x: &FFElem) -> FFElem {
        let d = self.degree;
        let p = self.p as u128;
        let mut acc = vec![0u128; d];
        for (j, &c) in x.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &m) in acc.iter_mut().zip(&self.frob[j]) {
                *slot += (c * m) as u128;
            }
        }
        FFElem {
            coords: acc.into_iter().map(|v| (v % p) as u64).collect(),
        }
    }

    /// `x^{q^l}` for `l | n`.
    pub fn frobenius(&self, x: &FFElem, l: u32) -> Result<FFElem, FieldError> {
        self.check_divisor(l)?;
        let mut y = x.clone();
        for _ in 0..(l % self.n) {
            y = self.frob_q(&y);
        }
        Ok(y)
    }

    /// `[x, x^q, x^{q^2}, …]` with `count` entries.
    pub fn conjugates(&self, x: &FFElem, count: usize) -> Vec<FFElem> {
        let mut out = Vec::with_capacity(count);
        let mut y = x.clone();
        for _ in 0..count {
            let next = self.frob_q(&y);
            out.push(y);
            y = next;
        }
        out
    }

    pub fn check_divisor(&self, l: u32) -> Result<(), FieldError> {
        if l == 0 || self.n % l != 0 {
            return Err(FieldError::NotADivisor {
                l: l as u64,
                n: self.n as u64,
            });
        }
        Ok(())
    }

    /// Absolute trace `Tr_{F_{p^D}/F_p}`, as the trace of multiplication by `x`.
    pub fn trace_fp(&self, x: &FFElem) -> u64 {
        let mut basis = self.one();
        let gen = self.x();
        let mut t = 0u64;
        for i in 0..self.degree {
            let col = self.mul(x, &basis);
            t = (t + col.coords[i]) % self.p;
            basis = self.mul(&basis, &gen);
        }
        t
    }

    /// True iff `x ≠ 0` and `x^{(q^n-1)/r} ≠ 1` for every prime `r | q^n - 1`.
    pub fn is_primitive(&self, x: &FFElem) -> Result<bool, FieldError> {
        if self.group_order_factors.is_none() {
            return Err(FieldError::MissingFactorization);
        }
        if self.is_zero(x) {
            return Ok(false);
        }
        if self.order.is_one() {
            // F_2^*: the single element 1 generates it
            return Ok(true);
        }
        for exp in &self.primitivity_exponents {
            if self.is_one(&self.pow(x, exp)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `(prime r, x^{(q^n-1)/r} != 1)` for every prime divisor of the group order.
    pub fn primitivity_witness(&self, x: &FFElem) -> Result<Vec<(BigUint, bool)>, FieldError> {
        let f = self
            .group_order_factors
            .as_ref()
            .ok_or(FieldError::MissingFactorization)?;
        Ok(f.distinct_primes()
            .zip(&self.primitivity_exponents)
            .map(|(r, e)| (r.clone(), !self.is_one(&self.pow(x, e))))
            .collect())
    }

    /// Least-index primitive element.
    pub fn first_primitive(&self) -> Result<FFElem, FieldError> {
        let mut x = self.one();
        loop {
            if self.is_primitive(&x)? {
                return Ok(x);
            }
            x = self.next_elem(&x).expect("a primitive element exists");
        }
    }

    /// Successor in index order, `None` after the last element.
    pub fn next_elem(&self, x: &FFElem) -> Option<FFElem> {
        let mut y = x.clone();
        for c in y.coords.iter_mut() {
            *c += 1;
            if *c < self.p {
                return Some(y);
            }
            *c = 0;
        }
        None
    }

    /// Least `k` with `g^k = y`, by baby-step giant-step.
    pub fn discrete_log(&self, g: &FFElem, y: &FFElem) -> Result<u64, FieldError> {
        let size = self.size_u64().filter(|&s| s <= DLOG_CAP).ok_or_else(|| {
            FieldError::FieldTooLarge {
                size: self.size().to_string(),
                cap: DLOG_CAP,
            }
        })?;
        if self.is_zero(y) {
            return Err(FieldError::DivisionByZero);
        }
        let order = size - 1;
        let m = (order as f64).sqrt().ceil() as u64;
        let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
        let mut cur = self.one();
        for j in 0..m {
            baby.entry(self.index_of(&cur).unwrap()).or_insert(j);
            cur = self.mul(&cur, g);
        }
        let giant = self.inv(&self.pow_u64(g, m))?;
        let mut gamma = y.clone();
        for i in 0..=m {
            if let Some(&j) = baby.get(&self.index_of(&gamma).unwrap()) {
                let k = i * m + j;
                if k < order {
                    return Ok(k);
                }
            }
            gamma = self.mul(&gamma, &giant);
        }
        Err(FieldError::NotPrimitive)
    }
}

impl FieldArith for FieldCtx {
    type Elem = FFElem;
    fn zero(&self) -> FFElem {
        FieldCtx::zero(self)
    }
    fn one(&self) -> FFElem {
        FieldCtx::one(self)
    }
    fn is_zero(&self, a: &FFElem) -> bool {
        FieldCtx::is_zero(self, a)
    }
    fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        FieldCtx::add(self, a, b)
    }
    fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        FieldCtx::sub(self, a, b)
    }
    fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        FieldCtx::mul(self, a, b)
    }
    fn inv(&self, a: &FFElem) -> FFElem {
        FieldCtx::inv(self, a).expect("inverse of zero")
    }
}

/// Checks that `modulus` is irreducible over F_p (exposed for certificate checks).
pub fn is_irreducible_over_fp(modulus: &[u64], p: u64) -> bool {
    !modulus.is_empty() && modulus.iter().all(|&c| c < p) && fp_poly::is_irreducible(modulus, p)
}

/// Default modulus: least monic irreducible of degree `d` over F_p.
pub fn default_modulus(p: u64, d: usize) -> Vec<u64> {
    fp_poly::least_irreducible(p, d)
}

impl FFElem {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}
