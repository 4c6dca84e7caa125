//! Dense polynomials over a [`LogField`], ascending coefficients, no trailing zeros.

use num_bigint::BigUint;
use rand::Rng;

use crate::ffield::{FieldArith, LogElem, LogField};

pub(crate) type Poly = Vec<LogElem>;

pub(crate) fn trim(t: &LogField, a: &mut Poly) {
    while a.last().is_some_and(|c| t.is_zero(c)) {
        a.pop();
    }
}

pub(crate) fn degree(a: &Poly) -> usize {
    a.len().saturating_sub(1)
}

pub(crate) fn one(t: &LogField) -> Poly {
    vec![t.one()]
}

pub(crate) fn mul(t: &LogField, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![t.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if t.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = t.add(&out[i + j], &t.mul(x, y));
        }
    }
    trim(t, &mut out);
    out
}

pub(crate) fn sub(t: &LogField, a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![t.zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = *x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = t.sub(&out[i], y);
    }
    trim(t, &mut out);
    out
}

/// Quotient and remainder; `m` must be nonzero.
pub(crate) fn div_rem(t: &LogField, a: &Poly, m: &Poly) -> (Poly, Poly) {
    let dm = m.len() - 1;
    let lead_inv = t.inv(m.last().unwrap());
    let mut r = a.clone();
    let mut quo = vec![t.zero(); a.len().saturating_sub(dm).max(1)];
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = t.mul(r.last().unwrap(), &lead_inv);
        quo[shift] = c;
        for j in 0..dm {
            r[shift + j] = t.sub(&r[shift + j], &t.mul(&c, &m[j]));
        }
        r.pop();
        trim(t, &mut r);
    }
    trim(t, &mut quo);
    (quo, r)
}

pub(crate) fn rem(t: &LogField, a: &Poly, m: &Poly) -> Poly {
    div_rem(t, a, m).1
}

pub(crate) fn monic(t: &LogField, a: &Poly) -> Poly {
    match a.last() {
        None => Vec::new(),
        Some(l) => {
            let inv = t.inv(l);
            a.iter().map(|c| t.mul(c, &inv)).collect()
        }
    }
}

pub(crate) fn gcd(t: &LogField, a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(t, &a, &b);
        a = b;
        b = r;
    }
    monic(t, &a)
}

pub(crate) fn mulmod(t: &LogField, a: &Poly, b: &Poly, m: &Poly) -> Poly {
    rem(t, &mul(t, a, b), m)
}

pub(crate) fn powmod(t: &LogField, a: &Poly, e: &BigUint, m: &Poly) -> Poly {
    let mut acc = rem(t, &one(t), m);
    let base = rem(t, a, m);
    for i in (0..e.bits()).rev() {
        acc = mulmod(t, &acc, &acc, m);
        if e.bit(i) {
            acc = mulmod(t, &acc, &base, m);
        }
    }
    acc
}

/// Splits a product of distinct monic irreducibles of degree `d` over F_Q,
/// `Q = p^k` (`k = log_p_q`), into its factors by Cantor–Zassenhaus.
///
/// `sample` must return uniformly random elements of F_Q.
pub(crate) fn equal_degree_split<R: Rng>(
    t: &LogField,
    f: &Poly,
    d: usize,
    log_p_q: u32,
    mut sample: impl FnMut(&mut R) -> LogElem,
    rng: &mut R,
) -> Option<Vec<Poly>> {
    let p = t.p();
    let mut done = Vec::new();
    let mut todo = vec![monic(t, f)];
    let exponent = (BigUint::from(p).pow(log_p_q * d as u32) - 1u32) / 2u32;
    let mut attempts = 0;
    while let Some(g) = todo.pop() {
        if degree(&g) == d {
            done.push(g);
            continue;
        }
        attempts += 1;
        if attempts > 10_000 {
            return None;
        }
        let mut r: Poly = (0..degree(&g)).map(|_| sample(rng)).collect();
        trim(t, &mut r);
        if r.is_empty() {
            todo.push(g);
            continue;
        }
        let h = if p == 2 {
            // absolute trace of F_{Q^d} over F_2, evaluated at r
            let mut acc = Vec::new();
            let mut cur = rem(t, &r, &g);
            for _ in 0..log_p_q as usize * d {
                acc = add(t, &acc, &cur);
                cur = mulmod(t, &cur, &cur, &g);
            }
            acc
        } else {
            sub(t, &powmod(t, &r, &exponent, &g), &one(t))
        };
        let c = gcd(t, &g, &h);
        if degree(&c) > 0 && degree(&c) < degree(&g) {
            let (other, _) = div_rem(t, &g, &c);
            todo.push(c);
            todo.push(monic(t, &other));
        } else {
            todo.push(g);
        }
    }
    done.sort();
    Some(done)
}

pub(crate) fn add(t: &LogField, a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![t.zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = *x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = t.add(&out[i], y);
    }
    trim(t, &mut out);
    out
}

/// Integer coefficients of the cyclotomic polynomial `Φ_e`.
pub(crate) fn cyclotomic_integer(e: u64) -> Vec<i64> {
    // X^e - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; e as usize + 1];
    num[0] = -1;
    num[e as usize] = 1;
    for d in crate::arith::divisors(e) {
        if d == e {
            continue;
        }
        let den = cyclotomic_integer(d);
        num = int_div_exact(&num, &den);
    }
    num
}

fn int_div_exact(a: &[i64], m: &[i64]) -> Vec<i64> {
    // m is monic
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i64; a.len() - dm];
    for shift in (0..q.len()).rev() {
        let c = r[shift + dm];
        q[shift] = c;
        for j in 0..=dm {
            r[shift + j] -= c * m[j];
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}
