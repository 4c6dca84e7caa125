//! Dense polynomials over F_p, coefficients ascending, no trailing zeros.

use num_bigint::BigUint;

use crate::arith::pow_mod_u64;

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod_u64(a, p - 2, p)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] += (x * y) as u128;
        }
    }
    let mut out: Vec<u64> = acc.into_iter().map(|v| (v % p as u128) as u64).collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a / b`; `b` must be nonzero.
pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db] * lead_inv % p;
        q[i] = c;
        if c != 0 {
            for j in 0..=db {
                r[i + j] = (r[i + j] + (p - c) * b[j]) % p;
            }
        }
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    divrem(a, b, p).1
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let li = inv_mod(lead, p);
        for c in x.iter_mut() {
            *c = *c * li % p;
        }
    }
    x
}

/// `base^e mod f`.
pub(crate) fn powmod(base: &[u64], e: &BigUint, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let b = rem(base, f, p);
    for i in (0..e.bits()).rev() {
        acc = rem(&mul(&acc, &acc, p), f, p);
        if e.bit(i) {
            acc = rem(&mul(&acc, &b, p), f, p);
        }
    }
    acc
}

/// Inverse of `a` modulo `f` by the extended Euclidean algorithm.
pub(crate) fn inv_modpoly(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = f.to_vec();
    let mut r1 = rem(a, f, p);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.len() != 1 {
        return None;
    }
    let c = inv_mod(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|&v| v * c % p).collect();
    out = rem(&out, f, p);
    Some(out)
}

/// Distinct-degree irreducibility check for a monic `f` of degree ≥ 1.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let pe = BigUint::from(p);
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        h = powmod(&h, &pe, f, p);
        let g = gcd(&sub(&h, &x, p), f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Least monic irreducible of degree `d` in the order of `Σ c_i p^i` over
/// the non-leading coefficients.
pub(crate) fn least_irreducible(p: u64, d: usize) -> Vec<u64> {
    let mut f = vec![0u64; d + 1];
    f[d] = 1;
    loop {
        if (d == 1 || f[0] != 0) && is_irreducible(&f, p) {
            return f;
        }
        // odometer increment over f[0..d]
        let mut i = 0;
        loop {
            assert!(i < d, "no irreducible polynomial found");
            f[i] += 1;
            if f[i] < p {
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}
