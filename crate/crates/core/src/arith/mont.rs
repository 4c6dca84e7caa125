//! Montgomery arithmetic modulo odd `n < 2^127`, used by the rho inner loop.

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let mask = u64::MAX as u128;
    let (a0, a1) = (a & mask, a >> 64);
    let (b0, b1) = (b & mask, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    let lo = (p00 & mask) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Mont128 {
    n: u128,
    neg_inv: u128,
    r2: u128,
}

impl Mont128 {
    pub(crate) fn new(n: u128) -> Self {
        assert!(
            n & 1 == 1 && n < (1u128 << 127),
            "modulus must be odd and < 2^127"
        );
        let mut inv: u128 = n;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r = (u128::MAX % n + 1) % n;
        let mut r2 = r;
        for _ in 0..128 {
            r2 <<= 1;
            if r2 >= n {
                r2 -= n;
            }
        }
        Mont128 {
            n,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.neg_inv);
        let (mh, ml) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        // hi < n and mh < n, so the sum fits in 128 bits when n < 2^127.
        let t = hi + mh + carry as u128;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    #[inline]
    pub(crate) fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.n - b
        }
    }

    pub(crate) fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    #[cfg(test)]
    pub(crate) fn from_mont(&self, a: u128) -> u128 {
        self.redc(0, a)
    }
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn mont_matches_bigint() {
        let n: u128 = (1u128 << 126) - 137;
        let m = Mont128::new(n);
        let a: u128 = 0x1234_5678_9abc_def0_1122_3344_5566_7788 % n;
        let b: u128 = 0x0fed_cba9_8765_4321_0011_2233_4455_6677 % n;
        let got = m.from_mont(m.mul(m.to_mont(a), m.to_mont(b)));
        let want = (BigUint::from(a) * BigUint::from(b)) % BigUint::from(n);
        assert_eq!(BigUint::from(got), want);
        assert_eq!(m.from_mont(m.to_mont(a)), a);
    }

    #[test]
    fn small_modulus() {
        let m = Mont128::new(15);
        for a in 0..15u128 {
            for b in 0..15u128 {
                assert_eq!(m.from_mont(m.mul(m.to_mont(a), m.to_mont(b))), a * b % 15);
            }
        }
    }

    #[test]
    fn gcd_basic() {
        assert_eq!(gcd_u128(12, 18), 6);
        assert_eq!(gcd_u128(0, 7), 7);
        assert_eq!(gcd_u128(17, 5), 1);
    }
}
