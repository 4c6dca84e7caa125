//! Exp/log/Zech tables for fields small enough to enumerate.

use super::{FFElem, FieldArith, FieldCtx, FieldError};

/// Discrete logarithm of an element to the table generator; [`LOG_ZERO`] for 0.
pub type LogElem = u32;
pub const LOG_ZERO: LogElem = u32::MAX;

/// Largest field for which tables are built.
pub const TABLE_CAP: u64 = 1 << 22;

/// Field of size at most [`TABLE_CAP`] with O(1) arithmetic on discrete logs.
#[derive(Debug, Clone)]
pub struct LogField {
    p: u64,
    size: u64,
    order: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    neg_one: u32,
    generator: FFElem,
}

impl LogField {
    /// Builds the tables from the least-index primitive element of `ctx`.
    pub fn new(ctx: &FieldCtx) -> Result<Self, FieldError> {
        let size = ctx.size_u64().filter(|&s| s <= TABLE_CAP).ok_or_else(|| {
            FieldError::FieldTooLarge {
                size: ctx.size().to_string(),
                cap: TABLE_CAP,
            }
        })?;
        let g = ctx.first_primitive()?;
        let order = size - 1;
        let p = ctx.p();
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![LOG_ZERO; size as usize];
        let mut cur = ctx.one();
        let mut tmp = ctx.zero();
        let mut scratch = ctx.scratch();
        for k in 0..order {
            let idx = ctx.index_of(&cur).unwrap() as usize;
            if log[idx] != LOG_ZERO {
                return Err(FieldError::NotPrimitive);
            }
            log[idx] = k as u32;
            exp[k as usize] = idx as u32;
            ctx.mul_into(&cur.coords, &g.coords, &mut tmp.coords, &mut scratch);
            std::mem::swap(&mut cur, &mut tmp);
        }
        let plus_one = |idx: u64| {
            if idx % p == p - 1 {
                idx - (p - 1)
            } else {
                idx + 1
            }
        };
        let zech: Vec<u32> = exp
            .iter()
            .map(|&idx| log[plus_one(idx as u64) as usize])
            .collect();
        let neg_one = if p == 2 { 0 } else { (order / 2) as u32 };
        Ok(LogField {
            p,
            size,
            order,
            exp,
            log,
            zech,
            neg_one,
            generator: g,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    /// Order `|F^*|` of the multiplicative group.
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn generator(&self) -> &FFElem {
        &self.generator
    }

    /// Log of the element with coordinate index `idx`.
    #[inline]
    pub fn from_index(&self, idx: u64) -> LogElem {
        self.log[idx as usize]
    }

    /// Coordinate index of a log-represented element.
    #[inline]
    pub fn to_index(&self, a: LogElem) -> u64 {
        if a == LOG_ZERO {
            0
        } else {
            self.exp[a as usize] as u64
        }
    }

    pub fn from_elem(&self, ctx: &FieldCtx, x: &FFElem) -> LogElem {
        self.from_index(ctx.index_of(x).expect("field fits the tables"))
    }

    pub fn to_elem(&self, ctx: &FieldCtx, a: LogElem) -> FFElem {
        ctx.from_index(self.to_index(a))
    }

    #[inline]
    fn reduce(&self, k: u64) -> u32 {
        (k % self.order) as u32
    }

    #[inline]
    pub fn neg(&self, a: LogElem) -> LogElem {
        if a == LOG_ZERO {
            a
        } else {
            self.reduce(a as u64 + self.neg_one as u64)
        }
    }

    /// `a^e`, with `0^0 = 1`.
    #[inline]
    pub fn pow(&self, a: LogElem, e: u64) -> LogElem {
        if a == LOG_ZERO {
            return if e == 0 { 0 } else { LOG_ZERO };
        }
        ((a as u128 * e as u128) % self.order as u128) as u32
    }

    /// Sum of the elements with coordinate indices `i` and `j`.
    pub fn add_index(&self, i: u64, j: u64) -> u64 {
        self.to_index(self.add(&self.from_index(i), &self.from_index(j)))
    }
}

impl FieldArith for LogField {
    type Elem = LogElem;
    #[inline]
    fn zero(&self) -> LogElem {
        LOG_ZERO
    }
    #[inline]
    fn one(&self) -> LogElem {
        0
    }
    #[inline]
    fn is_zero(&self, a: &LogElem) -> bool {
        *a == LOG_ZERO
    }
    #[inline]
    fn add(&self, a: &LogElem, b: &LogElem) -> LogElem {
        let (a, b) = (*a, *b);
        if a == LOG_ZERO {
            return b;
        }
        if b == LOG_ZERO {
            return a;
        }
        // g^a + g^b = g^a (1 + g^{b-a})
        let d = if b >= a {
            b - a
        } else {
            b + self.order as u32 - a
        };
        let z = self.zech[d as usize];
        if z == LOG_ZERO {
            LOG_ZERO
        } else {
            self.reduce(a as u64 + z as u64)
        }
    }
    #[inline]
    fn sub(&self, a: &LogElem, b: &LogElem) -> LogElem {
        self.add(a, &self.neg(*b))
    }
    #[inline]
    fn mul(&self, a: &LogElem, b: &LogElem) -> LogElem {
        if *a == LOG_ZERO || *b == LOG_ZERO {
            LOG_ZERO
        } else {
            self.reduce(*a as u64 + *b as u64)
        }
    }
    #[inline]
    fn inv(&self, a: &LogElem) -> LogElem {
        assert!(*a != LOG_ZERO, "inverse of zero");
        if *a == 0 {
            0
        } else {
            self.order as u32 - *a
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FactorBudget;
    use crate::ffield::make_field;

    #[test]
    fn tables_agree_with_polynomial_arithmetic() {
        for (p, e, n) in [
            (2u64, 1u32, 6u32),
            (3, 1, 5),
            (5, 2, 2),
            (7, 1, 3),
            (13, 1, 2),
        ] {
            let ctx = make_field(p, e, n, None)
                .unwrap()
                .with_factored_order(FactorBudget::default())
                .unwrap();
            let t = LogField::new(&ctx).unwrap();
            let size = t.size();
            for i in 0..size {
                let a = ctx.from_index(i);
                let la = t.from_index(i);
                assert_eq!(t.to_index(la), i);
                for j in (0..size).step_by(7) {
                    let b = ctx.from_index(j);
                    let lb = t.from_index(j);
                    assert_eq!(
                        ctx.index_of(&ctx.add(&a, &b)).unwrap(),
                        t.to_index(t.add(&la, &lb))
                    );
                    assert_eq!(
                        ctx.index_of(&ctx.sub(&a, &b)).unwrap(),
                        t.to_index(t.sub(&la, &lb))
                    );
                    assert_eq!(
                        ctx.index_of(&ctx.mul(&a, &b)).unwrap(),
                        t.to_index(t.mul(&la, &lb))
                    );
                }
                if i != 0 {
                    assert_eq!(
                        ctx.index_of(&ctx.inv(&a).unwrap()).unwrap(),
                        t.to_index(t.inv(&la))
                    );
                }
            }
        }
    }

    #[test]
    fn too_large() {
        let ctx = make_field(2, 1, 23, None).unwrap();
        assert!(matches!(
            LogField::new(&ctx),
            Err(FieldError::FieldTooLarge { .. })
        ));
    }
}
