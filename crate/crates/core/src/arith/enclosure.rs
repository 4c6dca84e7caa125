//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! Every operation returns an interval guaranteed to contain the exact real
//! result. `exp` and `ln` are evaluated by range reduction plus a power series
//! whose truncation error is bounded explicitly and added to the interval.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Precisions tried, in order, before a comparison is declared undecidable.
pub const PRECISION_LADDER: [u32; 3] = [64, 128, 256];

/// Euler's constant to 100 decimal places (truncated).
const EULER_GAMMA_100: &str =
    "5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnclosureError {
    #[error("logarithm of an interval that is not strictly positive")]
    LogDomain,
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("exponent out of range")]
    Overflow,
    #[error("enclosures still overlap at {0} bits")]
    Undecided(u32),
}

/// Exact value `mantissa · 2^exponent`, kept with an odd (or zero) mantissa.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "DyadicRepr", try_from = "DyadicRepr")]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    mantissa: String,
    exponent: i64,
}

impl From<Dyadic> for DyadicRepr {
    fn from(d: Dyadic) -> Self {
        DyadicRepr {
            mantissa: d.man.to_string(),
            exponent: d.exp,
        }
    }
}

impl TryFrom<DyadicRepr> for Dyadic {
    type Error = String;
    fn try_from(r: DyadicRepr) -> Result<Self, String> {
        let man: BigInt = r
            .mantissa
            .parse()
            .map_err(|e| format!("bad mantissa: {e}"))?;
        Ok(Dyadic::new(man, r.exponent))
    }
}

fn shift_floor(m: &BigUint, s: u64) -> BigUint {
    m >> s
}

fn shift_ceil(m: &BigUint, s: u64) -> BigUint {
    let q = m >> s;
    if (&q << s) == *m {
        q
    } else {
        q + 1u32
    }
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Dyadic { man, exp: 0 };
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        Dyadic {
            man: man >> tz,
            exp: exp + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(BigInt::one())
    }

    pub fn from_int(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn pow2(k: i64) -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: k,
        }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Dyadic::new(BigInt::from(man) * sign, exp))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// `floor(log2 |x|) + 1`, i.e. the position just above the leading bit.
    fn magnitude(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &o.man << (o.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &o.man, self.exp + o.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    /// Rounds to at most `prec` significant bits, toward +inf if `up` else toward -inf.
    pub fn round(&self, prec: u32, up: bool) -> Dyadic {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        let mag = self.man.magnitude();
        let negative = self.man.is_negative();
        // toward +inf on a negative number means truncating its magnitude
        let away_from_zero = up != negative;
        let m = if away_from_zero {
            shift_ceil(mag, s)
        } else {
            shift_floor(mag, s)
        };
        let man = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, m);
        Dyadic::new(man, self.exp + s as i64)
    }

    /// `self / o` rounded to `prec` bits in the given direction.
    pub fn div(&self, o: &Dyadic, prec: u32, up: bool) -> Dyadic {
        assert!(!o.is_zero(), "Dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let k = (prec as i64 + 2 + o.man.bits() as i64 - self.man.bits() as i64).max(0) as u64;
        let num = &self.man << k;
        let (q, r) = num.div_mod_floor(&o.man);
        // floor quotient; bump for ceiling if inexact
        let q = if up && !r.is_zero() { q + 1 } else { q };
        Dyadic::new(q, self.exp - o.exp - k as i64).round(prec, up)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            (&self.man >> s, self.exp + s as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let mut x = m.to_f64().unwrap_or(f64::NAN);
        let mut e = e;
        while e > 1000 {
            x *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            x *= 2f64.powi(-1000);
            e += 1000;
        }
        x * 2f64.powi(e as i32)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Integer-valued dyadic as a `BigInt`, if it is one.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if self.exp >= 0 {
            Some(&self.man << self.exp as u64)
        } else {
            None
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), o.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // same sign: compare magnitudes first to avoid huge shifts
        let (ma, mb) = (self.magnitude(), o.magnitude());
        if ma != mb {
            let by_mag = ma.cmp(&mb);
            return if sa > 0 { by_mag } else { by_mag.reverse() };
        }
        self.sub(o).signum().cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// A closed interval `[lower, upper]` of reals with dyadic endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealEnclosure {
    pub lower: Dyadic,
    pub upper: Dyadic,
    pub precision_bits: u32,
}

/// Comparison relation certified by [`certify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Gt,
    Ge,
    Lt,
    Le,
}

impl RealEnclosure {
    fn make(lower: Dyadic, upper: Dyadic, prec: u32) -> Self {
        debug_assert!(lower <= upper, "inverted enclosure");
        RealEnclosure {
            lower: lower.round(prec, false),
            upper: upper.round(prec, true),
            precision_bits: prec,
        }
    }

    pub fn point(d: Dyadic, prec: u32) -> Self {
        RealEnclosure::make(d.clone(), d, prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        RealEnclosure::point(Dyadic::from_int(n.into()), prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        let n = Dyadic::from_int(num.clone());
        let d = Dyadic::from_int(den.clone());
        RealEnclosure {
            lower: n.div(&d, prec, false),
            upper: n.div(&d, prec, true),
            precision_bits: prec,
        }
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        RealEnclosure::from_ratio(r.numer(), r.denom(), prec)
    }

    /// Widens to `[lower, upper]` with explicit endpoints (used for constants).
    pub fn from_bounds(lower: Dyadic, upper: Dyadic, prec: u32) -> Self {
        RealEnclosure::make(lower, upper, prec)
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lower <= d && d <= &self.upper
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        Dyadic::from_f64(x).is_some_and(|d| self.contains(&d))
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower.to_f64()
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper.to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lower_f64() + self.upper_f64())
    }

    pub fn width(&self) -> Dyadic {
        self.upper.sub(&self.lower)
    }

    fn prec_with(&self, o: &RealEnclosure) -> u32 {
        self.precision_bits.max(o.precision_bits)
    }

    pub fn add(&self, o: &RealEnclosure) -> RealEnclosure {
        RealEnclosure::make(
            self.lower.add(&o.lower),
            self.upper.add(&o.upper),
            self.prec_with(o),
        )
    }

    pub fn sub(&self, o: &RealEnclosure) -> RealEnclosure {
        RealEnclosure::make(
            self.lower.sub(&o.upper),
            self.upper.sub(&o.lower),
            self.prec_with(o),
        )
    }

    pub fn neg(&self) -> RealEnclosure {
        RealEnclosure {
            lower: self.upper.neg(),
            upper: self.lower.neg(),
            precision_bits: self.precision_bits,
        }
    }

    pub fn mul(&self, o: &RealEnclosure) -> RealEnclosure {
        let prec = self.prec_with(o);
        if self.lower.signum() >= 0 && o.lower.signum() >= 0 {
            return RealEnclosure::make(self.lower.mul(&o.lower), self.upper.mul(&o.upper), prec);
        }
        let c = [
            self.lower.mul(&o.lower),
            self.lower.mul(&o.upper),
            self.upper.mul(&o.lower),
            self.upper.mul(&o.upper),
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RealEnclosure::make(lo, hi, prec)
    }

    pub fn mul_pow2(&self, k: i64) -> RealEnclosure {
        RealEnclosure {
            lower: self.lower.mul_pow2(k),
            upper: self.upper.mul_pow2(k),
            precision_bits: self.precision_bits,
        }
    }

    pub fn recip(&self) -> Result<RealEnclosure, EnclosureError> {
        if self.lower.signum() <= 0 && self.upper.signum() >= 0 {
            return Err(EnclosureError::DivisionByZero);
        }
        let one = Dyadic::one();
        let prec = self.precision_bits;
        Ok(RealEnclosure {
            lower: one.div(&self.upper, prec, false),
            upper: one.div(&self.lower, prec, true),
            precision_bits: prec,
        })
    }

    pub fn div(&self, o: &RealEnclosure) -> Result<RealEnclosure, EnclosureError> {
        let prec = self.prec_with(o);
        let r = o.with_precision(prec).recip()?;
        Ok(self.mul(&r))
    }

    pub fn with_precision(&self, prec: u32) -> RealEnclosure {
        RealEnclosure::make(self.lower.clone(), self.upper.clone(), prec)
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut k: u64) -> RealEnclosure {
        let mut acc = RealEnclosure::from_int(1, self.precision_bits);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn ln(&self) -> Result<RealEnclosure, EnclosureError> {
        if self.lower.signum() <= 0 {
            return Err(EnclosureError::LogDomain);
        }
        let prec = self.precision_bits;
        let w = prec + 32;
        let lo = ln_point(&self.lower, w);
        let hi = if self.is_point() {
            lo.clone()
        } else {
            ln_point(&self.upper, w)
        };
        Ok(RealEnclosure::make(lo.lower, hi.upper, prec))
    }

    pub fn exp(&self) -> Result<RealEnclosure, EnclosureError> {
        let prec = self.precision_bits;
        let w = prec + 32;
        let lo = exp_point(&self.lower, w)?;
        let hi = if self.is_point() {
            lo.clone()
        } else {
            exp_point(&self.upper, w)?
        };
        Ok(RealEnclosure::make(lo.lower, hi.upper, prec))
    }

    /// `self^r` for a strictly positive base.
    pub fn powr(&self, r: &RealEnclosure) -> Result<RealEnclosure, EnclosureError> {
        self.ln()?.mul(r).exp()
    }

    /// Certain ordering, or `None` when the intervals overlap.
    pub fn compare(&self, o: &RealEnclosure) -> Option<Ordering> {
        if self.upper < o.lower {
            Some(Ordering::Less)
        } else if self.lower > o.upper {
            Some(Ordering::Greater)
        } else if self.is_point() && o.is_point() && self.lower == o.lower {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn ln2(prec: u32) -> RealEnclosure {
        ln2_enclosure(prec + 16).with_precision(prec)
    }

    pub fn euler_gamma(prec: u32) -> RealEnclosure {
        let scale = BigInt::from(10u8).pow(100);
        let digits: BigInt = EULER_GAMMA_100.parse().unwrap();
        // truncated value is within 10^-100 below gamma
        let lo = RealEnclosure::from_ratio(&digits, &scale, prec + 8);
        let hi = RealEnclosure::from_ratio(&(digits + 1), &scale, prec + 8);
        RealEnclosure::make(lo.lower, hi.upper, prec)
    }
}

/// Returns the verdict of `lhs rel rhs`, escalating precision until the two
/// enclosures separate.
pub fn certify<F>(
    rel: Relation,
    eval: F,
) -> Result<(bool, RealEnclosure, RealEnclosure), EnclosureError>
where
    F: FnMut(u32) -> Result<(RealEnclosure, RealEnclosure), EnclosureError>,
{
    certify_from(PRECISION_LADDER[0], rel, eval)
}

/// [`certify`] starting at `start` bits: the ladder rungs at or above it, or
/// `start` alone when it exceeds the top rung.
pub fn certify_from<F>(
    start: u32,
    rel: Relation,
    mut eval: F,
) -> Result<(bool, RealEnclosure, RealEnclosure), EnclosureError>
where
    F: FnMut(u32) -> Result<(RealEnclosure, RealEnclosure), EnclosureError>,
{
    let mut ladder: Vec<u32> = PRECISION_LADDER
        .iter()
        .copied()
        .filter(|&p| p >= start)
        .collect();
    if ladder.is_empty() {
        ladder.push(start);
    }
    let mut last = 0;
    for prec in ladder {
        last = prec;
        let (l, r) = eval(prec)?;
        let verdict = match (l.compare(&r), rel) {
            (None, _) => continue,
            (Some(Ordering::Greater), Relation::Gt | Relation::Ge) => true,
            (Some(Ordering::Less), Relation::Lt | Relation::Le) => true,
            (Some(Ordering::Equal), Relation::Ge | Relation::Le) => true,
            (Some(_), _) => false,
        };
        return Ok((verdict, l, r));
    }
    Err(EnclosureError::Undecided(last))
}

/// Sum of `z^(2i+1)/(2i+1)` with an explicit tail bound; requires `|z| ≤ zmax ≤ 1/2`.
fn atanh_series(z: &RealEnclosure, zmax: f64, w: u32) -> RealEnclosure {
    debug_assert!(zmax <= 0.5);
    if zmax == 0.0 {
        return RealEnclosure::from_int(0, w);
    }
    let bits_per_term = -2.0 * zmax.log2();
    let n_terms = ((w as f64 + 6.0) / bits_per_term).ceil() as u64 + 1;
    let z2 = z.mul(z);
    let mut term = z.clone();
    let mut sum = RealEnclosure::from_int(0, w);
    for i in 0..n_terms {
        let d = RealEnclosure::from_int(2 * i + 1, w);
        sum = sum.add(&term.div(&d).expect("odd denominator"));
        term = term.mul(&z2);
    }
    // tail ≤ zmax^(2N+1) / ((2N+1)(1 - zmax²)) ≤ 2·zmax^(2N+1)
    let zm = Dyadic::from_f64(zmax).unwrap();
    let mut t = Dyadic::one();
    for _ in 0..(2 * n_terms + 1) {
        t = t.mul(&zm).round(w, true);
    }
    let t = t.mul_pow2(1);
    RealEnclosure::make(sum.lower.sub(&t), sum.upper.add(&t), w)
}

fn ln2_enclosure(w: u32) -> RealEnclosure {
    static CACHE: OnceLock<Mutex<HashMap<u32, RealEnclosure>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&w) {
        return v.clone();
    }
    // ln 2 = 2 atanh(1/3)
    let third = RealEnclosure::from_ratio(&BigInt::one(), &BigInt::from(3u8), w + 8);
    let v = atanh_series(&third, 0.333_333_333_333_333_4, w + 8)
        .mul_pow2(1)
        .with_precision(w);
    cache.lock().unwrap().insert(w, v.clone());
    v
}

/// Enclosure of `ln x` for a positive dyadic, at working precision `w`.
fn ln_point(x: &Dyadic, w: u32) -> RealEnclosure {
    debug_assert!(x.signum() > 0);
    let mut k = x.magnitude();
    // y = x / 2^k in [1/2, 1)
    let y = x.mul_pow2(-k);
    let (mut ylo, mut yhi) = (y.round(w + 8, false), y.round(w + 8, true));
    let threshold = Dyadic::new(BigInt::from(181), -8);
    if y < threshold {
        ylo = ylo.mul_pow2(1);
        yhi = yhi.mul_pow2(1);
        k -= 1;
    }
    // z = (y-1)/(y+1) is increasing in y
    let one = Dyadic::one();
    let wz = w + 8;
    let zlo = ylo.sub(&one).div(&ylo.add(&one), wz, false);
    let zhi = yhi.sub(&one).div(&yhi.add(&one), wz, true);
    let zmax = zlo.to_f64().abs().max(zhi.to_f64().abs()) * (1.0 + 1e-12) + 1e-300;
    let z = RealEnclosure::make(zlo, zhi, wz);
    let at = atanh_series(&z, zmax.min(0.5), wz).mul_pow2(1);
    let kbits = 64 - k.unsigned_abs().leading_zeros();
    let l2 = ln2_enclosure(wz + kbits);
    let kl = l2.mul(&RealEnclosure::from_int(k, wz + kbits));
    at.add(&kl).with_precision(w)
}

/// Enclosure of `e^x` at working precision `w`.
fn exp_point(x: &Dyadic, w: u32) -> Result<RealEnclosure, EnclosureError> {
    if x.is_zero() {
        return Ok(RealEnclosure::from_int(1, w));
    }
    let xf = x.to_f64();
    if !xf.is_finite() || xf.abs() > 1e12 {
        return Err(EnclosureError::Overflow);
    }
    const SQUARINGS: u32 = 12;
    let wi = w + SQUARINGS + 16;
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let kbits = 64 - k.unsigned_abs().leading_zeros();
    let l2 = ln2_enclosure(wi + kbits + 8);
    let r = RealEnclosure::point(x.clone(), wi + kbits + 8)
        .sub(&l2.mul(&RealEnclosure::from_int(k, wi + kbits + 8)));
    let r = r.with_precision(wi).mul_pow2(-(SQUARINGS as i64));
    let rmax = r.lower_f64().abs().max(r.upper_f64().abs()) * (1.0 + 1e-12) + 1e-300;
    debug_assert!(rmax < 1e-3);
    let bits_per_term = -rmax.log2();
    let n_terms = ((wi as f64 + 4.0) / bits_per_term).ceil() as u64 + 1;
    let mut sum = RealEnclosure::from_int(1, wi);
    let mut term = RealEnclosure::from_int(1, wi);
    for i in 1..=n_terms {
        term = term
            .mul(&r)
            .div(&RealEnclosure::from_int(i, wi))
            .expect("i > 0");
        sum = sum.add(&term);
    }
    // tail ≤ 2·rmax^(N+1) for rmax ≤ 1/2
    let rm = Dyadic::from_f64(rmax).unwrap();
    let mut t = Dyadic::one();
    for _ in 0..=n_terms {
        t = t.mul(&rm).round(wi, true);
    }
    let t = t.mul_pow2(1);
    let mut v = RealEnclosure::make(sum.lower.sub(&t), sum.upper.add(&t), wi);
    for _ in 0..SQUARINGS {
        v = v.mul(&v);
    }
    Ok(v.mul_pow2(k).with_precision(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(x: f64) -> RealEnclosure {
        RealEnclosure::point(Dyadic::from_f64(x).unwrap(), 128)
    }

    #[test]
    fn rounding_directions() {
        let d = Dyadic::from_int(BigInt::from(0b1011_0111));
        assert_eq!(
            d.round(4, false),
            Dyadic::from_int(BigInt::from(0b1011_0000))
        );
        assert_eq!(
            d.round(4, true),
            Dyadic::from_int(BigInt::from(0b1100_0000))
        );
        let n = d.neg();
        assert_eq!(
            n.round(4, false),
            Dyadic::from_int(BigInt::from(-0b1100_0000))
        );
        assert_eq!(
            n.round(4, true),
            Dyadic::from_int(BigInt::from(-0b1011_0000))
        );
    }

    #[test]
    fn division_brackets_exact_quotient() {
        let a = Dyadic::from_int(BigInt::from(1));
        let b = Dyadic::from_int(BigInt::from(3));
        let lo = a.div(&b, 60, false);
        let hi = a.div(&b, 60, true);
        assert!(lo < hi);
        let third = BigRational::new(1.into(), 3.into());
        assert!(lo.to_rational() < third && third < hi.to_rational());
        let neg = a.neg();
        let nlo = neg.div(&b, 60, false);
        assert!(nlo.to_rational() < -third);
    }

    #[test]
    fn f64_roundtrip() {
        for x in [1.5, -0.1, 1e300, 5e-324, 12345.678] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
    }

    #[test]
    fn ln2_and_gamma() {
        let l = RealEnclosure::ln2(200);
        assert!(
            l.contains_f64(std::f64::consts::LN_2)
                || (l.mid_f64() - std::f64::consts::LN_2).abs() < 1e-16
        );
        assert!(l.width().to_f64() < 1e-55);
        let g = RealEnclosure::euler_gamma(128);
        assert!((g.mid_f64() - 0.577_215_664_901_532_9).abs() < 1e-16);
    }

    #[test]
    fn exp_ln_inverse() {
        for x in [0.5, 1.0, 2.0, 10.0, 1e6, 3.3e-7, 1e30] {
            let e = enc(x);
            let back = e.ln().unwrap().exp().unwrap();
            assert!(back.lower <= e.lower && e.upper <= back.upper, "x = {x}");
            assert!(((back.mid_f64() - x) / x).abs() < 1e-15);
        }
        let e = enc(1.0).exp().unwrap();
        assert!((e.mid_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(e.width().to_f64() < 1e-30);
        let m = enc(-20.0).exp().unwrap();
        assert!((m.mid_f64() / (-20f64).exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exp_gamma_digits() {
        let eg = RealEnclosure::euler_gamma(256).exp().unwrap();
        // e^gamma = 1.78107241799019798523650410310717954916964521430343...
        let lo: BigRational = "178107241799019798523650410310717954916964521430343/100000000000000000000000000000000000000000000000000"
            .parse()
            .unwrap();
        let hi = &lo + BigRational::new(1.into(), BigInt::from(10u8).pow(50));
        assert!(eg.lower.to_rational() > lo && eg.upper.to_rational() < hi);
    }

    #[test]
    fn ln_of_huge_integer() {
        // ln(2^100000 * 3) = 100000 ln 2 + ln 3
        let n = (BigInt::one() << 100_000u32) * 3;
        let e = RealEnclosure::from_int(n, 64).ln().unwrap();
        let want = 100_000.0 * std::f64::consts::LN_2 + 3f64.ln();
        assert!((e.mid_f64() - want).abs() / want < 1e-15);
    }

    #[test]
    fn certify_escalates_and_decides() {
        let (v, _, _) = certify(Relation::Gt, |p| {
            Ok((enc(2.0).with_precision(p), enc(1.0).with_precision(p)))
        })
        .unwrap();
        assert!(v);
        let (v, _, _) = certify(Relation::Ge, |p| {
            Ok((enc(1.0).with_precision(p), enc(1.0).with_precision(p)))
        })
        .unwrap();
        assert!(v);
        let (v, _, _) = certify(Relation::Gt, |p| {
            Ok((enc(1.0).with_precision(p), enc(1.0).with_precision(p)))
        })
        .unwrap();
        assert!(!v);
        // sqrt(2)^2 vs 2 never separates
        let r = certify(Relation::Gt, |p| {
            let two = RealEnclosure::from_int(2, p);
            let s = two.powr(&RealEnclosure::from_ratio(&1.into(), &2.into(), p))?;
            Ok((s.mul(&s), two))
        });
        assert_eq!(r.unwrap_err(), EnclosureError::Undecided(256));
    }

    #[test]
    fn serde_roundtrip() {
        let e = RealEnclosure::ln2(100);
        let s = serde_json::to_string(&e).unwrap();
        let back: RealEnclosure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
