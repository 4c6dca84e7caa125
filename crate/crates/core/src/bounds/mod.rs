//! Sufficient conditions for the existence of primitive completely normal
//! elements, evaluated with certified enclosures or exact rationals.

mod pipeline;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    c_constant, certify_from, decimal, divisors, factor_qn_minus_1, lemma_constant_sup,
    p_free_part, prime_power, radical_info, robin_upper_with, sigma_t, small_prime_divisors,
    ArithError, EnclosureError, FactorBudget, RealEnclosure, Relation, RobinConstant,
};
use crate::fqxpoly::{poly_stats, FqxError};

pub use pipeline::{
    lm_ranges, pipeline_theorem0, pipeline_theorem1, robin_crossover, table1, table2, LmPair,
    LmqTriple, NqPair, PipelineResult, RobinCrossover, Stage, StageItems, Table1Row, Table2,
    Theorem0Config, Theorem0Result, Theorem1Config, Theorem1Result, PUBLISHED_TABLE2,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Fqx(#[from] FqxError),
    #[error(transparent)]
    Enclosure(#[from] EnclosureError),
    #[error("factorization of q^n - 1 is incomplete for (q, n) = ({q}, {n})")]
    IncompleteFactorization { q: u64, n: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

type Result<T> = std::result::Result<T, BoundsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "IP_PCN1")]
    IpPcn1,
    #[serde(rename = "COND1")]
    Cond1,
    #[serde(rename = "COND2")]
    Cond2,
    #[serde(rename = "COND2_ROBIN")]
    Cond2Robin,
    #[serde(rename = "COND3_EXACT_W")]
    Cond3ExactW,
    #[serde(rename = "COND3_C16")]
    Cond3C16,
    #[serde(rename = "IP_PCN2")]
    IpPcn2,
    #[serde(rename = "COND_1")]
    CondMinus1,
    #[serde(rename = "COND_2_P_ODD")]
    Cond2POdd,
    #[serde(rename = "COND_3_P2")]
    Cond3P2,
    #[serde(rename = "COND_A12")]
    CondA12,
    #[serde(rename = "COND_2_P_ODD_ROBIN")]
    Cond2POddRobin,
    #[serde(rename = "COND_3_P2_ROBIN")]
    Cond3P2Robin,
    #[serde(rename = "COND_A12_ROBIN")]
    CondA12Robin,
}

impl ConditionId {
    pub const ALL: [ConditionId; 14] = [
        ConditionId::IpPcn1,
        ConditionId::Cond1,
        ConditionId::Cond2,
        ConditionId::Cond2Robin,
        ConditionId::Cond3ExactW,
        ConditionId::Cond3C16,
        ConditionId::IpPcn2,
        ConditionId::CondMinus1,
        ConditionId::Cond2POdd,
        ConditionId::Cond3P2,
        ConditionId::CondA12,
        ConditionId::Cond2POddRobin,
        ConditionId::Cond3P2Robin,
        ConditionId::CondA12Robin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::IpPcn1 => "IP_PCN1",
            ConditionId::Cond1 => "COND1",
            ConditionId::Cond2 => "COND2",
            ConditionId::Cond2Robin => "COND2_ROBIN",
            ConditionId::Cond3ExactW => "COND3_EXACT_W",
            ConditionId::Cond3C16 => "COND3_C16",
            ConditionId::IpPcn2 => "IP_PCN2",
            ConditionId::CondMinus1 => "COND_1",
            ConditionId::Cond2POdd => "COND_2_P_ODD",
            ConditionId::Cond3P2 => "COND_3_P2",
            ConditionId::CondA12 => "COND_A12",
            ConditionId::Cond2POddRobin => "COND_2_P_ODD_ROBIN",
            ConditionId::Cond3P2Robin => "COND_3_P2_ROBIN",
            ConditionId::CondA12Robin => "COND_A12_ROBIN",
        }
    }

    pub fn from_name(s: &str) -> Option<ConditionId> {
        let up = s.to_ascii_uppercase().replace('-', "_");
        ConditionId::ALL.into_iter().find(|c| c.name() == up)
    }

    /// Human-readable statement of the inequality.
    pub fn formula(self) -> &'static str {
        match self {
            ConditionId::IpPcn1 | ConditionId::IpPcn2 => {
                "CN_q(n) > q^(n/2) W(q') prod_{l|n, l<n} W_l(F'_l) theta_l(F'_l), CN_q(n) bounded below by q^n - sum_{d|n} (q^n - phi_d(X^(n/d)-1))"
            }
            ConditionId::Cond1 => "q^(n/2) (1 - n(q+1)/q^2) >= W(q') 2^(t(n)-1)",
            ConditionId::Cond2 => "q^(3n/8) (1 - n(q+1)/q^2) >= 4514.7 * 2^(t(n)-1)",
            ConditionId::Cond2Robin => {
                "q^(3n/8) (1 - n(q+1)/q^2) > 4514.7 * 2^(n (C ln ln n + 0.6483/ln ln n) - 1), C = e^gamma or e^0.578"
            }
            ConditionId::Cond3ExactW => {
                "q^(n/2) (1 - sum_{d|n} (1 - phi_d(X^(n/d)-1)/q^n)) > W(q') prod_{l|n, l<n} W_l theta_l, W(q') exact"
            }
            ConditionId::Cond3C16 => {
                "q^(n/2) (1 - sum_{d|n} (1 - phi_d(X^(n/d)-1)/q^n)) > c_{q',16} q^(n/16) prod_{l|n, l<n} W_l theta_l"
            }
            ConditionId::CondMinus1 => "CN_q(n) >= q^(n/2) W(q') 2^((l+1) t(m) - 1), n = p^l m",
            ConditionId::Cond2POdd => {
                "q^(3 p^l m/8) (1 - m (1/q + 1/q^2 + 1/q^p + 4/q^(2p))) >= 2257.35 * 2^((l+1) t(m))"
            }
            ConditionId::Cond3P2 => {
                "q^(3 2^l m/8) (1 - m (1/q + 1/q^2 + 2/(3q^3) + 3/q^4)) >= 2461.62 * 2^((l+1) t(m) - 1)"
            }
            ConditionId::CondA12 => {
                "q^(10m/12) (1 - m (1/q + 1/q^2 + 2/(3q^3) + 3/q^4)) >= (5.61e23/2) * 2^(2 t(m))"
            }
            ConditionId::Cond2POddRobin => "m (m+2)^(3^(l+1) m/8 - 4) >= 2257.35 * 2^((l+1) R(m)), R = Robin bound",
            ConditionId::Cond3P2Robin => {
                "m b^(3 2^l m/8 - 3) >= 6 * 2461.62 * 2^((l+1) R(m)), b = 8 for m <= 5 else m+2"
            }
            ConditionId::CondA12Robin => {
                "m b^(5m/6 - 3) >= 12 * 2.81e23 * 4^R(m), b = 8 for m <= 5 else m+2"
            }
        }
    }
}

/// How `W(q')` enters the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WMode {
    /// `2^ω(q^n - 1)` from a complete factorization.
    Exact,
    /// `sup_r c_{r,a} · q^{n/a}` (odd `r` in characteristic 2).
    LemmaSup { a: u32 },
    /// `c_{q',a} · q^{n/a}` with the primes `≤ 2^a` dividing `q^n - 1`.
    SmallPrimes { a: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Params {
    Pair { q: u64, n: u64 },
    Triple { l: u32, m: u64, q: u64 },
    Degree { l: u32, m: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub condition: ConditionId,
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_mode: Option<WMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robin_constant: Option<RobinConstant>,
    pub relation: Relation,
    pub lhs: RealEnclosure,
    pub rhs: RealEnclosure,
    pub holds: bool,
    /// Verdict obtained by exact rational arithmetic rather than separated enclosures.
    pub exact: bool,
}

/// Precision floor for enclosures and the factoring budget for exact `W(q')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub precision_bits: u32,
    pub budget: FactorBudget,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            precision_bits: 64,
            budget: FactorBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnVariant {
    General,
    Ip1,
    Ip2,
    Ip3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cond3Mode {
    C16,
    Exact,
}

/// The three families of conditions for `n = p^ℓ m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PFamily {
    Cond2POdd,
    Cond3P2,
    A12,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn big(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn q_pow(q: u64, k: u64) -> BigRational {
    big(BigInt::from(q).pow(k as u32))
}

fn characteristic(q: u64) -> Result<u64> {
    Ok(prime_power(q).ok_or(ArithError::NotPrimePower(q))?.0)
}

fn t_of(n: u64) -> u64 {
    sigma_t(n).to_u64().expect("divisor sum fits in u64")
}

fn two_pow(k: u64) -> BigRational {
    big(BigInt::one() << k)
}

/// Splits `n = p^ℓ m` with `p ∤ m`.
pub fn split_p_part(n: u64, p: u64) -> (u32, u64) {
    let m = p_free_part(n, p);
    let mut l = 0;
    let mut r = n / m;
    while r > 1 {
        r /= p;
        l += 1;
    }
    (l, m)
}

/// `q^n - Σ_{d|n} (q^n - φ_d(X^{n/d} - 1))`.
pub fn cn_general(q: u64, n: u64) -> Result<BigInt> {
    let p = characteristic(q)?;
    let qn = BigInt::from(q).pow(n as u32);
    let mut acc = qn.clone();
    for d in divisors(n) {
        let s = poly_stats(q, p, n, d)?;
        acc -= &qn - BigInt::from(s.phi);
    }
    Ok(acc)
}

/// The bracket `B` with `CN_q(n) ≥ q^n · B`.
pub fn cn_bracket(q: u64, n: u64, variant: CnVariant) -> Result<BigRational> {
    let p = characteristic(q)?;
    if n == 0 {
        return Err(BoundsError::Precondition("n must be positive".into()));
    }
    let qr = big(q);
    let one = BigRational::one();
    match variant {
        CnVariant::General => Ok(BigRational::new(
            cn_general(q, n)?,
            BigInt::from(q).pow(n as u32),
        )),
        CnVariant::Ip1 => Ok(&one - big(n) * (&qr + &one) / (&qr * &qr)),
        CnVariant::Ip2 | CnVariant::Ip3 => {
            let (l, m) = split_p_part(n, p);
            if l == 0 {
                return Err(BoundsError::Precondition(format!(
                    "{variant:?} needs p | n, got p={p}, n={n}"
                )));
            }
            Ok(&one - big(m) * family_sum(q, p, variant)?)
        }
    }
}

fn family_sum(q: u64, p: u64, variant: CnVariant) -> Result<BigRational> {
    let qr = big(q);
    let inv = |k: u64| BigRational::one() / q_pow(q, k);
    match variant {
        CnVariant::Ip2 if p > 2 => Ok(inv(1) + inv(2) + inv(p) + big(4) / q_pow(q, 2 * p)),
        CnVariant::Ip3 if p == 2 => {
            Ok(inv(1) + inv(2) + ratio(2, 3) / (&qr * &qr * &qr) + big(3) / q_pow(q, 4))
        }
        _ => Err(BoundsError::Precondition(format!(
            "{variant:?} does not apply in characteristic {p}"
        ))),
    }
}

/// `q^n · B` for the chosen lower bound on `CN_q(n)`.
pub fn cn_lower(q: u64, n: u64, variant: CnVariant) -> Result<BigRational> {
    Ok(cn_bracket(q, n, variant)? * q_pow(q, n))
}

/// `Π_{l | n, l < n} W_l(F'_l) θ_l(F'_l)`.
pub fn wtheta_product(q: u64, n: u64) -> Result<BigRational> {
    let p = characteristic(q)?;
    let mut acc = BigRational::one();
    for l in divisors(n).into_iter().filter(|&l| l < n) {
        let s = poly_stats(q, p, n, l)?;
        acc *= big(s.w_sf) * s.theta;
    }
    Ok(acc)
}

/// `Π_{l | n, l < n} W_l(F'_l)` and `Π θ_l(F'_l)` separately.
pub fn w_and_theta_products(q: u64, n: u64) -> Result<(BigUint, BigRational)> {
    let p = characteristic(q)?;
    let mut w = BigUint::one();
    let mut th = BigRational::one();
    for l in divisors(n).into_iter().filter(|&l| l < n) {
        let s = poly_stats(q, p, n, l)?;
        w *= s.w_sf;
        th *= s.theta;
    }
    Ok((w, th))
}

/// `W(q')` and `θ(q')` from a complete factorization of `q^n - 1`.
pub fn radical_data(q: u64, n: u64, budget: FactorBudget) -> Result<(BigUint, BigRational)> {
    let f = factor_qn_minus_1(q, n, budget)?;
    if !f.complete {
        return Err(BoundsError::IncompleteFactorization { q, n });
    }
    let r = radical_info(&f)?;
    Ok((r.num_divisors, r.theta))
}

fn enc(r: &BigRational, prec: u32) -> RealEnclosure {
    RealEnclosure::from_rational(r, prec)
}

/// `q^e` for a rational exponent: exact for nonnegative integer `e`, else `exp(e ln q)`.
pub fn pow_rational(
    q: u64,
    e: &BigRational,
    prec: u32,
) -> std::result::Result<RealEnclosure, EnclosureError> {
    if e.is_integer() && !e.is_negative() {
        let k = e.to_integer().to_u32().ok_or(EnclosureError::Overflow)?;
        return Ok(RealEnclosure::from_int(BigInt::from(q).pow(k), prec));
    }
    RealEnclosure::from_int(q, prec)
        .ln()?
        .mul(&enc(e, prec))
        .exp()
}

fn pow2_real(x: &RealEnclosure) -> std::result::Result<RealEnclosure, EnclosureError> {
    x.mul(&RealEnclosure::ln2(x.precision_bits)).exp()
}

/// `q^{a/b} · B  rel  R` decided exactly, for `R > 0`.
fn exact_power_compare(
    q: u64,
    a: u64,
    b: u64,
    bracket: &BigRational,
    rhs: &BigRational,
    rel: Relation,
) -> bool {
    debug_assert!(rhs.is_positive());
    if !bracket.is_positive() {
        return false;
    }
    let lhs = big(BigInt::from(q).pow(a as u32)) * num_traits::pow(bracket.clone(), b as usize);
    let rhs = num_traits::pow(rhs.clone(), b as usize);
    match rel {
        Relation::Gt => lhs > rhs,
        Relation::Ge => lhs >= rhs,
        Relation::Lt => lhs < rhs,
        Relation::Le => lhs <= rhs,
    }
}

fn display_sides(
    q: u64,
    a: u64,
    b: u64,
    bracket: &BigRational,
    rhs: &BigRational,
    prec: u32,
) -> Result<(RealEnclosure, RealEnclosure)> {
    let prec = prec.max(128);
    let lhs = pow_rational(q, &ratio(a as i64, b as i64), prec)?.mul(&enc(bracket, prec));
    Ok((lhs, enc(rhs, prec)))
}

fn check_n(n: u64, min: u64) -> Result<()> {
    if n < min {
        return Err(BoundsError::Precondition(format!(
            "n must be at least {min}, got {n}"
        )));
    }
    Ok(())
}

/// `q^{n/2}(1 - n(q+1)/q^2) ≥ W(q') 2^{t(n)-1}` with exact `W(q')`.
pub fn cond1(q: u64, n: u64, opts: EvalOptions) -> Result<BoundReport> {
    characteristic(q)?;
    check_n(n, 1)?;
    let (w, _) = radical_data(q, n, opts.budget)?;
    let bracket = cn_bracket(q, n, CnVariant::Ip1)?;
    let rhs = big(w) * two_pow(t_of(n) - 1);
    let holds = exact_power_compare(q, n, 2, &bracket, &rhs, Relation::Ge);
    let (l, r) = display_sides(q, n, 2, &bracket, &rhs, opts.precision_bits)?;
    Ok(BoundReport {
        condition: ConditionId::Cond1,
        params: Params::Pair { q, n },
        w_mode: Some(WMode::Exact),
        robin_constant: None,
        relation: Relation::Ge,
        lhs: l,
        rhs: r,
        holds,
        exact: true,
    })
}

/// `q^{3n/8}(1 - n(q+1)/q^2) ≥ 4514.7·2^{t(n)-1}`, or the Robin-substituted
/// form with the given constant.
pub fn cond2(
    n: u64,
    q: u64,
    robin: Option<RobinConstant>,
    opts: EvalOptions,
) -> Result<BoundReport> {
    check_n(n, if robin.is_some() { 3 } else { 2 })?;
    characteristic(q)?;
    cond2_real(n, &big(q), robin, opts).map(|mut r| {
        r.params = Params::Pair { q, n };
        r
    })
}

/// [`cond2`] at a real (rational) value of `q`; used at `q = n + 2` for the
/// crossover scan, where `q` need not be a prime power.
pub fn cond2_real(
    n: u64,
    q: &BigRational,
    robin: Option<RobinConstant>,
    opts: EvalOptions,
) -> Result<BoundReport> {
    check_n(n, if robin.is_some() { 3 } else { 2 })?;
    let one = BigRational::one();
    let bracket = &one - big(n) * (q + &one) / (q * q);
    let c = decimal("4514.7");
    let t = t_of(n);
    let rel = if robin.is_some() {
        Relation::Gt
    } else {
        Relation::Ge
    };
    let q_int = q.to_integer().to_u64().unwrap_or(0);
    let (holds, lhs, rhs) = certify_from(opts.precision_bits, rel, |prec| {
        let qe = enc(q, prec);
        let lhs = qe
            .ln()?
            .mul(&enc(&ratio(3 * n as i64, 8), prec))
            .exp()?
            .mul(&enc(&bracket, prec));
        let rhs = match robin {
            None => enc(&(&c * two_pow(t - 1)), prec),
            Some(k) => {
                let r = robin_upper_with(n, k, prec).map_err(arith_to_enc)?;
                let e = r.sub(&RealEnclosure::from_int(1, prec));
                enc(&c, prec).mul(&pow2_real(&e)?)
            }
        };
        Ok((lhs, rhs))
    })?;
    Ok(BoundReport {
        condition: if robin.is_some() {
            ConditionId::Cond2Robin
        } else {
            ConditionId::Cond2
        },
        params: Params::Pair { q: q_int, n },
        w_mode: None,
        robin_constant: robin,
        relation: rel,
        lhs,
        rhs,
        holds,
        exact: false,
    })
}

fn arith_to_enc(e: ArithError) -> EnclosureError {
    match e {
        ArithError::Enclosure(x) => x,
        _ => EnclosureError::Overflow,
    }
}

/// `q^{n/2}·B_general  >  W-estimate · Π W_l θ_l`.
pub fn main_inequality(q: u64, n: u64, w_mode: WMode, opts: EvalOptions) -> Result<BoundReport> {
    let bracket = cn_bracket(q, n, CnVariant::General)?;
    general_inequality(q, n, &bracket, w_mode, ConditionId::IpPcn1, opts)
}

/// [`main_inequality`] with a known value of `CN_q(n)` on the left.
pub fn main_inequality_with_cn(
    q: u64,
    n: u64,
    cn: &BigInt,
    w_mode: WMode,
    opts: EvalOptions,
) -> Result<BoundReport> {
    let bracket = BigRational::new(cn.clone(), BigInt::from(q).pow(n as u32));
    general_inequality(q, n, &bracket, w_mode, ConditionId::IpPcn1, opts)
}

/// The same inequality for `n = p^ℓ m`, reported with triple parameters.
pub fn ip_pcn2(l: u32, m: u64, q: u64, opts: EvalOptions) -> Result<BoundReport> {
    let p = characteristic(q)?;
    let n = triple_n(l, m, p)?;
    let bracket = cn_bracket(q, n, CnVariant::General)?;
    let mut r = general_inequality(q, n, &bracket, WMode::Exact, ConditionId::IpPcn2, opts)?;
    r.params = Params::Triple { l, m, q };
    Ok(r)
}

pub fn cond3(q: u64, n: u64, mode: Cond3Mode, opts: EvalOptions) -> Result<BoundReport> {
    let bracket = cn_bracket(q, n, CnVariant::General)?;
    match mode {
        Cond3Mode::Exact => {
            general_inequality(q, n, &bracket, WMode::Exact, ConditionId::Cond3ExactW, opts)
        }
        Cond3Mode::C16 => general_inequality(
            q,
            n,
            &bracket,
            WMode::SmallPrimes { a: 16 },
            ConditionId::Cond3C16,
            opts,
        ),
    }
}

fn general_inequality(
    q: u64,
    n: u64,
    bracket: &BigRational,
    w_mode: WMode,
    id: ConditionId,
    opts: EvalOptions,
) -> Result<BoundReport> {
    let p = characteristic(q)?;
    check_n(n, 1)?;
    let prod = wtheta_product(q, n)?;
    let report = |holds, lhs, rhs, exact| BoundReport {
        condition: id,
        params: Params::Pair { q, n },
        w_mode: Some(w_mode),
        robin_constant: None,
        relation: Relation::Gt,
        lhs,
        rhs,
        holds,
        exact,
    };
    match w_mode {
        WMode::Exact => {
            let (w, _) = radical_data(q, n, opts.budget)?;
            let rhs = big(w) * &prod;
            let holds = exact_power_compare(q, n, 2, bracket, &rhs, Relation::Gt);
            let (l, r) = display_sides(q, n, 2, bracket, &rhs, opts.precision_bits)?;
            Ok(report(holds, l, r, true))
        }
        WMode::LemmaSup { a } | WMode::SmallPrimes { a } => {
            if !(1..=24).contains(&a) {
                return Err(BoundsError::Precondition(format!(
                    "unsupported exponent a = {a}"
                )));
            }
            let primes = match w_mode {
                WMode::SmallPrimes { .. } => Some(small_prime_divisors(q, n, 1u64 << a)),
                _ => None,
            };
            if !bracket.is_positive() {
                let prec = opts.precision_bits;
                let l = pow_rational(q, &ratio(n as i64, 2), prec)?.mul(&enc(bracket, prec));
                let r = enc(&prod, prec);
                return Ok(report(false, l, r, true));
            }
            let (holds, l, r) = certify_from(opts.precision_bits, Relation::Gt, |prec| {
                let c = match &primes {
                    Some(ps) => c_constant(ps, a, prec).map_err(arith_to_enc)?,
                    None => lemma_constant_sup(a, p == 2, prec).map_err(arith_to_enc)?,
                };
                let lhs = pow_rational(q, &ratio(n as i64, 2), prec)?.mul(&enc(bracket, prec));
                let rhs = c
                    .mul(&pow_rational(q, &ratio(n as i64, a as i64), prec)?)
                    .mul(&enc(&prod, prec));
                Ok((lhs, rhs))
            })?;
            Ok(report(holds, l, r, false))
        }
    }
}

fn triple_n(l: u32, m: u64, p: u64) -> Result<u64> {
    if m == 0 || m % p == 0 {
        return Err(BoundsError::Precondition(format!(
            "m = {m} must be positive and prime to p = {p}"
        )));
    }
    p.checked_pow(l)
        .and_then(|pl| pl.checked_mul(m))
        .ok_or_else(|| BoundsError::Precondition("n = p^l m overflows".into()))
}

/// `CN_q(n) ≥ q^{n/2} W(q') 2^{(ℓ+1)t(m)-1}` with the general lower bound for `CN`.
pub fn cond_minus1(l: u32, m: u64, q: u64, opts: EvalOptions) -> Result<BoundReport> {
    let p = characteristic(q)?;
    let n = triple_n(l, m, p)?;
    let (w, _) = radical_data(q, n, opts.budget)?;
    let bracket = cn_bracket(q, n, CnVariant::General)?;
    let rhs = big(w) * two_pow((l as u64 + 1) * t_of(m) - 1);
    let holds = exact_power_compare(q, n, 2, &bracket, &rhs, Relation::Ge);
    let (lv, rv) = display_sides(q, n, 2, &bracket, &rhs, opts.precision_bits)?;
    Ok(BoundReport {
        condition: ConditionId::CondMinus1,
        params: Params::Triple { l, m, q },
        w_mode: Some(WMode::Exact),
        robin_constant: None,
        relation: Relation::Ge,
        lhs: lv,
        rhs: rv,
        holds,
        exact: true,
    })
}

/// Exponent `(a, b)` of `q^{a/b}`, bracket and right-hand side of a family condition.
fn family_parts(
    l: u32,
    m: u64,
    q: u64,
    which: PFamily,
) -> Result<(u64, u64, BigRational, BigRational, ConditionId)> {
    let p = characteristic(q)?;
    let n = triple_n(l, m, p)?;
    let t = t_of(m);
    let one = BigRational::one();
    let lp1 = l as u64 + 1;
    match which {
        PFamily::Cond2POdd => {
            if p == 2 || l == 0 {
                return Err(BoundsError::Precondition(
                    "COND_2_P_ODD needs p > 2 and l >= 1".into(),
                ));
            }
            let b = &one - big(m) * family_sum(q, p, CnVariant::Ip2)?;
            Ok((
                3 * n,
                8,
                b,
                decimal("2257.35") * two_pow(lp1 * t),
                ConditionId::Cond2POdd,
            ))
        }
        PFamily::Cond3P2 => {
            if p != 2 || l == 0 {
                return Err(BoundsError::Precondition(
                    "COND_3_P2 needs p = 2 and l >= 1".into(),
                ));
            }
            let b = &one - big(m) * family_sum(q, p, CnVariant::Ip3)?;
            Ok((
                3 * n,
                8,
                b,
                decimal("2461.62") * two_pow(lp1 * t - 1),
                ConditionId::Cond3P2,
            ))
        }
        PFamily::A12 => {
            if p != 2 || l != 1 {
                return Err(BoundsError::Precondition(
                    "COND_A12 needs p = 2 and l = 1".into(),
                ));
            }
            let b = &one - big(m) * family_sum(q, p, CnVariant::Ip3)?;
            let c = decimal("5.61") * big(BigInt::from(10u8).pow(23)) / big(2);
            Ok((10 * m, 12, b, c * two_pow(2 * t), ConditionId::CondA12))
        }
    }
}

/// One of the three `n = p^ℓ m` conditions at a concrete `q`.
pub fn cond_p_family(
    l: u32,
    m: u64,
    q: u64,
    which: PFamily,
    opts: EvalOptions,
) -> Result<BoundReport> {
    let (a, b, bracket, rhs, id) = family_parts(l, m, q, which)?;
    let (holds, lv, rv) = certify_from(opts.precision_bits, Relation::Ge, |prec| {
        let lhs = pow_rational(q, &ratio(a as i64, b as i64), prec)?.mul(&enc(&bracket, prec));
        Ok((lhs, enc(&rhs, prec)))
    })?;
    Ok(BoundReport {
        condition: id,
        params: Params::Triple { l, m, q },
        w_mode: None,
        robin_constant: None,
        relation: Relation::Ge,
        lhs: lv,
        rhs: rv,
        holds,
        exact: false,
    })
}

/// Exact-arithmetic verdict of [`cond_p_family`], used as an oracle.
pub fn cond_p_family_exact(l: u32, m: u64, q: u64, which: PFamily) -> Result<bool> {
    let (a, b, bracket, rhs, _) = family_parts(l, m, q, which)?;
    Ok(exact_power_compare(q, a, b, &bracket, &rhs, Relation::Ge))
}

/// Exact-arithmetic verdict of [`cond2`] with exact `t(n)`, used as an oracle.
pub fn cond2_exact(n: u64, q: u64) -> Result<bool> {
    let bracket = cn_bracket(q, n, CnVariant::Ip1)?;
    let rhs = decimal("4514.7") * two_pow(t_of(n) - 1);
    Ok(exact_power_compare(
        q,
        3 * n,
        8,
        &bracket,
        &rhs,
        Relation::Ge,
    ))
}

/// The Robin-substituted `(ℓ, m)` conditions, with no dependence on `q`.
pub fn robin_form(l: u32, m: u64, which: PFamily, opts: EvalOptions) -> Result<BoundReport> {
    if m < 3 {
        return Err(BoundsError::Precondition(format!(
            "Robin bound needs m >= 3, got {m}"
        )));
    }
    let lp1 = l as i64 + 1;
    let mi = m as i64;
    // base, exponent of base, constant, multiplier of R(m) in the power of 2, id
    let (base, expo, c, k, id) = match which {
        PFamily::Cond2POdd => {
            if l == 0 {
                return Err(BoundsError::Precondition("l must be >= 1".into()));
            }
            let e = ratio(3i64.pow(l + 1) * mi, 8) - big(4);
            (
                m + 2,
                e,
                decimal("2257.35"),
                lp1,
                ConditionId::Cond2POddRobin,
            )
        }
        PFamily::Cond3P2 => {
            if l == 0 || m % 2 == 0 {
                return Err(BoundsError::Precondition("needs l >= 1 and odd m".into()));
            }
            let base = if m <= 5 { 8 } else { m + 2 };
            let e = ratio(3 * (1i64 << l) * mi, 8) - big(3);
            (
                base,
                e,
                big(6) * decimal("2461.62"),
                lp1,
                ConditionId::Cond3P2Robin,
            )
        }
        PFamily::A12 => {
            if l != 1 || m % 2 == 0 {
                return Err(BoundsError::Precondition("needs l = 1 and odd m".into()));
            }
            let base = if m <= 5 { 8 } else { m + 2 };
            let e = ratio(5 * mi, 6) - big(3);
            let c = big(12) * decimal("2.81") * big(BigInt::from(10u8).pow(23));
            (base, e, c, 2, ConditionId::CondA12Robin)
        }
    };
    let (holds, lv, rv) = certify_from(opts.precision_bits, Relation::Ge, |prec| {
        let lhs = RealEnclosure::from_int(m, prec).mul(&pow_rational(base, &expo, prec)?);
        let r = robin_upper_with(m, RobinConstant::ExpGamma, prec).map_err(arith_to_enc)?;
        let rhs = enc(&c, prec).mul(&pow2_real(&r.mul(&RealEnclosure::from_int(k, prec)))?);
        Ok((lhs, rhs))
    })?;
    Ok(BoundReport {
        condition: id,
        params: Params::Degree { l, m },
        w_mode: None,
        robin_constant: Some(RobinConstant::ExpGamma),
        relation: Relation::Ge,
        lhs: lv,
        rhs: rv,
        holds,
        exact: false,
    })
}

impl ConditionId {
    /// Shape of the parameters the condition is evaluated at.
    pub fn params_kind(self) -> &'static str {
        use ConditionId::*;
        match self {
            IpPcn1 | Cond1 | Cond2 | Cond2Robin | Cond3ExactW | Cond3C16 => "pair",
            IpPcn2 | CondMinus1 | Cond2POdd | Cond3P2 | CondA12 => "triple",
            Cond2POddRobin | Cond3P2Robin | CondA12Robin => "degree",
        }
    }
}

/// Evaluates any named condition; `robin` is used by `COND2_ROBIN` only.
pub fn evaluate(
    cond: ConditionId,
    params: Params,
    robin: RobinConstant,
    opts: EvalOptions,
) -> Result<BoundReport> {
    use ConditionId::*;
    match (cond, params) {
        (IpPcn1, Params::Pair { q, n }) => main_inequality(q, n, WMode::Exact, opts),
        (Cond1, Params::Pair { q, n }) => cond1(q, n, opts),
        (Cond2, Params::Pair { q, n }) => cond2(n, q, None, opts),
        (Cond2Robin, Params::Pair { q, n }) => cond2(n, q, Some(robin), opts),
        (Cond3ExactW, Params::Pair { q, n }) => cond3(q, n, Cond3Mode::Exact, opts),
        (Cond3C16, Params::Pair { q, n }) => cond3(q, n, Cond3Mode::C16, opts),
        (IpPcn2, Params::Triple { l, m, q }) => ip_pcn2(l, m, q, opts),
        (CondMinus1, Params::Triple { l, m, q }) => cond_minus1(l, m, q, opts),
        (Cond2POdd, Params::Triple { l, m, q }) => cond_p_family(l, m, q, PFamily::Cond2POdd, opts),
        (Cond3P2, Params::Triple { l, m, q }) => cond_p_family(l, m, q, PFamily::Cond3P2, opts),
        (CondA12, Params::Triple { l, m, q }) => cond_p_family(l, m, q, PFamily::A12, opts),
        (Cond2POddRobin, Params::Degree { l, m }) => robin_form(l, m, PFamily::Cond2POdd, opts),
        (Cond3P2Robin, Params::Degree { l, m }) => robin_form(l, m, PFamily::Cond3P2, opts),
        (CondA12Robin, Params::Degree { l, m }) => robin_form(l, m, PFamily::A12, opts),
        (c, p) => Err(BoundsError::Precondition(format!(
            "{} takes {} parameters, got {p:?}",
            c.name(),
            c.params_kind()
        ))),
    }
}

/// Two-sided estimate `|PCN − θ(q') CN| ≤ q^{n/2} W(q') θ(q') Π_l W_l θ_l`,
/// checked exactly for given counts.
pub fn two_sided_estimate_holds(
    q: u64,
    n: u64,
    cn: &BigUint,
    pcn: &BigUint,
    budget: FactorBudget,
) -> Result<bool> {
    let (w, theta) = radical_data(q, n, budget)?;
    let (wl, thl) = w_and_theta_products(q, n)?;
    let diff = (big(BigInt::from(pcn.clone())) - &theta * big(BigInt::from(cn.clone()))).abs();
    let bound = big(w) * theta * big(wl) * thl;
    // diff ≤ q^{n/2}·bound  ⇔  diff² ≤ q^n·bound²
    Ok(&diff * &diff <= q_pow(q, n) * &bound * &bound)
}
