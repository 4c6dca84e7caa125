//! Completely basic extensions: the divisibility criterion on multiplicative
//! orders and the cheap sufficient cases checked before it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{mult_order, p_free_part, prime_divisors, prime_power, ArithError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasicReason {
    #[serde(rename = "m_divides_q_minus_1")]
    MDividesQMinus1,
    #[serde(rename = "m_equals_1")]
    MEquals1,
    NPrimeOrPrimeSquare,
    TheoremCriterion,
}

impl BasicReason {
    pub fn as_str(self) -> &'static str {
        match self {
            BasicReason::MDividesQMinus1 => "m_divides_q_minus_1",
            BasicReason::MEquals1 => "m_equals_1",
            BasicReason::NPrimeOrPrimeSquare => "n_prime_or_prime_square",
            BasicReason::TheoremCriterion => "theorem_criterion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum BasicVerdict {
    CompletelyBasic(BasicReason),
    NotCompletelyBasic,
}

impl BasicVerdict {
    pub fn is_basic(self) -> bool {
        matches!(self, BasicVerdict::CompletelyBasic(_))
    }
}

impl fmt::Display for BasicVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicVerdict::CompletelyBasic(r) => write!(f, "CompletelyBasic({})", r.as_str()),
            BasicVerdict::NotCompletelyBasic => write!(f, "NotCompletelyBasic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairClass {
    pub q: u64,
    pub n: u64,
    /// p-free part of `n`.
    pub m: u64,
    #[serde(flatten)]
    pub verdict: BasicVerdict,
}

fn characteristic(q: u64) -> Result<u64, ArithError> {
    prime_power(q)
        .map(|(p, _)| p)
        .ok_or(ArithError::NotPrimePower(q))
}

fn check_n(n: u64) -> Result<(), ArithError> {
    if n == 0 {
        return Err(ArithError::InvalidInput("n must be positive".into()));
    }
    Ok(())
}

/// For every prime `r | n`, `r` does not divide `ord_{(n/r)'}(q)`, where `'`
/// is the p-free part.
pub fn theorem_criterion(q: u64, n: u64) -> Result<bool, ArithError> {
    let p = characteristic(q)?;
    check_n(n)?;
    for r in prime_divisors(n) {
        let k = mult_order(q, p_free_part(n / r, p))?;
        if k % r == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_completely_basic(q: u64, n: u64) -> Result<bool, ArithError> {
    theorem_criterion(q, n)
}

pub fn classify_pair(q: u64, n: u64) -> Result<PairClass, ArithError> {
    let p = characteristic(q)?;
    check_n(n)?;
    let m = p_free_part(n, p);
    // m = 1 divides q - 1 trivially; report it under its own reason
    let verdict = if m == 1 {
        BasicVerdict::CompletelyBasic(BasicReason::MEquals1)
    } else if (q - 1) % m == 0 {
        BasicVerdict::CompletelyBasic(BasicReason::MDividesQMinus1)
    } else if is_prime_or_prime_square(n) {
        BasicVerdict::CompletelyBasic(BasicReason::NPrimeOrPrimeSquare)
    } else if theorem_criterion(q, n)? {
        BasicVerdict::CompletelyBasic(BasicReason::TheoremCriterion)
    } else {
        BasicVerdict::NotCompletelyBasic
    };
    Ok(PairClass { q, n, m, verdict })
}

pub fn is_prime_or_prime_square(n: u64) -> bool {
    match prime_power(n) {
        Some((_, k)) => k <= 2,
        None => false,
    }
}
