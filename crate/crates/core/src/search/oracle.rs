//! Closed-form and bound checks against exact counts.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{CountReport, SearchError};
use crate::arith::{euler_phi, prime_power, FactorBudget};
use crate::bounds::{cn_lower, two_sided_estimate_holds, CnVariant};
use crate::classify::is_completely_basic;
use crate::fqxpoly::poly_stats;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub variant: CnVariant,
    #[serde(with = "crate::serde_dec::rational")]
    pub bound: BigRational,
    pub holds: bool,
}

/// Every identity and inequality an exact count can be held against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountChecks {
    pub q: u64,
    pub n: u64,
    /// `#primitive = φ(q^n - 1)`.
    pub primitive_count: bool,
    /// `#normal over F_{q^l} = φ_l(X^{n/l} - 1)` for every proper `l`.
    pub normal_counts: bool,
    /// Bounds on CN that apply and are positive.
    pub bounds: Vec<BoundCheck>,
    /// `|PCN − θ(q') CN| ≤ q^{n/2} W(q') θ(q') Π W_l θ_l`.
    pub two_sided: bool,
    pub pcn_positive: bool,
    /// The classifier verdict equals "every normal element is completely normal".
    pub classifier_agrees: bool,
}

impl CountChecks {
    pub fn pass(&self) -> bool {
        self.primitive_count
            && self.normal_counts
            && self.bounds.iter().all(|b| b.holds)
            && self.two_sided
            && self.pcn_positive
            && self.classifier_agrees
    }
}

pub fn check_counts(r: &CountReport, budget: FactorBudget) -> Result<CountChecks, SearchError> {
    let (q, n) = (r.q, r.n);
    let (p, _) = prime_power(q).ok_or(SearchError::NotPrimePower(q))?;
    let mut normal_counts = true;
    for c in &r.normal {
        let phi = poly_stats(q, p, n, c.l)
            .map_err(|e| SearchError::Check(e.to_string()))?
            .phi;
        normal_counts &= BigUint::from(c.count) == phi;
    }
    let cn = BigInt::from(r.cn);
    let mut bounds = Vec::new();
    for variant in [
        CnVariant::General,
        CnVariant::Ip1,
        CnVariant::Ip2,
        CnVariant::Ip3,
    ] {
        let Ok(bound) = cn_lower(q, n, variant) else {
            continue;
        };
        if bound.is_positive() {
            let holds = BigRational::from_integer(cn.clone()) >= bound;
            bounds.push(BoundCheck {
                variant,
                bound,
                holds,
            });
        }
    }
    let two_sided = two_sided_estimate_holds(q, n, &r.cn.into(), &r.pcn.into(), budget)
        .map_err(|e| SearchError::Check(e.to_string()))?;
    // every element normal over F_q is completely normal iff the two counts agree
    let all_normal_complete = match r.normal.first() {
        Some(c) => c.count == r.cn,
        None => true,
    };
    let basic = is_completely_basic(q, n)?;
    Ok(CountChecks {
        q,
        n,
        primitive_count: r.primitive == euler_phi(r.size - 1),
        normal_counts,
        bounds,
        two_sided,
        pcn_positive: r.pcn > 0,
        classifier_agrees: basic == all_normal_complete,
    })
}
