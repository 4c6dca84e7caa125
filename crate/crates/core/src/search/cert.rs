//! PCN search and self-verifying certificates.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{field_for, SearchError, TRIAL_BUDGET};
use crate::arith::{primality, FactorBudget, Primality};
use crate::ffield::{make_field, FFElem, FieldCtx, FieldError};
use crate::fqxpoly::{is_completely_normal, normality_test, proper_divisors};

pub const CERTIFICATE_SCHEMA: &str = "pcn-certificate/1";

/// Trials each random stream runs between synchronization points.
const ROUND: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Elements in increasing coordinate index, starting from 1.
    Exhaustive,
    /// Uniform nonzero elements from seeded ChaCha8 streams.
    Random,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Random => "random",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub seed: u64,
    /// Number of independent random streams.
    pub streams: u32,
    /// Total elements tested before giving up.
    pub max_trials: u64,
    pub budget: FactorBudget,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Random,
            seed: 0,
            streams: 1,
            max_trials: TRIAL_BUDGET,
            budget: FactorBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertFactor {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    #[serde(with = "crate::serde_dec::u64_str")]
    pub exponent: u64,
}

/// Outcome of `x^{(q^n-1)/r} != 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivityCheck {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    pub nontrivial: bool,
}

/// Outcome of the gcd test for normality over F_{q^l}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityCheck {
    #[serde(with = "crate::serde_dec::u64_str")]
    pub l: u64,
    pub coprime: bool,
}

/// How the element was found, enough to replay a random search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub strategy: Strategy,
    #[serde(with = "crate::serde_dec::u64_option")]
    pub seed: Option<u64>,
    #[serde(with = "crate::serde_dec::u64_option")]
    pub stream: Option<u64>,
    /// 1-based position of the element in its stream (or in index order).
    #[serde(with = "crate::serde_dec::u64_str")]
    pub trial: u64,
}

/// Witness that `element` is primitive and completely normal in F_p[x]/(modulus) over F_{p^e}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcnCertificate {
    pub schema: String,
    #[serde(with = "crate::serde_dec::u64_str")]
    pub p: u64,
    #[serde(with = "crate::serde_dec::u64_str")]
    pub e: u64,
    #[serde(with = "crate::serde_dec::u64_str")]
    pub n: u64,
    #[serde(with = "crate::serde_dec::u64_vec")]
    pub modulus: Vec<u64>,
    #[serde(with = "crate::serde_dec::u64_vec")]
    pub element: Vec<u64>,
    /// Prime factorization of `q^n - 1`, primes ascending.
    pub order_factors: Vec<CertFactor>,
    pub primitivity_checks: Vec<PrimitivityCheck>,
    pub normality_divisors: Vec<NormalityCheck>,
    pub search: SearchRecord,
}

impl PcnCertificate {
    pub fn q(&self) -> Option<u64> {
        self.p.checked_pow(u32::try_from(self.e).ok()?)
    }

    /// Compact JSON with the fixed field order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionCode {
    SchemaMismatch,
    BadParameters,
    BadModulus,
    ReducibleModulus,
    BadElement,
    ZeroElement,
    FactorNotPrime,
    FactorsNotCanonical,
    FactorProductMismatch,
    PrimitivityCoverIncomplete,
    NotPrimitive,
    NormalityCoverIncomplete,
    NotNormal,
    RecordMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub code: RejectionCode,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub rejections: Vec<Rejection>,
}

impl Verification {
    pub fn has(&self, code: RejectionCode) -> bool {
        self.rejections.iter().any(|r| r.code == code)
    }
}

fn is_pcn(ctx: &FieldCtx, x: &FFElem) -> Result<bool, SearchError> {
    // power checks reject most elements before any gcd is taken
    Ok(ctx.is_primitive(x)? && is_completely_normal(ctx, x))
}

/// Finds a primitive completely normal element of `F_{q^n}` and certifies it.
pub fn find_pcn(q: u64, n: u64, config: &SearchConfig) -> Result<PcnCertificate, SearchError> {
    let ctx = field_for(q, n, config.budget)?;
    let (x, record) = match config.strategy {
        Strategy::Exhaustive => exhaustive(&ctx, config.max_trials)?,
        Strategy::Random => random(&ctx, config)?,
    };
    Ok(certify(&ctx, &x, record))
}

fn exhaustive(ctx: &FieldCtx, max_trials: u64) -> Result<(FFElem, SearchRecord), SearchError> {
    let mut x = ctx.one();
    let mut trial = 0;
    while trial < max_trials {
        trial += 1;
        if is_pcn(ctx, &x)? {
            let record = SearchRecord {
                strategy: Strategy::Exhaustive,
                seed: None,
                stream: None,
                trial,
            };
            return Ok((x, record));
        }
        match ctx.next_elem(&x) {
            Some(y) => x = y,
            None => break,
        }
    }
    Err(SearchError::BudgetExhausted { trials: trial })
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_nonzero(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> FFElem {
    loop {
        let coords: Vec<u64> = (0..ctx.degree())
            .map(|_| rng.gen_range(0..ctx.p()))
            .collect();
        if coords.iter().any(|&c| c != 0) {
            return ctx.elem(coords).expect("coordinates are in range");
        }
    }
}

/// The `trial`-th nonzero element drawn by stream `stream` of `seed`.
pub fn replay_random(ctx: &FieldCtx, seed: u64, stream: u64, trial: u64) -> FFElem {
    let mut rng = stream_rng(seed, stream);
    let mut x = ctx.zero();
    for _ in 0..trial {
        x = draw_nonzero(ctx, &mut rng);
    }
    x
}

fn random(ctx: &FieldCtx, config: &SearchConfig) -> Result<(FFElem, SearchRecord), SearchError> {
    let streams = config.streams.max(1) as u64;
    let mut rngs: Vec<ChaCha8Rng> = (0..streams).map(|s| stream_rng(config.seed, s)).collect();
    let mut done = 0u64;
    let mut round = 0u64;
    while done < config.max_trials {
        let per_stream = ROUND.min((config.max_trials - done).div_ceil(streams));
        let hits: Vec<Option<(u64, u64, FFElem)>> = rngs
            .par_iter_mut()
            .enumerate()
            .map(|(s, rng)| -> Result<_, SearchError> {
                for i in 0..per_stream {
                    let x = draw_nonzero(ctx, rng);
                    if is_pcn(ctx, &x)? {
                        return Ok(Some((round * ROUND + i + 1, s as u64, x)));
                    }
                }
                Ok(None)
            })
            .collect::<Result<_, _>>()?;
        done += per_stream * streams;
        round += 1;
        // earliest trial wins, ties to the lowest stream, whatever the scheduling
        if let Some((trial, stream, x)) = hits.into_iter().flatten().min_by_key(|h| (h.0, h.1)) {
            let record = SearchRecord {
                strategy: Strategy::Random,
                seed: Some(config.seed),
                stream: Some(stream),
                trial,
            };
            return Ok((x, record));
        }
    }
    Err(SearchError::BudgetExhausted { trials: done })
}

fn certify(ctx: &FieldCtx, x: &FFElem, search: SearchRecord) -> PcnCertificate {
    let f = ctx
        .group_order_factors()
        .expect("field_for factors the order");
    let witness = ctx.primitivity_witness(x).expect("factorization present");
    PcnCertificate {
        schema: CERTIFICATE_SCHEMA.to_string(),
        p: ctx.p(),
        e: ctx.e() as u64,
        n: ctx.n() as u64,
        modulus: ctx.modulus().to_vec(),
        element: x.coords.clone(),
        order_factors: f
            .factors
            .iter()
            .map(|pf| CertFactor {
                prime: pf.prime.clone(),
                exponent: pf.exponent as u64,
            })
            .collect(),
        primitivity_checks: witness
            .into_iter()
            .map(|(prime, nontrivial)| PrimitivityCheck { prime, nontrivial })
            .collect(),
        normality_divisors: proper_divisors(ctx.n() as u64)
            .into_iter()
            .map(|l| NormalityCheck {
                l,
                coprime: normality_test(ctx, x, l).expect("l divides n"),
            })
            .collect(),
        search,
    }
}

/// Re-derives every claim of a certificate from its own fields.
pub fn verify_certificate(cert: &PcnCertificate) -> Verification {
    let mut out = Vec::new();
    let mut reject = |code, detail: String| out.push(Rejection { code, detail });
    if cert.schema != CERTIFICATE_SCHEMA {
        reject(
            RejectionCode::SchemaMismatch,
            format!("schema {:?}", cert.schema),
        );
    }
    if let Err((code, detail)) = verify_math(cert, &mut reject) {
        reject(code, detail);
    }
    Verification {
        valid: out.is_empty(),
        rejections: out,
    }
}

fn verify_math(
    cert: &PcnCertificate,
    reject: &mut impl FnMut(RejectionCode, String),
) -> Result<(), (RejectionCode, String)> {
    use RejectionCode::*;
    let params = || {
        (
            BadParameters,
            format!("p = {}, e = {}, n = {}", cert.p, cert.e, cert.n),
        )
    };
    let e = u32::try_from(cert.e).map_err(|_| params())?;
    let n = u32::try_from(cert.n).map_err(|_| params())?;
    let degree = (e as u64)
        .checked_mul(n as u64)
        .filter(|&d| d > 0 && d <= 1 << 16)
        .ok_or_else(params)?;
    let q = cert.q().ok_or_else(params)?;
    if cert.modulus.len() as u64 != degree + 1 {
        return Err((
            BadModulus,
            format!(
                "modulus has {} coefficients, expected {}",
                cert.modulus.len(),
                degree + 1
            ),
        ));
    }
    let ctx = make_field(cert.p, e, n, Some(cert.modulus.clone())).map_err(|err| match err {
        FieldError::ReducibleModulus => (
            ReducibleModulus,
            "modulus is reducible over F_p".to_string(),
        ),
        FieldError::BadModulus(s) => (BadModulus, s),
        FieldError::CoordinateOutOfRange(c) => {
            (BadModulus, format!("coefficient {c} is not below p"))
        }
        other => (BadParameters, other.to_string()),
    })?;
    let x = ctx
        .elem(cert.element.clone())
        .map_err(|err| (BadElement, err.to_string()))?;
    if x.is_zero() {
        reject(ZeroElement, "element is 0".into());
    }

    let order = BigUint::from(q).pow(n) - 1u32;
    let primes: Vec<&BigUint> = cert.order_factors.iter().map(|f| &f.prime).collect();
    if primes.windows(2).any(|w| w[0] >= w[1]) || cert.order_factors.iter().any(|f| f.exponent == 0)
    {
        reject(
            FactorsNotCanonical,
            "primes must be strictly ascending with positive exponents".into(),
        );
    }
    let mut product = BigUint::one();
    for f in &cert.order_factors {
        if primality(&f.prime) == Primality::Composite || f.prime <= BigUint::one() {
            reject(FactorNotPrime, format!("{} is not prime", f.prime));
        }
        let exponent = u32::try_from(f.exponent)
            .unwrap_or(u32::MAX)
            .min(order.bits() as u32 + 1);
        product *= f.prime.pow(exponent);
        if product > order {
            break;
        }
    }
    if product != order {
        reject(
            FactorProductMismatch,
            format!("factors multiply to {product}, not q^n - 1 = {order}"),
        );
    }

    let checked: Vec<&BigUint> = cert.primitivity_checks.iter().map(|c| &c.prime).collect();
    if checked != primes {
        reject(
            PrimitivityCoverIncomplete,
            "primitivity checks must list exactly the factor primes".into(),
        );
    }
    for c in &cert.primitivity_checks {
        if c.prime.bits() == 0 || &order % &c.prime != BigUint::ZERO {
            continue;
        }
        let nontrivial = !ctx.is_one(&ctx.pow(&x, &(&order / &c.prime)));
        if !nontrivial {
            reject(NotPrimitive, format!("x^((q^n-1)/{}) = 1", c.prime));
        }
        if nontrivial != c.nontrivial {
            reject(
                RecordMismatch,
                format!("recorded outcome for r = {} is wrong", c.prime),
            );
        }
    }

    let ls: Vec<u64> = cert.normality_divisors.iter().map(|c| c.l).collect();
    if ls != proper_divisors(cert.n) {
        reject(
            NormalityCoverIncomplete,
            format!(
                "divisors {ls:?} do not cover the proper divisors of {}",
                cert.n
            ),
        );
    }
    for c in &cert.normality_divisors {
        let Ok(coprime) = normality_test(&ctx, &x, c.l) else {
            continue;
        };
        if !coprime {
            reject(NotNormal, format!("not normal over F_(q^{})", c.l));
        }
        if coprime != c.coprime {
            reject(
                RecordMismatch,
                format!("recorded outcome for l = {} is wrong", c.l),
            );
        }
    }

    let s = &cert.search;
    let reproduced = match (s.strategy, s.seed, s.stream) {
        (Strategy::Exhaustive, None, None) => ctx.index_of(&x) == Some(s.trial),
        (Strategy::Random, Some(seed), Some(stream)) => {
            s.trial > 0 && replay_random(&ctx, seed, stream, s.trial) == x
        }
        _ => false,
    };
    if !reproduced {
        reject(
            RecordMismatch,
            "search record does not reproduce the element".into(),
        );
    }
    Ok(())
}
