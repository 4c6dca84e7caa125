//! Complex characters of small fields, used to check the character-sum
//! machinery numerically: orthogonality, Gauss sums, Vinogradov's function for
//! primitive elements and the additive-character functions Ω_l for normality.
//!
//! Multiplicative characters are `χ_j(g^k) = e^{2πi jk/(q^n-1)}` for the table
//! generator `g`, with `χ_0(0) = 1` and `χ_j(0) = 0` otherwise. Additive
//! characters are `ψ_a(x) = e^{2πi Tr(ax)/p}` with the absolute trace.

mod poly;
#[cfg(test)]
mod tests;

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors, euler_phi, mult_order, p_free_part, prime_divisors, FactorBudget};
use crate::ffield::{FFElem, FieldArith, FieldCtx, FieldError, LogElem, LogField, LOG_ZERO};
use crate::fqxpoly::{normality_test, CycFactorization, FqxError};

/// Largest field the character checks run on.
pub const CHAR_FIELD_CAP: u64 = 1 << 12;

pub const ORTHOGONALITY_TOL: f64 = 1e-9;
pub const GAUSS_REL_TOL: f64 = 1e-6;
pub const POINTWISE_TOL: f64 = 1e-9;
pub const SUM_REL_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("field of size {size} exceeds the character cap {cap}")]
    FieldTooLarge { size: String, cap: u64 },
    #[error("{l} does not divide {n}")]
    NotADivisor { l: u64, n: u64 },
    #[error("could not factor X^{m} - 1 over F_{q}")]
    Factorization { m: u64, q: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Fqx(#[from] FqxError),
}

type Result<T> = std::result::Result<T, CharError>;

#[derive(Debug, Clone)]
pub struct CharSystem {
    ctx: FieldCtx,
    table: LogField,
    p: u64,
    q: u64,
    n: u64,
    size: u64,
    order: u64,
    /// `e^{2πi k/(q^n-1)}`
    mult_roots: Vec<Complex64>,
    /// `e^{2πi t/p}`
    add_roots: Vec<Complex64>,
    /// `Tr(g^k)` for `k < q^n - 1`.
    trace_log: Vec<u32>,
    /// Logs of the power basis `1, x, …, x^{D-1}`.
    basis_logs: Vec<LogElem>,
    /// Order-test verdicts by coordinate index.
    primitive: Vec<bool>,
}

impl CharSystem {
    pub fn new(p: u64, e: u32, n: u32) -> Result<Self> {
        let ctx = FieldCtx::new(p, e, n, None)?;
        Self::from_ctx(ctx)
    }

    pub fn from_ctx(mut ctx: FieldCtx) -> Result<Self> {
        let size = ctx
            .size_u64()
            .filter(|&s| s <= CHAR_FIELD_CAP)
            .ok_or_else(|| CharError::FieldTooLarge {
                size: ctx.size().to_string(),
                cap: CHAR_FIELD_CAP,
            })?;
        if ctx.group_order_factors().is_none() {
            ctx.factor_group_order(FactorBudget::default())?;
        }
        let table = LogField::new(&ctx)?;
        let p = ctx.p();
        let order = size - 1;
        let d = ctx.degree();
        let mult_roots = (0..order).map(|k| root(k, order)).collect();
        let add_roots = (0..p).map(|t| root(t, p)).collect();
        let gen = ctx.x();
        let mut basis = Vec::with_capacity(d);
        let mut b = ctx.one();
        for _ in 0..d {
            basis.push(b.clone());
            b = ctx.mul(&b, &gen);
        }
        let basis_traces: Vec<u64> = basis.iter().map(|b| ctx.trace_fp(b)).collect();
        let trace_of_index = |mut idx: u64| {
            let mut t = 0u64;
            for tb in &basis_traces {
                t = (t + (idx % p) * tb) % p;
                idx /= p;
            }
            t as u32
        };
        let trace_log = (0..order)
            .map(|k| trace_of_index(table.to_index(k as u32)))
            .collect();
        let basis_logs = basis.iter().map(|b| table.from_elem(&ctx, b)).collect();
        let primitive = (0..size)
            .map(|i| ctx.is_primitive(&ctx.from_index(i)))
            .collect::<std::result::Result<_, _>>()?;
        Ok(CharSystem {
            p,
            q: ctx.q(),
            n: ctx.n() as u64,
            size,
            order,
            ctx,
            table,
            mult_roots,
            add_roots,
            trace_log,
            basis_logs,
            primitive,
        })
    }

    /// The same field and tables viewed as a degree-`D/e` extension of F_{p^e}.
    pub fn relabel(&self, e: u32) -> Result<Self> {
        let d = self.ctx.degree() as u32;
        if e == 0 || d % e != 0 {
            return Err(CharError::NotADivisor {
                l: e as u64,
                n: d as u64,
            });
        }
        let mut ctx = FieldCtx::new(self.p, e, d / e, Some(self.ctx.modulus().to_vec()))?;
        if let Some(f) = self.ctx.group_order_factors() {
            ctx.set_group_order_factors(f.clone())?;
        }
        Ok(CharSystem {
            q: ctx.q(),
            n: ctx.n() as u64,
            ctx,
            ..self.clone()
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn table(&self) -> &LogField {
        &self.table
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    /// `q^n - 1`, also the number of multiplicative characters.
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn generator(&self) -> &FFElem {
        self.table.generator()
    }
    pub fn num_mult_chars(&self) -> u64 {
        self.order
    }
    pub fn num_add_chars(&self) -> u64 {
        self.size
    }

    /// Discrete log of a nonzero element to the generator.
    pub fn dlog(&self, x: &FFElem) -> Option<u64> {
        let l = self.table.from_elem(&self.ctx, x);
        (l != LOG_ZERO).then_some(l as u64)
    }

    /// Order of `χ_j` in the dual group.
    pub fn chi_order(&self, j: u64) -> u64 {
        self.order / j.gcd(&self.order)
    }

    /// `χ_j(x)` for `x` in log form.
    pub fn chi(&self, j: u64, x: LogElem) -> Complex64 {
        if x == LOG_ZERO {
            return if j % self.order == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let k = ((j % self.order) as u128 * x as u128 % self.order as u128) as usize;
        self.mult_roots[k]
    }

    /// `ψ_a(x)` for `a`, `x` in log form.
    pub fn psi(&self, a: LogElem, x: LogElem) -> Complex64 {
        self.add_roots[self.trace_of_product(a, x) as usize]
    }

    /// `Tr(a x)` for `a`, `x` in log form.
    fn trace_of_product(&self, a: LogElem, x: LogElem) -> u32 {
        if a == LOG_ZERO || x == LOG_ZERO {
            0
        } else {
            self.trace_log[((a as u64 + x as u64) % self.order) as usize]
        }
    }

    /// Both orthogonality relations for both character groups, by direct summation.
    pub fn orthogonality_check(&self) -> OrthogonalityReport {
        let n = self.order as usize;
        let p = self.p as usize;
        let mut mult_max = 0f64;
        let mut mult_dual_max = 0f64;
        let mut mult_trivial = 0f64;
        for j in 0..n {
            // Σ_k χ_j(g^k)
            let mut s = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for _ in 0..n {
                s += self.mult_roots[idx];
                idx += j;
                if idx >= n {
                    idx -= n;
                }
            }
            if j == 0 {
                mult_trivial = (s - n as f64).norm();
            } else {
                mult_max = mult_max.max(s.norm());
            }
        }
        for k in 1..n {
            // Σ_j χ_j(g^k) with g^k ≠ 1
            let mut s = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for _ in 0..n {
                s += self.mult_roots[idx];
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            mult_dual_max = mult_dual_max.max(s.norm());
        }
        let add_sum = |a: LogElem| {
            let mut hist = vec![0u64; p];
            hist[0] += 1; // x = 0
            for k in 0..n as u32 {
                hist[self.trace_of_product(a, k) as usize] += 1;
            }
            hist.iter()
                .zip(&self.add_roots)
                .map(|(&c, z)| z * c as f64)
                .sum::<Complex64>()
        };
        let add_trivial = (add_sum(LOG_ZERO) - self.size as f64).norm();
        let mut add_max = 0f64;
        let mut add_dual_max = 0f64;
        for a in 0..n as u32 {
            add_max = add_max.max(add_sum(a).norm());
            // Σ_b ψ_b(x) at x = g^a
            let mut s = Complex64::new(1.0, 0.0);
            for b in 0..n as u32 {
                s += self.psi(b, a);
            }
            add_dual_max = add_dual_max.max(s.norm());
        }
        let mult_tol = ORTHOGONALITY_TOL * n as f64;
        let add_tol = ORTHOGONALITY_TOL * self.size as f64;
        OrthogonalityReport {
            field_size: self.size,
            mult_max_dev: mult_max,
            mult_dual_max_dev: mult_dual_max,
            mult_trivial_dev: mult_trivial,
            add_max_dev: add_max,
            add_dual_max_dev: add_dual_max,
            add_trivial_dev: add_trivial,
            mult_tolerance: mult_tol,
            add_tolerance: add_tol,
            pass: mult_max.max(mult_dual_max).max(mult_trivial) <= mult_tol
                && add_max.max(add_dual_max).max(add_trivial) <= add_tol,
        }
    }

    /// `|Σ_x χ(x) ψ(x)|` for every pair of characters, one FFT over `χ` per `ψ`.
    pub fn gauss_magnitude_check(&self) -> GaussReport {
        let n = self.order as usize;
        let expected = (self.size as f64).sqrt();
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut max_rel = 0f64;
        let mut unit_max = 0f64;
        let mut pairs = 0u64;
        for a in 0..n as u32 {
            let shift = a as usize;
            for (k, b) in buf.iter_mut().enumerate() {
                let i = if k + shift >= n {
                    k + shift - n
                } else {
                    k + shift
                };
                *b = self.add_roots[self.trace_log[i] as usize];
            }
            // buf[j] = Σ_k ψ_a(g^k) e^{2πi jk/N} = Σ_{x ≠ 0} χ_j(x) ψ_a(x)
            fft.process_with_scratch(&mut buf, &mut scratch);
            for s in &buf[1..] {
                max_rel = max_rel.max((s.norm() - expected).abs() / expected);
                pairs += 1;
            }
            unit_max = unit_max.max((buf[0] + 1.0).norm());
        }
        GaussReport {
            field_size: self.size,
            expected_magnitude: expected,
            pairs,
            max_rel_dev: max_rel,
            trivial_chi_unit_sum_dev: unit_max,
            pass: max_rel <= GAUSS_REL_TOL && unit_max <= POINTWISE_TOL * self.size as f64,
        }
    }

    /// Vinogradov's function at every element, indexed by coordinate index.
    pub fn omega(&self) -> Vec<f64> {
        let n = self.order as usize;
        let rad: u64 = prime_divisors(self.order).into_iter().product();
        let theta = theta_of(self.order);
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (j, cj) in c.iter_mut().enumerate() {
            let d = self.chi_order(j as u64);
            if rad % d == 0 {
                let mu = if prime_divisors(d).len() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                *cj = Complex64::new(mu / euler_phi(d) as f64, 0.0);
            }
        }
        FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut c);
        let mut out = vec![0f64; self.size as usize];
        // only χ_0 is nonzero at 0
        out[0] = theta;
        for (k, v) in c.iter().enumerate() {
            out[self.table.to_index(k as u32) as usize] = theta * v.re;
        }
        out
    }

    pub fn omega_check(&self) -> OmegaReport {
        let w = self.omega();
        let theta = theta_of(self.order);
        let mut max_dev = 0f64;
        for (i, v) in w.iter().enumerate().skip(1) {
            let want = if self.primitive[i] { 1.0 } else { 0.0 };
            max_dev = max_dev.max((v - want).abs());
        }
        OmegaReport {
            theta,
            at_zero: w[0],
            at_zero_dev: (w[0] - theta).abs(),
            max_dev,
            primitive_count: self.primitive.iter().filter(|&&b| b).count() as u64,
            pass: max_dev <= POINTWISE_TOL && (w[0] - theta).abs() <= POINTWISE_TOL,
        }
    }

    /// Irreducible factors of `X^{n/l} - 1` over F_{q^l} and the images of
    /// the power basis under every divisor.
    pub fn order_lattice(&self, l: u64) -> Result<OrderLattice> {
        if l == 0 || self.n % l != 0 {
            return Err(CharError::NotADivisor { l, n: self.n });
        }
        let t = &self.table;
        let p = self.p;
        let k = self.n / l;
        let big_q = self.q.pow(l as u32);
        let m_prime = p_free_part(k, p);
        let multiplicity = (k / m_prime) as u32;
        let log_p_q = self.ctx.e() * l as u32;
        let q_pows: Vec<u64> = (0..=k)
            .scan(1u64 % self.order.max(1), |v, _| {
                let cur = *v;
                *v = (*v as u128 * big_q as u128 % self.order.max(1) as u128) as u64;
                Some(cur)
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + self.size * 64 + l);
        let order = self.order as u32;
        // uniform elements of F_Q as traces from F_{q^n}
        let sample = |rng: &mut ChaCha8Rng| {
            let y: u32 = rng.gen_range(0..=order);
            let y = if y == order { LOG_ZERO } else { y };
            let mut acc = LOG_ZERO;
            for qp in &q_pows[..k as usize] {
                acc = t.add(&acc, &t.pow(y, *qp));
            }
            acc
        };
        let mut factors = Vec::new();
        for e in divisors(m_prime) {
            let d = if e == 1 {
                1
            } else {
                mult_order(big_q, e).expect("coprime") as usize
            };
            let count = euler_phi(e) as usize / d;
            let f: poly::Poly = poly::cyclotomic_integer(e)
                .into_iter()
                .map(|c| t.from_index(c.rem_euclid(p as i64) as u64))
                .collect();
            let parts = if count == 1 {
                vec![f]
            } else {
                poly::equal_degree_split(t, &f, d, log_p_q, sample, &mut rng)
                    .filter(|v| v.len() == count)
                    .ok_or(CharError::Factorization {
                        m: m_prime,
                        q: big_q,
                    })?
            };
            for coeffs in parts {
                factors.push(LatticeFactor {
                    cyclotomic_index: e,
                    degree: poly::degree(&coeffs),
                    coeffs,
                });
            }
        }
        // cross-checks: product, coefficients in F_Q, degrees against cosets
        let mut prod = poly::one(t);
        for f in &factors {
            prod = poly::mul(t, &prod, &f.coeffs);
            if f.coeffs.iter().any(|&c| t.pow(c, big_q) != c) {
                return Err(CharError::Factorization {
                    m: m_prime,
                    q: big_q,
                });
            }
        }
        let mut target = vec![LOG_ZERO; m_prime as usize + 1];
        target[0] = t.neg(t.one());
        target[m_prime as usize] = t.one();
        let mut degs: Vec<usize> = factors.iter().map(|f| f.degree).collect();
        degs.sort_unstable();
        let cf = CycFactorization::new(self.q, p, self.n, l)?;
        let coset_degrees: Vec<usize> = cf.coset_degrees.iter().map(|&d| d as usize).collect();
        if prod != target || degs != coset_degrees {
            return Err(CharError::Factorization {
                m: m_prime,
                q: big_q,
            });
        }
        let mut lattice = OrderLattice {
            l,
            q_l: big_q,
            k,
            m_prime,
            multiplicity,
            factors,
            q_pows,
            images: HashMap::new(),
        };
        for ex in lattice.divisors() {
            let g = lattice.poly(t, &ex);
            let imgs = self
                .basis_logs
                .iter()
                .map(|&b| {
                    let mut acc = LOG_ZERO;
                    for (j, c) in g.iter().enumerate() {
                        acc = t.add(&acc, &t.mul(c, &t.pow(b, lattice.q_pows[j])));
                    }
                    acc
                })
                .collect();
            lattice.images.insert(ex, imgs);
        }
        Ok(lattice)
    }

    /// Whether `ψ_a(G∘x) = 1` for all `x`; by linearity it suffices to test a basis.
    fn annihilates(&self, lattice: &OrderLattice, a: LogElem, ex: &[u32]) -> bool {
        lattice.images[ex]
            .iter()
            .all(|&w| self.trace_of_product(a, w) == 0)
    }

    /// Exponent vector (over `lattice.factors`) of the order of `ψ_a`.
    pub fn additive_order_exponents(&self, lattice: &OrderLattice, a: LogElem) -> Vec<u32> {
        let mut ex = vec![lattice.multiplicity; lattice.factors.len()];
        if a == LOG_ZERO {
            return vec![0; ex.len()];
        }
        // the annihilating divisors are the multiples of the order, so each
        // exponent can be lowered independently
        for i in 0..ex.len() {
            while ex[i] > 0 {
                ex[i] -= 1;
                if !self.annihilates(lattice, a, &ex) {
                    ex[i] += 1;
                    break;
                }
            }
        }
        ex
    }

    pub fn additive_order(&self, a: &FFElem, l: u64) -> Result<AdditiveCharOrder> {
        let lattice = self.order_lattice(l)?;
        let ex = self.additive_order_exponents(&lattice, self.table.from_elem(&self.ctx, a));
        let degree = lattice.degree_of(&ex);
        let order_poly = lattice
            .poly(&self.table, &ex)
            .into_iter()
            .map(|c| self.table.to_elem(&self.ctx, c))
            .collect();
        Ok(AdditiveCharOrder {
            a: a.clone(),
            l,
            exponents: ex,
            degree,
            order_poly,
        })
    }

    /// Number of additive characters of each order against `φ_l` of that order.
    pub fn order_count_check(&self, lattice: &OrderLattice) -> OrderCountReport {
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        *counts
            .entry(self.additive_order_exponents(lattice, LOG_ZERO))
            .or_default() += 1;
        for a in 0..self.order as u32 {
            *counts
                .entry(self.additive_order_exponents(lattice, a))
                .or_default() += 1;
        }
        let mut mismatches = Vec::new();
        let divs = lattice.divisors();
        for ex in &divs {
            let want = lattice.phi(ex);
            let got = counts.get(ex).copied().unwrap_or(0);
            if want != got {
                mismatches.push(OrderMismatch {
                    exponents: ex.clone(),
                    expected: want,
                    found: got,
                });
            }
        }
        OrderCountReport {
            l: lattice.l,
            factor_degrees: lattice.factors.iter().map(|f| f.degree).collect(),
            multiplicity: lattice.multiplicity,
            divisors: divs.len(),
            mismatches: mismatches.clone(),
            pass: mismatches.is_empty(),
        }
    }

    /// `Ω_l` at every element, indexed by coordinate index, through a
    /// `D`-dimensional DFT over F_p^D.
    pub fn normality_function(&self, lattice: &OrderLattice) -> Vec<f64> {
        let p = self.p as usize;
        let d = self.basis_logs.len();
        let mut arr = vec![Complex64::new(0.0, 0.0); self.size as usize];
        let mut add_coeff = |a: LogElem| {
            let ex = self.additive_order_exponents(lattice, a);
            if ex.iter().any(|&e| e > 1) {
                return;
            }
            let mu = if ex.iter().sum::<u32>() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let c = mu / lattice.phi(&ex) as f64;
            // Tr(a x) = <T(a), coords(x)> with T(a)_i = Tr(a x^i)
            let mut idx = 0usize;
            for &b in self.basis_logs.iter().rev() {
                idx = idx * p + self.trace_of_product(a, b) as usize;
            }
            arr[idx] += c;
        };
        add_coeff(LOG_ZERO);
        for a in 0..self.order as u32 {
            add_coeff(a);
        }
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(p);
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut stride = 1usize;
        for _ in 0..d {
            for outer in (0..arr.len()).step_by(stride * p) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (t, b) in buf.iter_mut().enumerate() {
                        *b = arr[base + t * stride];
                    }
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    for (t, b) in buf.iter().enumerate() {
                        arr[base + t * stride] = *b;
                    }
                }
            }
            stride *= p;
        }
        let theta = lattice.theta();
        arr.iter().map(|v| theta * v.re).collect()
    }

    /// `Ω_l` against the gcd normality test, pointwise and summed.
    pub fn normality_function_check(&self, lattice: &OrderLattice) -> Result<NormalityFnReport> {
        let omega_l = self.normality_function(lattice);
        let flags = self.normal_flags(lattice.l)?;
        Ok(normality_report(lattice, &omega_l, &flags))
    }

    fn normal_flags(&self, l: u64) -> Result<Vec<bool>> {
        (0..self.size)
            .map(|i| Ok(normality_test(&self.ctx, &self.ctx.from_index(i), l)?))
            .collect()
    }

    /// Checks that depend only on the field, not on the base field.
    pub fn field_checks(&self) -> FieldReport {
        let orthogonality = self.orthogonality_check();
        let gauss = self.gauss_magnitude_check();
        let omega = self.omega_check();
        FieldReport {
            p: self.p,
            degree: self.ctx.degree() as u32,
            size: self.size,
            pass: orthogonality.pass && gauss.pass && omega.pass,
            orthogonality,
            gauss,
            omega,
        }
    }

    /// `Ω_l` and additive orders for every `l | n`, and the character-sum
    /// expressions for the CN and PCN counts.
    pub fn view_checks(&self) -> Result<ViewReport> {
        let w = self.omega();
        let mut prod = vec![1f64; self.size as usize];
        let mut all_normal = vec![true; self.size as usize];
        let mut normality = Vec::new();
        let mut orders = Vec::new();
        for l in divisors(self.n) {
            let lattice = self.order_lattice(l)?;
            let omega_l = self.normality_function(&lattice);
            let flags = self.normal_flags(l)?;
            for i in 0..prod.len() {
                prod[i] *= omega_l[i];
                all_normal[i] &= flags[i];
            }
            normality.push(normality_report(&lattice, &omega_l, &flags));
            orders.push(self.order_count_check(&lattice));
        }
        let cn = all_normal.iter().filter(|&&b| b).count() as u64;
        let pcn = all_normal
            .iter()
            .zip(&self.primitive)
            .filter(|(a, b)| **a && **b)
            .count() as u64;
        let cn_sum: f64 = prod.iter().sum();
        let pcn_sum: f64 = prod.iter().zip(&w).map(|(a, b)| a * b).sum();
        let identity = IdentityReport {
            cn,
            cn_sum,
            pcn,
            pcn_sum,
            pass: (cn_sum - cn as f64).abs() <= SUM_REL_TOL * (cn as f64).max(1.0)
                && (pcn_sum - pcn as f64).abs() <= SUM_REL_TOL * (pcn as f64).max(1.0),
        };
        let pass =
            normality.iter().all(|r| r.pass) && orders.iter().all(|r| r.pass) && identity.pass;
        Ok(ViewReport {
            q: self.q,
            n: self.n,
            normality,
            orders,
            identity,
            pass,
        })
    }

    pub fn self_test(&self) -> Result<SelfTestReport> {
        let field = self.field_checks();
        let view = self.view_checks()?;
        Ok(SelfTestReport {
            pass: field.pass && view.pass,
            field,
            view,
        })
    }
}

/// Runs every character check on F_{p^{e n}} viewed over F_{p^e}.
pub fn chars_selftest(p: u64, e: u32, n: u32) -> Result<SelfTestReport> {
    CharSystem::new(p, e, n)?.self_test()
}

fn root(k: u64, n: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * k as f64 / n as f64)
}

/// `φ(r)/r` for the radical `r` of `n`.
fn theta_of(n: u64) -> f64 {
    prime_divisors(n)
        .into_iter()
        .map(|r| 1.0 - 1.0 / r as f64)
        .product()
}

fn normality_report(lattice: &OrderLattice, omega_l: &[f64], flags: &[bool]) -> NormalityFnReport {
    let mut max_dev = 0f64;
    for (v, &f) in omega_l.iter().zip(flags).skip(1) {
        let want = if f { 1.0 } else { 0.0 };
        max_dev = max_dev.max((v - want).abs());
    }
    let sum: f64 = omega_l.iter().sum();
    let phi = lattice.phi(&vec![lattice.multiplicity; lattice.factors.len()]);
    let sum_rel_dev = (sum - phi as f64).abs() / phi as f64;
    NormalityFnReport {
        l: lattice.l,
        at_zero: omega_l[0],
        max_dev,
        normal_count: flags.iter().filter(|&&b| b).count() as u64,
        sum,
        phi,
        sum_rel_dev,
        pass: max_dev <= POINTWISE_TOL
            && omega_l[0].abs() <= POINTWISE_TOL
            && sum_rel_dev <= SUM_REL_TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFactor {
    /// `e` with this factor dividing `Φ_e`.
    pub cyclotomic_index: u64,
    pub degree: usize,
    /// Coefficients in log form, ascending.
    pub coeffs: Vec<LogElem>,
}

/// Divisors of `X^{n/l} - 1 = Π P_i^{multiplicity}` over F_{q^l}, as exponent vectors.
#[derive(Debug, Clone)]
pub struct OrderLattice {
    pub l: u64,
    pub q_l: u64,
    pub k: u64,
    pub m_prime: u64,
    pub multiplicity: u32,
    pub factors: Vec<LatticeFactor>,
    q_pows: Vec<u64>,
    images: HashMap<Vec<u32>, Vec<LogElem>>,
}

impl OrderLattice {
    pub fn divisors(&self) -> Vec<Vec<u32>> {
        let r = self.factors.len();
        let base = self.multiplicity + 1;
        let total = (base as usize).pow(r as u32);
        (0..total)
            .map(|mut c| {
                (0..r)
                    .map(|_| {
                        let d = (c % base as usize) as u32;
                        c /= base as usize;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    pub fn degree_of(&self, ex: &[u32]) -> usize {
        ex.iter()
            .zip(&self.factors)
            .map(|(&e, f)| e as usize * f.degree)
            .sum()
    }

    /// `φ_l` of the divisor: `Π (Q^{d e} - Q^{d (e-1)})` over its prime powers.
    pub fn phi(&self, ex: &[u32]) -> u64 {
        ex.iter()
            .zip(&self.factors)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, f)| {
                let low = self.q_l.pow(f.degree as u32 * (e - 1));
                low * (self.q_l.pow(f.degree as u32) - 1)
            })
            .product()
    }

    /// `φ_l(F')/Q^{deg F'}` for the square-free part `F'`.
    pub fn theta(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| 1.0 - (self.q_l as f64).powi(-(f.degree as i32)))
            .product()
    }

    fn poly(&self, t: &LogField, ex: &[u32]) -> poly::Poly {
        let mut g = poly::one(t);
        for (&e, f) in ex.iter().zip(&self.factors) {
            for _ in 0..e {
                g = poly::mul(t, &g, &f.coeffs);
            }
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditiveCharOrder {
    pub a: FFElem,
    pub l: u64,
    /// Exponents over the irreducible factors of the order lattice.
    pub exponents: Vec<u32>,
    pub degree: usize,
    /// Coefficients of the order polynomial, ascending.
    pub order_poly: Vec<FFElem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub field_size: u64,
    /// `max |Σ_{x≠0} χ(x)|` over nontrivial `χ`.
    pub mult_max_dev: f64,
    /// `max |Σ_χ χ(g)|` over `g ≠ 1`.
    pub mult_dual_max_dev: f64,
    pub mult_trivial_dev: f64,
    pub add_max_dev: f64,
    pub add_dual_max_dev: f64,
    pub add_trivial_dev: f64,
    pub mult_tolerance: f64,
    pub add_tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussReport {
    pub field_size: u64,
    pub expected_magnitude: f64,
    /// Pairs of nontrivial characters checked.
    pub pairs: u64,
    pub max_rel_dev: f64,
    /// `max |Σ_{x≠0} ψ(x) + 1|` over nontrivial `ψ`: with the trivial `χ` the
    /// sum over units has magnitude 1, and adding `χ_0(0) ψ(0) = 1` gives 0.
    pub trivial_chi_unit_sum_dev: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub theta: f64,
    pub at_zero: f64,
    pub at_zero_dev: f64,
    pub max_dev: f64,
    pub primitive_count: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityFnReport {
    pub l: u64,
    pub at_zero: f64,
    pub max_dev: f64,
    pub normal_count: u64,
    pub sum: f64,
    pub phi: u64,
    pub sum_rel_dev: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderMismatch {
    pub exponents: Vec<u32>,
    pub expected: u64,
    pub found: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCountReport {
    pub l: u64,
    pub factor_degrees: Vec<usize>,
    pub multiplicity: u32,
    pub divisors: usize,
    pub mismatches: Vec<OrderMismatch>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub cn: u64,
    /// `Σ_x Π_{l|n} Ω_l(x)`
    pub cn_sum: f64,
    pub pcn: u64,
    /// `Σ_x ω(x) Π_{l|n} Ω_l(x)`
    pub pcn_sum: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    pub p: u64,
    pub degree: u32,
    pub size: u64,
    pub orthogonality: OrthogonalityReport,
    pub gauss: GaussReport,
    pub omega: OmegaReport,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewReport {
    pub q: u64,
    pub n: u64,
    pub normality: Vec<NormalityFnReport>,
    pub orders: Vec<OrderCountReport>,
    pub identity: IdentityReport,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestReport {
    pub field: FieldReport,
    pub view: ViewReport,
    pub pass: bool,
}
