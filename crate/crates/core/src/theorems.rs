//! Verifiers for the Wolstenholme-type congruences, and sweeps over
//! parameter grids and prime ranges.

use std::cell::OnceCell;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{primes_between, Integers, Ring, Zmod};
use crate::error::{Error, Result};
use crate::lucanomial::{generalized_binomial, lucanomial_residue, lucanomial_residue_exact};
use crate::lucas::{lucas_term, LucasParams};
use crate::par::{self, Execution};
use crate::rank::{rank_of_appearance, RankInfo};
use crate::report::{Claim, CongruenceReport};
use crate::sums::{compute_sums, half_d_term, lemma_family_from_table, SumsTable};

/// `(-1)^odd * value` in `ring`.
fn with_sign(ring: &Zmod, odd: bool, value: u64) -> u64 {
    if odd {
        ring.neg(value)
    } else {
        value
    }
}

/// Lazily shared data for one `(params, prime)` pair of maximal rank.
pub struct PrimeContext {
    params: LucasParams,
    rank: RankInfo,
    base: OnceCell<Result<u64>>,
    tables: OnceCell<Result<SumsTable>>,
}

impl PrimeContext {
    /// The context for a prime `p >= min_prime` of maximal rank.
    pub fn new(params: &LucasParams, p: u64, min_prime: u64) -> Result<Self> {
        if p < min_prime {
            return Err(Error::Precondition(format!("needs p >= {min_prime}, got {p}")));
        }
        let rank = rank_of_appearance(params, p)?;
        if !rank.maximal {
            return Err(Error::NonMaximalRank { prime: p, rho: rank.rho, expected: rank.maximal_value() });
        }
        Ok(Self::from_rank(params, rank))
    }

    fn from_rank(params: &LucasParams, rank: RankInfo) -> Self {
        PrimeContext { params: *params, rank, base: OnceCell::new(), tables: OnceCell::new() }
    }

    pub fn rank(&self) -> &RankInfo {
        &self.rank
    }

    fn p(&self) -> u64 {
        self.rank.prime
    }

    fn rho(&self) -> u64 {
        self.rank.rho
    }

    fn ring(&self, exponent: u32) -> Result<Zmod> {
        Zmod::prime_power(self.p(), exponent)
    }

    fn residue(&self, m: u64, n: u64, exponent: u32) -> Result<u64> {
        Ok(lucanomial_residue(&self.params, m, n, self.p(), exponent)?.residue())
    }

    /// `(2rho - 1 choose rho - 1)_U mod p^3`.
    fn base(&self) -> Result<u64> {
        self.base
            .get_or_init(|| self.residue(2 * self.rho() - 1, self.rho() - 1, 3))
            .clone()
    }

    /// Sums modulo `p^6`.
    fn table(&self) -> Result<&SumsTable> {
        self.tables
            .get_or_init(|| compute_sums(&self.params, &self.rank, 6))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `Q^(rho(rho-1)/2 * times) mod p^j`.
    fn q_power(&self, ring: &Zmod, times: u64) -> u64 {
        let q = ring.reduce_i128(self.params.q() as i128);
        ring.pow(q, self.rho() * (self.rho() - 1) / 2 * times)
    }

    fn report(&self, claim: Claim, k: Option<u64>, l: Option<u64>, exponent: u32, lhs: u64, rhs: u64) -> CongruenceReport {
        CongruenceReport::compare(claim, &self.params, &self.rank, k, l, exponent, lhs, rhs)
    }

    /// `((k+1)rho - 1 choose rho - 1)_U = (-1)^(k eps) Q^(k rho(rho-1)/2) mod p^3`,
    /// with the power form `(2rho - 1 choose rho - 1)_U^k` as a side check.
    pub fn theorem_n(&self, k: u64) -> Result<CongruenceReport> {
        let ring = self.ring(3)?;
        let lhs = self.residue((k + 1) * self.rho() - 1, self.rho() - 1, 3)?;
        let odd = k % 2 == 1 && self.rank.epsilon != 0;
        let rhs = with_sign(&ring, odd, self.q_power(&ring, k));
        let power = ring.pow(self.base()?, k);
        Ok(self.report(Claim::N, Some(k), None, 3, lhs, rhs).with_side_check("power form", power == lhs))
    }

    /// `(k rho choose l rho)_U = (k choose l)_U' (-1)^(l(k-l)eps) Q^(l(k-l)rho(rho-1)/2) mod p^3`
    /// with `U' = U_rho * U(V_rho, Q^rho)`.
    pub fn theorem_ljwe(&self, k: u64, l: u64) -> Result<CongruenceReport> {
        if l > k {
            return Err(Error::Precondition(format!("needs k >= l, got k={k}, l={l}")));
        }
        let ring = self.ring(3)?;
        let lhs = self.residue(k * self.rho(), l * self.rho(), 3)?;
        let (scaled, unscaled) = derived_sequences(&self.params, self.rho(), k);
        let coefficient = generalized_binomial(&scaled, k, l)?;
        let exponent = l * (k - l);
        let odd = exponent % 2 == 1 && self.rank.epsilon != 0;
        let rhs = with_sign(&ring, odd, ring.mul(ring.reduce_big(&coefficient), self.q_power(&ring, exponent)));
        let mut report = self.report(Claim::LjWe, Some(k), Some(l), 3, lhs, rhs);
        if let Some(unscaled) = unscaled {
            let same = generalized_binomial(&unscaled, k, l).is_ok_and(|c| c == coefficient);
            report = report.with_side_check("unscaled U'", same);
        }
        Ok(report)
    }

    /// `(2rho - 1 choose rho - 1)_U mod p^5`, variants 1 to 4.
    pub fn p5(&self, variant: u8) -> Result<CongruenceReport> {
        if self.p() < 7 {
            return Err(Error::Precondition(format!("needs p >= 7, got {}", self.p())));
        }
        let ring = self.ring(5)?;
        let table = self.table()?.reduce_to(5);
        let lhs = self.residue(2 * self.rho() - 1, self.rho() - 1, 5)?;
        let ratio = ring.div(table.u_rho(), table.v_rho()).expect("V_rho is a unit at maximal rank");
        let ratio2 = ring.mul(ratio, ratio);
        let s1 = table.power(1);
        let s11 = table.get(&[1, 1]).expect("tabulated for p >= 7");
        let lead = with_sign(&ring, self.rank.epsilon != 0, self.q_power(&ring, 1));
        let bracket = match variant {
            1 => {
                let d = ring.reduce_i128(self.params.d());
                let r = if self.rank.epsilon == 1 { ring.mul(ring.mul(d, d), ring.mul(ratio2, ratio2)) } else { 0 };
                let half_v = ring.div(table.v_rho(), 2).expect("p odd");
                let prefactor = ring.pow(half_v, self.rho() - 1);
                let inner = [1, ring.mul(ratio, s1), ring.mul(ratio2, s11), r].into_iter().fold(0, |a, b| ring.add(a, b));
                return Ok(self.report(Claim::P5(1), None, None, 5, lhs, ring.mul(prefactor, inner)));
            }
            2 => ring.add(1, ring.mul(2, ring.mul(ratio, s1))),
            3 => ring.sub(1, ring.mul(ratio2, table.q_sum(0))),
            // Same sign correction for the (rho - 1)D term as in the L17 lemma.
            4 => [1, ring.mul(ratio, s1), ring.mul(ratio2, s11), half_d_term(&self.params, &self.rank, &table)]
                .into_iter()
                .fold(0, |a, b| ring.add(a, b)),
            other => return Err(Error::Precondition(format!("no variant {other}"))),
        };
        Ok(self.report(Claim::P5(variant), None, None, 5, lhs, ring.mul(lead, bracket)))
    }

    /// `(2rho - 1 choose rho - 1)_U mod p^6`.
    pub fn p6(&self) -> Result<CongruenceReport> {
        if self.p() < 7 {
            return Err(Error::Precondition(format!("needs p >= 7, got {}", self.p())));
        }
        let ring = self.ring(6)?;
        let table = self.table()?;
        let lhs = self.residue(2 * self.rho() - 1, self.rho() - 1, 6)?;
        let ratio = ring.div(table.u_rho(), table.v_rho()).expect("V_rho is a unit at maximal rank");
        let ratio3 = ring.pow(ratio, 3);
        let two_thirds = ring.div(2, 3).expect("p >= 7");
        let bracket = [1, ring.mul(2, ring.mul(ratio, table.power(1))), ring.mul(two_thirds, ring.mul(ratio3, table.power(3)))]
            .into_iter()
            .fold(0, |a, b| ring.add(a, b));
        let rho_odd = (self.rho() - 1) % 2 == 1;
        let eps_odd = self.rank.epsilon != 0;
        let rhs = ring.mul(with_sign(&ring, rho_odd, self.q_power(&ring, 1)), bracket);
        Ok(self.report(Claim::P6, None, None, 6, lhs, rhs).with_side_check("(-1)^(rho-1) = (-1)^eps", rho_odd == eps_odd))
    }

    /// Fibonomial `((k+1)rho - 1 choose rho - 1)_F = eps^k mod p^3`.
    pub fn kw(&self, k: u64) -> Result<CongruenceReport> {
        if self.params != LucasParams::fibonacci() || self.p() < 7 || self.rank.epsilon == 0 {
            return Err(Error::Precondition("needs the Fibonacci sequence, p >= 7 and eps = ±1".into()));
        }
        let ring = self.ring(3)?;
        let lhs = self.residue((k + 1) * self.rho() - 1, self.rho() - 1, 3)?;
        let rhs = with_sign(&ring, self.rank.epsilon == -1 && k % 2 == 1, 1);
        Ok(self.report(Claim::KW, Some(k), None, 3, lhs, rhs))
    }

    /// The lemma family, sharing this context's sums table.
    pub fn lemmas(&self) -> Result<Vec<CongruenceReport>> {
        if self.p() < 7 {
            return Err(Error::Precondition(format!("lemma family needs p >= 7, got {}", self.p())));
        }
        Ok(lemma_family_from_table(&self.params, &self.rank, self.table()?))
    }
}

/// `U'_j = U_{j rho}` for `j <= k`, built as `U_rho * U_j(V_rho, Q^rho)`, and the
/// unscaled `U_j(V_rho, Q^rho)` when `U_rho != 0`.
fn derived_sequences(params: &LucasParams, rho: u64, k: u64) -> (Vec<BigInt>, Option<Vec<BigInt>>) {
    let term = lucas_term(params, rho);
    let q_rho = num_traits::pow(BigInt::from(params.q()), rho as usize);
    let mut unscaled = vec![BigInt::zero(), BigInt::from(1)];
    while (unscaled.len() as u64) <= k {
        let n = unscaled.len();
        let next = Integers.sub(&(&term.v * &unscaled[n - 1]), &(&q_rho * &unscaled[n - 2]));
        unscaled.push(next);
    }
    unscaled.truncate(k as usize + 1);
    let scaled = unscaled.iter().map(|x| &term.u * x).collect();
    (scaled, (!term.u.is_zero()).then_some(unscaled))
}

fn ordinary_binomial(n: u64, k: u64) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn classical_context(params: &LucasParams, p: u64) -> Result<PrimeContext> {
    if *params != LucasParams::natural() {
        return Err(Error::Precondition("classical congruences use U(2,1)".into()));
    }
    PrimeContext::new(params, p, 5)
}

/// Theorem-level verifier for `((k+1)rho - 1 choose rho - 1)_U mod p^3`.
pub fn verify_theorem_n(params: &LucasParams, p: u64, k: u64) -> Result<CongruenceReport> {
    PrimeContext::new(params, p, 5)?.theorem_n(k)
}

/// Theorem-level verifier for `(k rho choose l rho)_U mod p^3`.
pub fn verify_theorem_ljwe(params: &LucasParams, p: u64, k: u64, l: u64) -> Result<CongruenceReport> {
    PrimeContext::new(params, p, 5)?.theorem_ljwe(k, l)
}

/// The four congruences for `(2rho - 1 choose rho - 1)_U mod p^5`.
pub fn verify_p5(params: &LucasParams, p: u64, variant: u8) -> Result<CongruenceReport> {
    PrimeContext::new(params, p, 7)?.p5(variant)
}

/// The congruence for `(2rho - 1 choose rho - 1)_U mod p^6`.
pub fn verify_p6(params: &LucasParams, p: u64) -> Result<CongruenceReport> {
    PrimeContext::new(params, p, 7)?.p6()
}

/// Fibonomial congruence `((k+1)rho - 1 choose rho - 1)_F = eps^k mod p^3`.
pub fn verify_kw(p: u64, k: u64) -> Result<CongruenceReport> {
    PrimeContext::new(&LucasParams::fibonacci(), p, 7)?.kw(k)
}

/// Ordinary binomial `(kp choose lp) = (k choose l) mod p^3`, evaluated exactly.
pub fn verify_viggo(p: u64, k: u64, l: u64) -> Result<CongruenceReport> {
    if l > k {
        return Err(Error::Precondition(format!("needs k >= l, got k={k}, l={l}")));
    }
    let ctx = classical_context(&LucasParams::natural(), p)?;
    let ring = ctx.ring(3)?;
    let lhs = ring.reduce_big(&ordinary_binomial(k * p, l * p));
    let rhs = ring.reduce_big(&ordinary_binomial(k, l));
    Ok(ctx.report(Claim::Viggo, Some(k), Some(l), 3, lhs, rhs))
}

/// Ordinary binomial `((k+1)p - 1 choose p - 1) = 1 mod p^3`, evaluated exactly.
pub fn verify_w_plus(p: u64, k: u64) -> Result<CongruenceReport> {
    let ctx = classical_context(&LucasParams::natural(), p)?;
    let ring = ctx.ring(3)?;
    let lhs = ring.reduce_big(&ordinary_binomial((k + 1) * p - 1, p - 1));
    Ok(ctx.report(Claim::WPlus, Some(k), None, 3, lhs, 1))
}

/// Wolstenholme: `(2p - 1 choose p - 1) = 1 mod p^3`, evaluated exactly.
pub fn verify_w(p: u64) -> Result<CongruenceReport> {
    let mut r = verify_w_plus(p, 1)?;
    r.claim = Claim::W;
    r.k = None;
    Ok(r)
}

/// What to sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub params: Vec<LucasParams>,
    pub primes: RangeInclusive<u64>,
    pub theorems: Vec<Claim>,
    pub k_range: RangeInclusive<u64>,
    pub l_range: RangeInclusive<u64>,
}

/// Whether a claim's hypotheses on `params` and `p` hold, given maximal rank.
fn applies(claim: &Claim, params: &LucasParams, rank: &RankInfo) -> bool {
    let p = rank.prime;
    match claim {
        Claim::W | Claim::WPlus | Claim::Viggo => *params == LucasParams::natural() && p >= 5,
        Claim::N | Claim::LjWe => p >= 5,
        Claim::P5(_) | Claim::P6 | Claim::Lemma(_) => p >= 7,
        Claim::KW => *params == LucasParams::fibonacci() && p >= 7 && rank.epsilon != 0,
    }
}

fn run_claim(ctx: &PrimeContext, claim: &Claim, spec: &SweepSpec, out: &mut Vec<CongruenceReport>) {
    let p = ctx.p();
    let mut push = |k: Option<u64>, l: Option<u64>, r: Result<CongruenceReport>| {
        out.push(r.unwrap_or_else(|e| {
            CongruenceReport::failed(claim.clone(), &ctx.params, p, Some(ctx.rank.clone()), k, l, &e)
        }))
    };
    let ks = spec.k_range.clone();
    let ls = |k: u64| (*spec.l_range.start())..=(*spec.l_range.end()).min(k);
    match claim {
        Claim::W => push(None, None, verify_w(p)),
        Claim::WPlus => ks.for_each(|k| push(Some(k), None, verify_w_plus(p, k))),
        Claim::Viggo => {
            for k in ks {
                ls(k).for_each(|l| push(Some(k), Some(l), verify_viggo(p, k, l)));
            }
        }
        Claim::N => ks.for_each(|k| push(Some(k), None, ctx.theorem_n(k))),
        Claim::LjWe => {
            for k in ks {
                ls(k).for_each(|l| push(Some(k), Some(l), ctx.theorem_ljwe(k, l)));
            }
        }
        Claim::P5(v) => push(None, None, ctx.p5(*v)),
        Claim::P6 => push(None, None, ctx.p6()),
        Claim::KW => ks.for_each(|k| push(Some(k), None, ctx.kw(k))),
        Claim::Lemma(_) => match ctx.lemmas() {
            Ok(reports) => out.extend(reports),
            Err(e) => push(None, None, Err(e)),
        },
    }
}

fn sweep_one(params: &LucasParams, p: u64, spec: &SweepSpec) -> Vec<CongruenceReport> {
    // Primes dividing Q have no rank; they are outside every claim.
    let Ok(rank) = rank_of_appearance(params, p) else {
        return Vec::new();
    };
    if !rank.maximal {
        return Vec::new();
    }
    let ctx = PrimeContext::from_rank(params, rank);
    let mut out = Vec::new();
    for claim in spec.theorems.iter().filter(|c| applies(c, params, &ctx.rank)) {
        run_claim(&ctx, claim, spec, &mut out);
    }
    out
}

/// Every applicable claim for every maximal-rank prime of every parameter
/// pair, ordered by `(params, p, claim, k, l)`.
pub fn sweep(spec: &SweepSpec) -> Vec<CongruenceReport> {
    sweep_with(spec, Execution::default())
}

/// [`sweep`] with an explicit execution mode; the output does not depend on it.
pub fn sweep_with(spec: &SweepSpec, exec: Execution) -> Vec<CongruenceReport> {
    let primes = primes_between((*spec.primes.start()).max(3), *spec.primes.end());
    let tasks: Vec<(LucasParams, u64)> =
        spec.params.iter().flat_map(|lp| primes.iter().map(move |&p| (*lp, p))).collect();
    par::map(exec, &tasks, |(lp, p)| sweep_one(lp, *p, spec)).into_iter().flatten().collect()
}

/// The lemma family at every maximal-rank prime `p >= 7` in range.
pub fn lemma_sweep(params: &[LucasParams], primes: RangeInclusive<u64>, exec: Execution) -> Vec<CongruenceReport> {
    let spec = SweepSpec {
        params: params.to_vec(),
        primes,
        theorems: vec![Claim::lemma("lemmas")],
        k_range: 0..=0,
        l_range: 0..=0,
    };
    sweep_with(&spec, exec)
}

/// Recomputes a report's left side through the exact-strip path.
///
/// `None` for claims whose left side is not a Lucanomial coefficient
/// (ordinary binomials and lemmas) or that did not evaluate.
pub fn crosscheck_exact(report: &CongruenceReport) -> Option<bool> {
    let rho = report.rank.as_ref()?.rho;
    let lhs = report.lhs?;
    let (m, n) = match report.claim {
        Claim::N | Claim::KW => ((report.k? + 1) * rho - 1, rho - 1),
        Claim::LjWe => (report.k? * rho, report.l? * rho),
        Claim::P5(_) | Claim::P6 => (2 * rho - 1, rho - 1),
        _ => return None,
    };
    let exact = lucanomial_residue_exact(&report.params, m, n, report.prime, report.modulus_exponent).ok()?;
    Some(exact.residue() == lhs)
}
