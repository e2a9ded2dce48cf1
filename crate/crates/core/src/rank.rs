//! Legendre symbols, ranks of appearance and maximal-rank primes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{divides_i128, is_prime, primes_between, BigMod, Zmod};
use crate::error::{Error, Result};
use crate::lucas::{lucas_pair_in, LucasParams};
use crate::par::{self, Execution};

/// Rank of appearance data for one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankInfo {
    pub prime: u64,
    /// Least `t > 0` with `p | U_t`.
    pub rho: u64,
    /// Legendre symbol `(D | p)`.
    pub epsilon: i8,
    /// `rho == p - epsilon`.
    pub maximal: bool,
    /// `rho(p^a)` for the exponents that were requested; always holds `a = 1`.
    pub rho_prime_power: BTreeMap<u32, u64>,
}

impl RankInfo {
    /// `p - epsilon`, the largest possible rank.
    pub fn maximal_value(&self) -> u64 {
        (self.prime as i64 - self.epsilon as i64) as u64
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// Legendre symbol `(a | p)` by Euler's criterion `a^((p-1)/2) mod p`.
pub fn legendre(a: i128, p: u64) -> Result<i8> {
    require_odd_prime(p)?;
    let ring = Zmod::new(p);
    let r = ring.reduce_i128(a);
    if r == 0 {
        return Ok(0);
    }
    Ok(if ring.pow(r, (p - 1) / 2) == 1 { 1 } else { -1 })
}

/// Rank of appearance of `p` together with `rho(p)`.
pub fn rank_of_appearance(params: &LucasParams, p: u64) -> Result<RankInfo> {
    rank_with_powers(params, p, 1)
}

/// Rank of appearance of `p`, with `rho(p^a)` for `1 <= a <= max_exponent`.
pub fn rank_with_powers(params: &LucasParams, p: u64, max_exponent: u32) -> Result<RankInfo> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if divides_i128(p, params.q() as i128) {
        return Err(Error::NoRank(p));
    }
    require_odd_prime(p)?;

    let rho = scan_rank(params, p);
    let epsilon = legendre(params.d(), p)?;
    let maximal = rho as i64 == p as i64 - epsilon as i64;
    let chain = prime_power_ranks(params, p, rho, max_exponent.max(1), None, |_| false)?;
    let rho_prime_power = chain
        .into_iter()
        .enumerate()
        .map(|(i, r)| (i as u32 + 1, r))
        .collect();
    Ok(RankInfo { prime: p, rho, epsilon, maximal, rho_prime_power })
}

/// Least `t` in `1..=p+1` with `p | U_t`, by direct scan mod `p`.
fn scan_rank(params: &LucasParams, p: u64) -> u64 {
    let ring = Zmod::new(p);
    let pp = ring.reduce_i128(params.p() as i128);
    let qq = ring.reduce_i128(params.q() as i128);
    let (mut prev, mut cur) = (0u64, 1u64 % p);
    for t in 1..=p + 1 {
        if cur == 0 {
            return t;
        }
        let next = ring.sub(ring.mul(pp, cur), ring.mul(qq, prev));
        prev = cur;
        cur = next;
    }
    unreachable!("an odd prime not dividing Q always has a rank at most p + 1")
}

/// The chain `rho(p), rho(p^2), ...` for odd `p` not dividing `Q`.
///
/// Each `rho(p^{a+1})` is found among the multiples `j * rho(p^a)`,
/// `1 <= j <= p`. The chain stops after `max_exponent` entries, as soon as
/// `stop` returns true for the latest entry, or when the next rank would
/// exceed `bound`.
pub fn prime_power_ranks<F>(
    params: &LucasParams,
    p: u64,
    rho: u64,
    max_exponent: u32,
    bound: Option<u64>,
    stop: F,
) -> Result<Vec<u64>>
where
    F: Fn(u64) -> bool,
{
    let mut chain = vec![rho];
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    while (chain.len() as u32) < max_exponent && !stop(*chain.last().unwrap()) {
        modulus *= &pb;
        let ring = BigMod::new(modulus.clone());
        let base = *chain.last().unwrap();
        let limit = bound.map_or(p, |b| p.min(b / base));
        match (1..=limit)
            .map(|j| j * base)
            .find(|&t| lucas_pair_in(&ring, params, t).0.is_zero())
        {
            Some(next) => chain.push(next),
            None if limit < p => break,
            None => {
                return Err(Error::Precondition(format!(
                    "no rank for {p}^{} among multiples of {base}",
                    chain.len() + 1
                )))
            }
        }
    }
    Ok(chain)
}

/// Euler's criterion for Lucas sequences: `p | U_{(p - eps)/2}` iff `Q` is a
/// square mod `p`. Returns whether the two sides agree.
pub fn euler_criterion_check(params: &LucasParams, p: u64) -> Result<bool> {
    require_odd_prime(p)?;
    if divides_i128(p, params.d()) || divides_i128(p, params.q() as i128) {
        return Err(Error::Precondition(format!("{p} divides 2DQ")));
    }
    let eps = legendre(params.d(), p)?;
    let index = ((p as i64 - eps as i64) / 2) as u64;
    let ring = Zmod::new(p);
    let divides = lucas_pair_in(&ring, params, index).0 == 0;
    let q_square = legendre(params.q() as i128, p)? == 1;
    Ok(divides == q_square)
}

/// Primes in `[p_min, p_max]` of maximal rank, ascending.
pub fn find_maximal_rank_primes(params: &LucasParams, p_min: u64, p_max: u64) -> Result<Vec<RankInfo>> {
    find_maximal_rank_primes_with(params, p_min, p_max, Execution::default())
}

pub fn find_maximal_rank_primes_with(
    params: &LucasParams,
    p_min: u64,
    p_max: u64,
    exec: Execution,
) -> Result<Vec<RankInfo>> {
    if p_min < 5 || p_min > p_max {
        return Err(Error::InvalidRange(format!("need 5 <= p_min <= p_max, got [{p_min}, {p_max}]")));
    }
    let primes: Vec<u64> = primes_between(p_min, p_max)
        .into_iter()
        .filter(|&p| !divides_i128(p, params.q() as i128))
        .collect();
    let ranks = par::map(exec, &primes, |&p| rank_of_appearance(params, p));
    let mut out = Vec::new();
    for r in ranks {
        let r = r?;
        if r.maximal {
            out.push(r);
        }
    }
    Ok(out)
}
