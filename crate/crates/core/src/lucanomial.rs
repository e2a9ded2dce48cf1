//! Lucanomial coefficients, exactly and as `p`-adic residues.
//!
//! Zero factors follow the cancellation convention: a zero above the bar and
//! a zero below it cancel as a `1`. More zeros above than below makes the
//! coefficient `0`; more below than above cannot happen for a Lucas sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big_pow, divides_i128, is_prime, strip_prime, BigMod, Integers, Zmod};
use crate::error::{Error, Result};
use crate::lucas::{u_sequence_in, LucasParams};
use crate::rank::{prime_power_ranks, rank_of_appearance};

/// An exact Lucanomial `(m choose n)_U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LucanomialValue {
    pub m: u64,
    pub n: u64,
    pub value: BigInt,
}

/// Generalized binomial over an arbitrary integer sequence `terms[0..=m]`,
/// with the zero-cancellation convention.
pub fn generalized_binomial(terms: &[BigInt], m: u64, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Ok(BigInt::one());
    }
    if m < n {
        return Ok(BigInt::zero());
    }
    assert!(terms.len() as u64 > m, "need terms up to index {m}");
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let (mut num_zeros, mut den_zeros) = (0u64, 0u64);
    for i in 1..=n {
        let top = &terms[(m + 1 - i) as usize];
        let bottom = &terms[i as usize];
        if top.is_zero() {
            num_zeros += 1;
        } else {
            num *= top;
        }
        if bottom.is_zero() {
            den_zeros += 1;
        } else {
            den *= bottom;
        }
    }
    if num_zeros > den_zeros {
        return Ok(BigInt::zero());
    }
    if num_zeros < den_zeros {
        return Err(Error::ConventionViolation { m, n });
    }
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::InternalNonIntegral { m, n });
    }
    Ok(q)
}

/// `(m choose n)_U` exactly.
pub fn lucanomial_exact(params: &LucasParams, m: u64, n: u64) -> Result<LucanomialValue> {
    let value = if n == 0 || m < n {
        generalized_binomial(&[], m, n)?
    } else {
        let terms = u_sequence_in(&Integers, params, m);
        generalized_binomial(&terms, m, n)?
    };
    Ok(LucanomialValue { m, n, value })
}

/// True iff every `(m choose n)_U` with `0 <= n <= m <= m_max` is an integer.
pub fn integrality_sweep(params: &LucasParams, m_max: u64) -> bool {
    let terms = u_sequence_in(&Integers, params, m_max);
    (0..=m_max).all(|m| (0..=m).all(|n| generalized_binomial(&terms, m, n).is_ok()))
}

/// A `p`-adic approximation `unit * p^valuation` with `unit` known mod `p^k`,
/// or an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValuedResidue {
    prime: u64,
    precision: u32,
    value: Option<(u32, u64)>,
}

impl ValuedResidue {
    fn ring(prime: u64, precision: u32) -> Result<Zmod> {
        Zmod::prime_power(prime, precision)
    }

    pub fn exact_zero(prime: u64, precision: u32) -> Self {
        ValuedResidue { prime, precision, value: None }
    }

    pub fn one(prime: u64, precision: u32) -> Result<Self> {
        Self::from_parts(prime, precision, 0, 1)
    }

    /// Builds `unit * p^valuation`; `unit` must be prime to `p`.
    pub fn from_parts(prime: u64, precision: u32, valuation: u32, unit: u64) -> Result<Self> {
        let ring = Self::ring(prime, precision)?;
        let unit = unit % ring.modulus();
        if unit.is_multiple_of(prime) {
            return Err(Error::Precondition(format!("{unit} is not a unit mod {prime}")));
        }
        Ok(ValuedResidue { prime, precision, value: Some((valuation, unit)) })
    }

    /// The valued residue of an exact integer.
    pub fn from_integer(v: &BigInt, prime: u64, precision: u32) -> Result<Self> {
        if v.is_zero() {
            return Ok(Self::exact_zero(prime, precision));
        }
        let ring = Self::ring(prime, precision)?;
        let (val, rest) = strip_prime(v, prime);
        Self::from_parts(prime, precision, val, ring.reduce_big(&rest))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.prime.pow(self.precision)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.value.is_none()
    }

    pub fn valuation(&self) -> Option<u32> {
        self.value.map(|(v, _)| v)
    }

    pub fn unit(&self) -> Option<u64> {
        self.value.map(|(_, u)| u)
    }

    /// The represented value mod `p^k`, in `[0, p^k)`.
    pub fn residue(&self) -> u64 {
        match self.value {
            None => 0,
            Some((v, _)) if v >= self.precision => 0,
            Some((v, u)) => {
                let ring = Zmod::new(self.modulus());
                ring.mul(u, self.prime.pow(v))
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(
            (self.prime, self.precision),
            (other.prime, other.precision),
            "valued residues over different rings"
        );
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let value = match (self.value, other.value) {
            (Some((v1, u1)), Some((v2, u2))) => {
                let ring = Zmod::new(self.modulus());
                Some((v1 + v2, ring.mul(u1, u2)))
            }
            _ => None,
        };
        ValuedResidue { value, ..*self }
    }

    /// Quotient, when it is `p`-integral. Dividing by an exact zero gives `None`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        self.check_compatible(other);
        let (v2, u2) = other.value?;
        let value = match self.value {
            None => None,
            Some((v1, u1)) => {
                let ring = Zmod::new(self.modulus());
                Some((v1.checked_sub(v2)?, ring.div(u1, u2)?))
            }
        };
        Some(ValuedResidue { value, ..*self })
    }

    /// The same value at a lower precision.
    pub fn reduce_to(&self, precision: u32) -> Self {
        assert!(precision <= self.precision);
        let value = self.value.map(|(v, u)| (v, u % self.prime.pow(precision)));
        ValuedResidue { precision, value, ..*self }
    }
}

fn validate_residue_args(params: &LucasParams, p: u64, k: u32) -> Result<Zmod> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if divides_i128(p, params.q() as i128) {
        return Err(Error::NoRank(p));
    }
    if k == 0 {
        return Err(Error::Precondition("precision must be positive".into()));
    }
    Zmod::prime_power(p, k)
}

/// Whether the rank-valuation path applies: `p` must not divide `2QD`.
pub fn fast_path_applies(params: &LucasParams, p: u64) -> bool {
    p != 2 && !divides_i128(p, params.q() as i128) && !divides_i128(p, params.d())
}

/// Count of multiples of `z` in `[lo, hi]`.
fn multiples_in(z: u64, lo: u64, hi: u64) -> u64 {
    if lo > hi {
        0
    } else {
        hi / z - (lo - 1) / z
    }
}

/// `(m choose n)_U` mod `p^k` as a valued residue.
///
/// Uses rank valuations when `p` does not divide `2QD`, and the exact-strip
/// evaluation otherwise. Both routes produce identical results.
pub fn lucanomial_residue(params: &LucasParams, m: u64, n: u64, p: u64, k: u32) -> Result<ValuedResidue> {
    if fast_path_applies(params, p) {
        lucanomial_residue_fast(params, m, n, p, k)
    } else {
        lucanomial_residue_exact(params, m, n, p, k)
    }
}

/// Rank-valuation route.
///
/// A nonzero `U_t` has `p`-adic valuation `#{a : rho(p^a) | t}`, so each
/// factor's unit part is read off `U_t mod p^(k + v_t)`.
pub fn lucanomial_residue_fast(params: &LucasParams, m: u64, n: u64, p: u64, k: u32) -> Result<ValuedResidue> {
    let ring = validate_residue_args(params, p, k)?;
    if !fast_path_applies(params, p) {
        return Err(Error::Precondition(format!("{p} divides 2QD; rank valuations do not apply")));
    }
    if n == 0 {
        return ValuedResidue::one(p, k);
    }
    if m < n {
        return Ok(ValuedResidue::exact_zero(p, k));
    }

    let zero_period = params.zero_period().map(u64::from);
    if let Some(z) = zero_period {
        let above = multiples_in(z, m - n + 1, m);
        let below = multiples_in(z, 1, n);
        if above > below {
            return Ok(ValuedResidue::exact_zero(p, k));
        }
        if above < below {
            return Err(Error::ConventionViolation { m, n });
        }
    }
    let is_zero = |t: u64| zero_period.is_some_and(|z| t.is_multiple_of(z));

    let rank = rank_of_appearance(params, p)?;
    // Entries past m can never divide a factor index; entries that are
    // multiples of the zero period only divide zero terms.
    let chain = prime_power_ranks(params, p, rank.rho, u32::MAX, Some(m), |r| {
        zero_period.is_some_and(|z| r % z == 0)
    })?;
    let valuation = |t: u64| chain.iter().take_while(|&&r| t.is_multiple_of(r)).count() as u32;

    let top = (m - n + 1)..=m;
    let bottom = 1..=n;
    let v_max = top
        .clone()
        .chain(bottom.clone())
        .filter(|&t| !is_zero(t))
        .map(valuation)
        .max()
        .unwrap_or(0);

    let wide = BigMod::new(big_pow(p, k + v_max));
    let us = u_sequence_in(&wide, params, m);
    let p_big = BigInt::from(p);

    let unit_of = |t: u64| -> Result<(u32, u64)> {
        let v = valuation(t);
        let scale = num_traits::pow(p_big.clone(), v as usize);
        let (q, r) = us[t as usize].div_rem(&scale);
        if !r.is_zero() || (&q % &p_big).is_zero() {
            return Err(Error::Precondition(format!("valuation of U_{t} at {p} is not {v}")));
        }
        Ok((v, ring.reduce_big(&q)))
    };

    let (mut v_top, mut u_top) = (0u32, 1u64 % ring.modulus());
    for t in top.filter(|&t| !is_zero(t)) {
        let (v, u) = unit_of(t)?;
        v_top += v;
        u_top = ring.mul(u_top, u);
    }
    let (mut v_bot, mut u_bot) = (0u32, 1u64 % ring.modulus());
    for t in bottom.filter(|&t| !is_zero(t)) {
        let (v, u) = unit_of(t)?;
        v_bot += v;
        u_bot = ring.mul(u_bot, u);
    }
    finish(p, k, &ring, m, n, v_top, u_top, v_bot, u_bot)
}

/// Exact-strip route: every factor is computed exactly and its power of `p`
/// divided out before reduction.
pub fn lucanomial_residue_exact(params: &LucasParams, m: u64, n: u64, p: u64, k: u32) -> Result<ValuedResidue> {
    let ring = validate_residue_args(params, p, k)?;
    if n == 0 {
        return ValuedResidue::one(p, k);
    }
    if m < n {
        return Ok(ValuedResidue::exact_zero(p, k));
    }
    let us = u_sequence_in(&Integers, params, m);
    let mut zeros = 0i64;
    let mut fold = |range: std::ops::RangeInclusive<u64>, sign: i64| {
        let (mut val, mut unit) = (0u32, 1u64 % ring.modulus());
        for t in range {
            let term = &us[t as usize];
            if term.is_zero() {
                zeros += sign;
                continue;
            }
            let (v, rest) = strip_prime(term, p);
            val += v;
            unit = ring.mul(unit, ring.reduce_big(&rest));
        }
        (val, unit)
    };
    let (v_top, u_top) = fold((m - n + 1)..=m, 1);
    let (v_bot, u_bot) = fold(1..=n, -1);
    if zeros > 0 {
        return Ok(ValuedResidue::exact_zero(p, k));
    }
    if zeros < 0 {
        return Err(Error::ConventionViolation { m, n });
    }
    finish(p, k, &ring, m, n, v_top, u_top, v_bot, u_bot)
}

#[allow(clippy::too_many_arguments)]
fn finish(p: u64, k: u32, ring: &Zmod, m: u64, n: u64, v_top: u32, u_top: u64, v_bot: u32, u_bot: u64) -> Result<ValuedResidue> {
    let valuation = v_top.checked_sub(v_bot).ok_or(Error::InternalNonIntegral { m, n })?;
    let unit = ring.div(u_top, u_bot).ok_or(Error::InternalNonIntegral { m, n })?;
    ValuedResidue::from_parts(p, k, valuation, unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: i64, q: i64) -> LucasParams {
        LucasParams::new(p, q).unwrap()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(lucanomial_exact(&params(1, -1), 9, 4).unwrap().value, BigInt::from(12376));
        assert_eq!(lucanomial_exact(&params(2, 2), 12, 8).unwrap().value, BigInt::from(4096));
        assert_eq!(lucanomial_exact(&params(3, -2), 17, 0).unwrap().value, BigInt::one());
        assert_eq!(lucanomial_exact(&params(1, -1), 5, 7).unwrap().value, BigInt::zero());
    }

    #[test]
    fn convention_violation_on_bad_sequence() {
        // Not a Lucas sequence: a zero below the bar with none above.
        let terms: Vec<BigInt> = [0, 1, 0, 3, 5].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(generalized_binomial(&terms, 4, 2), Err(Error::ConventionViolation { m: 4, n: 2 }));
        let terms: Vec<BigInt> = [0, 2, 3].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(generalized_binomial(&terms, 2, 1), Err(Error::InternalNonIntegral { m: 2, n: 1 }));
    }

    #[test]
    fn residue_examples() {
        let r = lucanomial_residue(&params(1, -1), 9, 4, 5, 3).unwrap();
        assert_eq!((r.valuation(), r.unit()), (Some(0), Some(1)));
        let r = lucanomial_residue(&params(2, 1), 10, 5, 5, 3).unwrap();
        assert_eq!((r.valuation(), r.unit()), (Some(0), Some(2)));
        let r = lucanomial_residue(&params(2, 2), 12, 8, 5, 3).unwrap();
        assert_eq!((r.valuation(), r.unit()), (Some(0), Some(96)));
        assert!(fast_path_applies(&params(2, 2), 5));
    }

    #[test]
    fn residue_argument_errors() {
        assert_eq!(lucanomial_residue(&params(1, -1), 9, 4, 2, 3), Err(Error::NotOddPrime(2)));
        assert_eq!(lucanomial_residue(&params(1, 3), 9, 4, 3, 3), Err(Error::NoRank(3)));
        assert!(lucanomial_residue_fast(&params(1, -1), 9, 4, 5, 3).is_err());
    }

    #[test]
    fn residue_with_positive_valuation() {
        // (22 choose 11)_F contains F_20 = 6765 = 3*5*11*41 above, F_10 = 55 below.
        let lp = params(1, -1);
        let exact = lucanomial_exact(&lp, 22, 11).unwrap().value;
        for p in [7u64, 11, 13] {
            let want = ValuedResidue::from_integer(&exact, p, 4).unwrap();
            assert_eq!(lucanomial_residue_fast(&lp, 22, 11, p, 4).unwrap(), want);
            assert_eq!(lucanomial_residue_exact(&lp, 22, 11, p, 4).unwrap(), want);
        }
    }

    #[test]
    fn degenerate_zero_results() {
        // U(2,2): zeros at multiples of 4. (9 choose 2) has U_9 U_8 over U_2 U_1.
        let lp = params(2, 2);
        assert!(lucanomial_residue(&lp, 9, 2, 5, 3).unwrap().is_exact_zero());
        assert!(lucanomial_residue_exact(&lp, 9, 2, 7, 3).unwrap().is_exact_zero());
        assert_eq!(lucanomial_exact(&lp, 9, 2).unwrap().value, BigInt::zero());
    }

    #[test]
    fn valued_residue_algebra() {
        let a = ValuedResidue::from_parts(5, 3, 1, 7).unwrap();
        let b = ValuedResidue::from_parts(5, 3, 2, 3).unwrap();
        let c = a.mul(&b);
        assert_eq!((c.valuation(), c.unit()), (Some(3), Some(21)));
        assert_eq!(c.residue(), 0);
        let d = c.checked_div(&a).unwrap();
        assert_eq!(d, b);
        assert!(a.checked_div(&b).is_none());
        assert!(a.checked_div(&ValuedResidue::exact_zero(5, 3)).is_none());
        assert!(ValuedResidue::exact_zero(5, 3).mul(&a).is_exact_zero());
        assert_eq!(a.residue(), 35);
        assert!(ValuedResidue::from_parts(5, 3, 0, 10).is_err());
    }

    #[test]
    fn integrality_examples() {
        assert!(integrality_sweep(&params(1, -1), 30));
        assert!(integrality_sweep(&params(0, 3), 25));
        assert!(integrality_sweep(&params(2, 1), 20));
    }
}
